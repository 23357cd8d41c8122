"""Batch command line: scenario generation, demonstrations, training,
planning and evaluation, plus the HTTP service entry point.

Every subcommand is deterministic under fixed seeds, exits 0 on success and
prints one machine-parsable `error: <kind>: <detail>` line on failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path as FsPath

import numpy as np

from . import irl, metrics, oracle, planner, scenario as scn, tinynet
from .config import ConfigError, load_config


class CliError(RuntimeError):
    def __init__(self, kind: str, detail: str):
        super().__init__(f"{kind}: {detail}")
        self.kind = kind
        self.detail = detail


def _write_json(path, doc) -> None:
    FsPath(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, separators=(",", ":"), sort_keys=True)
        fh.write("\n")


def _load_scenarios(dir_path) -> list[scn.Scenario]:
    d = FsPath(dir_path)
    if not d.is_dir():
        raise CliError("missing_input", f"scenario directory {d} does not exist")
    out = []
    for f in sorted(d.glob("*.json")):
        out.append(scn.load_scenario(f))
    if not out:
        raise CliError("missing_input", f"no scenario files in {d}")
    return out


def _load_demo_map(dir_path) -> dict[str, scn.Path]:
    d = FsPath(dir_path)
    if not d.is_dir():
        raise CliError("missing_input", f"demo directory {d} does not exist")
    demos: dict[str, scn.Path] = {}
    for f in sorted(d.glob("*.json")):
        p = scn.load_path(f)
        demos[p.scenario_id] = p
    if not demos:
        raise CliError("missing_input", f"no path files in {d}")
    return demos


def cmd_gen(args) -> int:
    cfg = load_config(args.config)
    sc = cfg.scenario
    scenarios = scn.generate_scenarios(
        args.count,
        args.width,
        args.height,
        args.peds,
        args.seed,
        resolution=sc.resolution,
        empty_map=sc.empty_map,
        robot_radius=sc.robot_radius,
        goal_radius=sc.goal_radius,
        ped_body_radius=sc.ped_body_radius,
    )
    out = FsPath(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for s in scenarios:
        scn.save_scenario(s, out / f"{s.id}.json")
    print(f"wrote {len(scenarios)} scenarios to {out}")
    return 0


def cmd_demo(args) -> int:
    if args.mode != "oracle":
        raise CliError("bad_flag", f"unknown demo mode {args.mode!r}")
    cfg = load_config(args.config)
    scenarios = _load_scenarios(args.scenarios)
    out = FsPath(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for s in scenarios:
        demo = oracle.oracle_demo(s, cfg.oracle, cfg.features)
        scn.save_path(demo, out / f"{s.id}.json")
    print(f"wrote {len(scenarios)} demonstration paths to {out}")
    return 0


def _parse_split(text: str) -> float:
    try:
        a, b = text.split(":")
        a, b = float(a), float(b)
        if a <= 0 or b < 0:
            raise ValueError
        return a / (a + b)
    except ValueError:
        raise CliError("bad_flag", f"--split must look like 75:25, got {text!r}") from None


def cmd_train(args) -> int:
    cfg = load_config(args.config)
    scenarios = _load_scenarios(args.scenarios)
    demos = _load_demo_map(args.demos)
    missing = [s.id for s in scenarios if s.id not in demos]
    if missing:
        raise CliError("missing_input", f"no demo for scenarios: {missing[:5]}")
    frac = _parse_split(args.split)
    n_train = max(1, min(len(scenarios) - 1, round(frac * len(scenarios)))) if len(scenarios) > 1 else 1
    train_s = scenarios[:n_train]
    val_s = scenarios[n_train:]
    train_d = [demos[s.id] for s in train_s]
    val_d = [demos[s.id] for s in val_s]

    train_cfg = replace(cfg.train, seed=args.seed if args.seed is not None else cfg.train.seed)
    pair = tinynet.GanPair.initialize(
        derive_seed_for_model(train_cfg.seed), lr_g=train_cfg.lr_g, lr_d=train_cfg.lr_d
    )
    pair, pre_info = irl.pretrain(pair, train_s, train_d, train_cfg, cfg.planner, feature_config=cfg.features)

    out = FsPath(args.out)
    out.mkdir(parents=True, exist_ok=True)
    best_seen = [-1.0]

    def on_epoch(row: irl.EpochRow) -> None:
        if row.val_homotopy > best_seen[0]:  # checkpoint improving epochs only
            best_seen[0] = row.val_homotopy
            tinynet.save_pair(pair, out / f"epoch_{row.epoch:04d}.json")
        print(
            f"epoch {row.epoch}: d_loss={row.d_loss:.4f} g_loss={row.g_loss:.4f} "
            f"train_h={row.train_homotopy:.2f} val_h={row.val_homotopy:.2f}"
        )

    best_pair, report = irl.train(
        pair,
        train_s,
        train_d,
        val_s,
        val_d,
        train_cfg,
        cfg.planner,
        feature_config=cfg.features,
        pretrain_info=pre_info,
        on_epoch=on_epoch,
    )
    tinynet.save_pair(best_pair, out / "best.json")
    report.save_json(out / "train_report.json")
    report.save_csv(out / "train_report.csv")
    print(
        f"training stopped after epoch {report.stopping_epoch} ({report.stopping_reason}); "
        f"best epoch {report.best_epoch} val homotopy {report.best_val_homotopy:.2f}"
    )
    return 0


def derive_seed_for_model(seed: int) -> int:
    return irl.derive_seed(seed, 7)


def cmd_plan(args) -> int:
    cfg = load_config(args.config)
    s = scn.load_scenario(args.scenario)
    pc = replace(cfg.planner, seed=args.seed if args.seed is not None else cfg.planner.seed)
    if args.planner == "rrt":
        result = planner.plan_rrt(s, pc)
    elif args.planner == "rrtstar":
        result = planner.plan_rrt_star(s, pc)
    elif args.planner == "ganrrtstar":
        if not args.model:
            raise CliError("missing_input", "--model is required for ganrrtstar")
        pair = _pair_from_model_file(args.model)
        result = planner.plan_gan_rrt_star(s, pair, pc, feature_config=cfg.features)
    else:
        raise CliError("bad_flag", f"unknown planner {args.planner!r}")
    if args.dump_tree:
        _write_json(args.dump_tree, result.tree.to_dicts())
    if not result.success:
        raise CliError("planner_failure", f"no path found within {pc.max_iterations} iterations")
    FsPath(args.out).parent.mkdir(parents=True, exist_ok=True)
    scn.save_path(result.path, args.out)
    print(f"wrote path with {len(result.path.points)} points to {args.out}")
    return 0


def _pair_from_model_file(path) -> tinynet.GanPair:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if "generator" in doc:
        return tinynet.pair_from_dict(doc)
    gen = tinynet.mlp_from_dict(doc)
    dis = tinynet.Mlp(tinynet.DISCRIMINATOR_SIZES, rng=np.random.default_rng(0))
    return tinynet.GanPair(gen, dis, tinynet.SgdMomentum(gen, 1e-3), tinynet.SgdMomentum(dis, 1e-3))


def cmd_eval(args) -> int:
    cfg = load_config(args.config)
    scenarios = {s.id: s for s in _load_scenarios(args.scenarios)}
    demos = _load_demo_map(args.demos)
    plans_dir = FsPath(args.plans)
    if not plans_dir.is_dir():
        raise CliError("missing_input", f"plan directory {plans_dir} does not exist")
    by_source: dict[str, list[scn.Path]] = {}
    for f in sorted(plans_dir.glob("*.json")):
        p = scn.load_path(f)
        by_source.setdefault(p.source, []).append(p)
    if not by_source:
        raise CliError("missing_input", f"no plan files in {plans_dir}")
    doc: dict = {"planners": {}}
    for source in sorted(by_source):
        reports = []
        for plan in by_source[source]:
            if plan.scenario_id not in scenarios:
                raise CliError("missing_input", f"plan references unknown scenario {plan.scenario_id!r}")
            if plan.scenario_id not in demos:
                raise CliError("missing_input", f"no demo for scenario {plan.scenario_id!r}")
            s = scenarios[plan.scenario_id]
            reports.append(metrics.metric_report(s, demos[plan.scenario_id], plan, feature_config=cfg.features))
        reports.sort(key=lambda r: r.scenario_id)
        doc["planners"][source] = {
            "reports": [r.to_dict() for r in reports],
            "aggregate": metrics.aggregate_reports(reports),
        }
    _write_json(args.out, doc)
    if args.csv:
        _write_eval_csv(args.csv, doc)
    print(f"wrote evaluation report to {args.out}")
    return 0


def _write_eval_csv(path, doc) -> None:
    import csv

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["planner", "scenario_id", "dissimilarity", "feature_difference", "homotopic", "path_length_demo", "path_length_plan"]
        )
        for source in sorted(doc["planners"]):
            for r in doc["planners"][source]["reports"]:
                writer.writerow(
                    [
                        source,
                        r["scenario_id"],
                        r["dissimilarity"],
                        r["feature_difference"],
                        r["homotopic"],
                        r["path_length_demo"],
                        r["path_length_plan"],
                    ]
                )


def cmd_serve(args) -> int:
    from .service import serve

    serve(args.port, args.state, config_path=args.config)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="socialplan",
        description="Socially adaptive path planning workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--seed", type=int, default=None, help="seed override")

    p = sub.add_parser("gen", help="generate a scenario corpus")
    common(p)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--peds", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen, needs_seed=True)

    p = sub.add_parser("demo", help="produce demonstration paths")
    common(p)
    p.add_argument("--scenarios", required=True)
    p.add_argument("--mode", default="oracle")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("train", help="run the adversarial training loop")
    common(p)
    p.add_argument("--scenarios", required=True)
    p.add_argument("--demos", required=True)
    p.add_argument("--split", default="75:25")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("plan", help="plan one scenario")
    common(p)
    p.add_argument("--scenario", required=True)
    p.add_argument("--planner", required=True, choices=["rrt", "rrtstar", "ganrrtstar"])
    p.add_argument("--model", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--dump-tree", dest="dump_tree", default=None)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("eval", help="evaluate plans against demonstrations")
    common(p)
    p.add_argument("--scenarios", required=True)
    p.add_argument("--demos", required=True)
    p.add_argument("--plans", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="start the HTTP service")
    common(p)
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--state", required=True)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.seed is None and getattr(args, "needs_seed", False):
        args.seed = 0
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc.kind}: {exc.detail}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    except scn.FormatError as exc:
        print(f"error: format: {exc}", file=sys.stderr)
        return 2
    except scn.GenerationError as exc:
        print(f"error: generation: {exc}", file=sys.stderr)
        return 2
    except oracle.OracleError as exc:
        print(f"error: oracle: {exc}", file=sys.stderr)
        return 2
    except irl.TrainingAborted as exc:
        print(f"error: training: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: missing_input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
