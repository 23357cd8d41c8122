"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion lines
live. The end-to-end pipeline (corpus, demonstrations, training, evaluation)
runs once as a session fixture and several criteria assert against its
artifacts.
"""

import json
import math
import time
from dataclasses import replace

import numpy as np
import pytest

import socialplan as sp
from socialplan import metrics
from socialplan.features import FeatureExtractor
from socialplan.irl import TrainConfig, derive_seed, pretrain, train
from socialplan.oracle import oracle_demo
from socialplan.planner import PlannerConfig, plan_gan_rrt_star, plan_rrt_star
from socialplan.scenario import OccupancyGrid, Path, Scenario, generate_scenarios
from socialplan.tinynet import GanPair, d_loss, d_loss_grads, g_loss, g_loss_grads

from homotopy_bfs import GridWorld, label_components, random_grid_path

# frozen end-to-end configuration (calibrated once, then pinned)
CORPUS = dict(count=100, width=64, height=64, ped_count=4, seed=31, resolution=0.08)
TRAIN_CONFIG = TrainConfig(epochs_max=200, repetitions=2, patience=5, seed=5, pretrain_samples=5000)
ROLLOUT_PLANNER = PlannerConfig(max_iterations=600, cost_weight=4.0)
EVAL_PLANNER = PlannerConfig(max_iterations=1000, cost_weight=4.0)
EVAL_SEEDS = (101, 102, 103)


def report_line(name: str, ok: bool, detail: str) -> None:
    print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")


# ---------------------------------------------------------------------------
# criterion: gradient correctness


def test_acceptance_gradient_correctness():
    t0 = time.time()
    rng = np.random.default_rng(12345)
    worst = 0.0

    def rel(a, b):
        return abs(a - b) / max(abs(a) + abs(b), 1e-3)

    def fd_params(net, loss_fn, h=1e-5):
        out = []
        for layer in range(len(net.weights)):
            dw = np.zeros_like(net.weights[layer])
            for idx in np.ndindex(*net.weights[layer].shape):
                orig = net.weights[layer][idx]
                net.weights[layer][idx] = orig + h
                up = loss_fn()
                net.weights[layer][idx] = orig - h
                down = loss_fn()
                net.weights[layer][idx] = orig
                dw[idx] = (up - down) / (2 * h)
            db = np.zeros_like(net.biases[layer])
            for idx in np.ndindex(*net.biases[layer].shape):
                orig = net.biases[layer][idx]
                net.biases[layer][idx] = orig + h
                up = loss_fn()
                net.biases[layer][idx] = orig - h
                down = loss_fn()
                net.biases[layer][idx] = orig
                db[idx] = (up - down) / (2 * h)
            out.append((dw, db))
        return out

    for instance in range(100):
        pair = GanPair.initialize(10_000 + instance)
        real = rng.random((4, 5))
        fake = rng.random((5, 5))
        if instance % 2 == 0:
            _, analytic = d_loss_grads(pair, real, fake)
            numeric = fd_params(pair.discriminator, lambda: d_loss(pair, real, fake))
        else:
            _, analytic = g_loss_grads(pair, fake)
            numeric = fd_params(pair.generator, lambda: g_loss(pair, fake))
        for (aw, ab), (nw, nb) in zip(analytic, numeric):
            for a, n in zip(aw.ravel(), nw.ravel()):
                worst = max(worst, rel(a, n))
            for a, n in zip(ab.ravel(), nb.ravel()):
                worst = max(worst, rel(a, n))
    elapsed = time.time() - t0
    ok = worst < 1e-5 and elapsed < 30.0
    report_line("gradient-correctness", ok, f"max rel err {worst:.2e}, {elapsed:.1f}s")
    assert worst < 1e-5
    assert elapsed < 30.0


# ---------------------------------------------------------------------------
# criterion: planner reduction


def trees_equal(a, b) -> bool:
    return (
        np.array_equal(a.points, b.points)
        and np.array_equal(a.parents, b.parents)
        and np.array_equal(a.costs, b.costs)
        and np.array_equal(a.gvals, b.gvals)
        and a.goal_indices == b.goal_indices
    )


def test_acceptance_planner_reduction():
    t0 = time.time()
    scenarios = generate_scenarios(20, 32, 32, 2, seed=77, resolution=0.1)
    pair = GanPair.initialize(3)
    checked = 0
    for s in scenarios:
        for seed in (1, 2, 3):
            cfg = PlannerConfig(max_iterations=400, seed=seed, cost_weight=0.0, discriminator_gate=0.0)
            if not trees_equal(plan_rrt_star(s, cfg).tree, plan_gan_rrt_star(s, pair, cfg).tree):
                report_line("planner-reduction", False, f"tree mismatch on {s.id} seed {seed}")
                pytest.fail(f"trees differ on {s.id} seed {seed}")
            checked += 1
    elapsed = time.time() - t0
    ok = elapsed < 120.0
    report_line("planner-reduction", ok, f"{checked} tree pairs bit-identical, {elapsed:.1f}s")
    assert elapsed < 120.0


# ---------------------------------------------------------------------------
# criterion: RRT* optimality sanity


def test_acceptance_rrt_star_optimality():
    t0 = time.time()
    grid = OccupancyGrid(60, 60, 0.1, np.zeros((60, 60), dtype=np.uint8))
    s = Scenario(id="empty6", grid=grid, pedestrians=(), start=(1.0, 1.0), goal=(5.0, 5.0), robot_radius=0.2)
    straight = math.dist(s.start, s.goal)
    good = 0
    for seed in range(20):
        result = plan_rrt_star(s, PlannerConfig(max_iterations=3000, seed=seed))
        if not result.success:
            continue
        length = sum(
            math.dist(result.path.points[i], result.path.points[i + 1])
            for i in range(len(result.path.points) - 1)
        )
        if length <= 1.05 * straight:
            good += 1
    elapsed = time.time() - t0
    ok = good >= 18 and elapsed < 60.0
    report_line("rrt-star-optimality", ok, f"{good}/20 within 5% of straight line, {elapsed:.1f}s")
    assert good >= 18
    assert elapsed < 60.0


# ---------------------------------------------------------------------------
# criterion: homotopy oracle agreement


BFS_INSTANCES = [
    # (rows top-down, start, goal, max path cells, handcrafted detours)
    (
        ["........", "........", "...##...", "...##...", "........", "........", "........", "........"],
        (1, 4), (6, 4), 12,
        [
            [(1, 4), (1, 6), (2, 6), (3, 6), (4, 6), (5, 6), (6, 6), (6, 4)],
            [(1, 4), (1, 2), (2, 2), (3, 2), (4, 2), (5, 2), (6, 2), (6, 4)],
        ],
    ),
    (
        ["........", "..#.....", "..#..#..", ".....#..", "........", "........", "........", "........"],
        (1, 5), (6, 5), 13,
        [
            [(1, 5), (1, 7), (2, 7), (3, 7), (4, 7), (5, 7), (6, 7), (6, 5)],
            [(1, 5), (1, 3), (2, 3), (3, 3), (4, 3), (5, 3), (6, 3), (6, 5)],
        ],
    ),
    (
        ["........", "........", "...##...", "..####..", "...##...", "........", "........", "........"],
        (1, 3), (6, 3), 13,
        [
            [(1, 3), (1, 6), (2, 6), (3, 6), (4, 6), (5, 6), (6, 6), (6, 3)],
            [(1, 3), (1, 1), (2, 1), (3, 1), (4, 1), (5, 1), (6, 1), (6, 3)],
        ],
    ),
    (
        [
            "............", "............", "............", "............", ".....##.....",
            "....####....", ".....##.....", "............", "....##......", "....##......",
            "............", "............",
        ],
        (2, 6), (9, 6), 13,
        [
            [(2, 6), (2, 8), (3, 8), (4, 8), (5, 8), (6, 8), (7, 8), (8, 8), (9, 8), (9, 6)],
            [(2, 6), (2, 4), (3, 4), (4, 4), (5, 4), (6, 4), (7, 4), (8, 4), (9, 4), (9, 6)],
        ],
    ),
    (
        [
            "..........", "..........", "....#.....", "....##....", "..........",
            "...##.....", "....#.....", "..........", "..........", "..........",
        ],
        (1, 5), (8, 5), 15,
        [
            [(1, 5), (1, 8), (2, 8), (3, 8), (4, 8), (5, 8), (6, 8), (7, 8), (8, 8), (8, 5)],
            [(1, 5), (1, 2), (2, 2), (3, 2), (4, 2), (5, 2), (6, 2), (7, 2), (8, 2), (8, 5)],
            [(1, 5), (2, 5), (3, 5), (4, 5), (5, 5), (6, 5), (7, 5), (8, 5)],
        ],
    ),
]


def _expand_handcrafted(cells):
    """Insert intermediate cells so consecutive entries are 4-adjacent."""
    out = [cells[0]]
    for nxt in cells[1:]:
        cur = out[-1]
        while cur != nxt:
            if cur[0] != nxt[0]:
                cur = (cur[0] + (1 if nxt[0] > cur[0] else -1), cur[1])
            else:
                cur = (cur[0], cur[1] + (1 if nxt[1] > cur[1] else -1))
            out.append(cur)
    return tuple(out)


def test_acceptance_homotopy_oracle_agreement():
    t0 = time.time()
    total_pairs = agree = 0
    cross_class_pairs = 0
    rng = np.random.default_rng(9091)
    for rows, start, goal, max_cells, handcrafted in BFS_INSTANCES:
        h = len(rows)
        w = len(rows[0])
        occ = np.zeros((h, w), dtype=np.uint8)
        for r, row in enumerate(rows):
            for c, ch in enumerate(row):
                occ[h - 1 - r, c] = 1 if ch == "#" else 0
        world = GridWorld(occ == 0)
        paths = [_expand_handcrafted(hc) for hc in handcrafted]
        tries = 0
        while len(paths) < 14 and tries < 20000:
            tries += 1
            p = random_grid_path(world, start, goal, rng, max_steps=30)
            if p is not None and len(p) <= max_cells:
                paths.append(p)
        assert len(paths) >= 12, "sampling failed to produce enough paths"
        labels = label_components(world, paths, slack=2)
        grid = OccupancyGrid(w, h, 1.0, occ)
        scenario = Scenario(
            id="bfs", grid=grid, pedestrians=(),
            start=grid.cell_center(*start), goal=grid.cell_center(*goal),
            goal_radius=0.3, robot_radius=0.0,
        )
        meter_paths = [
            Path("bfs", "demo_human", tuple(grid.cell_center(*c) for c in p)) for p in paths
        ]
        for i in range(len(paths)):
            for j in range(i + 1, len(paths)):
                verdict = metrics.same_homotopy(scenario, meter_paths[i], meter_paths[j])
                truth = labels[i] == labels[j]
                total_pairs += 1
                agree += verdict == truth
                cross_class_pairs += not truth
    elapsed = time.time() - t0
    ok = total_pairs >= 200 and agree == total_pairs and cross_class_pairs >= 20 and elapsed < 300.0
    report_line(
        "homotopy-oracle-agreement",
        ok,
        f"{agree}/{total_pairs} pairs agree ({cross_class_pairs} cross-class), {elapsed:.1f}s",
    )
    assert total_pairs >= 200
    assert cross_class_pairs >= 20, "instances must produce cross-class pairs"
    assert agree == total_pairs, f"{total_pairs - agree} disagreements with the deformation oracle"
    assert elapsed < 300.0


# ---------------------------------------------------------------------------
# criterion: metric identities


def test_acceptance_metric_identities():
    grid = OccupancyGrid(20, 20, 0.1, np.zeros((20, 20), dtype=np.uint8))
    s = Scenario(id="ident", grid=grid, pedestrians=(), start=(0.4, 0.4), goal=(1.6, 1.6), robot_radius=0.1)
    p = Path("ident", "demo_oracle", ((0.4, 0.4), (0.9, 1.2), (1.6, 1.6)))
    d0 = metrics.dissimilarity(p, p)
    f0 = metrics.feature_difference([s], [p], [p])
    h0 = metrics.homotopy_rate([s], [p], [p])
    ok = d0 == 0.0 and f0 == 0.0 and h0 == 1.0
    report_line("metric-identities", ok, f"dissimilarity {d0!r}, feature_difference {f0!r}, rate {h0!r}")
    assert d0 == 0.0
    assert f0 == 0.0
    assert h0 == 1.0


# ---------------------------------------------------------------------------
# criterion: end-to-end learning effect (scaled-down simulation protocol)


@pytest.fixture(scope="session")
def e2e():
    t0 = time.time()
    scenarios = generate_scenarios(
        CORPUS["count"], CORPUS["width"], CORPUS["height"], CORPUS["ped_count"],
        CORPUS["seed"], resolution=CORPUS["resolution"],
    )
    demos = [oracle_demo(s) for s in scenarios]
    train_s, train_d = scenarios[:75], demos[:75]
    test_s, test_d = scenarios[75:], demos[75:]

    pair = GanPair.initialize(derive_seed(TRAIN_CONFIG.seed, 7), lr_g=TRAIN_CONFIG.lr_g, lr_d=TRAIN_CONFIG.lr_d)
    pair, pre_info = pretrain(pair, train_s, train_d, TRAIN_CONFIG, ROLLOUT_PLANNER)
    best_pair, report = train(
        pair, train_s, train_d, test_s, test_d, TRAIN_CONFIG, ROLLOUT_PLANNER, pretrain_info=pre_info
    )

    extractors = {s.id: FeatureExtractor(s) for s in test_s}

    def evaluate(plan_fn):
        rates, dissims, fds = [], [], []
        failures = 0
        for seed in EVAL_SEEDS:
            hits, ds, fs = 0, [], []
            for s, d in zip(test_s, test_d):
                result = plan_fn(s, seed)
                if not result.success:
                    failures += 1
                    continue
                rep = metrics.metric_report(s, d, result.path)
                hits += rep.homotopic
                ds.append(rep.dissimilarity)
                fs.append(rep.feature_difference)
            rates.append(hits / len(test_s))
            dissims.append(float(np.mean(ds)))
            fds.append(float(np.mean(fs)))
        return {
            "homotopy_rate": float(np.mean(rates)),
            "mean_dissimilarity": float(np.mean(dissims)),
            "feature_difference": float(np.mean(fds)),
            "failures": failures,
        }

    gan = evaluate(
        lambda s, seed: plan_gan_rrt_star(
            s, best_pair, replace(EVAL_PLANNER, seed=seed), extractor=extractors[s.id]
        )
    )
    base = evaluate(lambda s, seed: plan_rrt_star(s, replace(EVAL_PLANNER, seed=seed)))
    elapsed = time.time() - t0
    return {
        "gan": gan,
        "rrt_star": base,
        "report": report,
        "elapsed": elapsed,
        "scenarios": scenarios,
        "demos": demos,
    }


def test_acceptance_end_to_end_homotopy_gap(e2e):
    gan, base = e2e["gan"], e2e["rrt_star"]
    gap = gan["homotopy_rate"] - base["homotopy_rate"]
    ok = gap >= 0.10
    report_line(
        "end-to-end-homotopy",
        ok,
        f"learned {gan['homotopy_rate']:.3f} vs baseline {base['homotopy_rate']:.3f} (gap {gap:+.3f}, need >= +0.10)",
    )
    assert gap >= 0.10


def test_acceptance_end_to_end_dissimilarity(e2e):
    gan, base = e2e["gan"], e2e["rrt_star"]
    ok = gan["mean_dissimilarity"] < base["mean_dissimilarity"]
    report_line(
        "end-to-end-dissimilarity",
        ok,
        f"learned {gan['mean_dissimilarity']:.4f} < baseline {base['mean_dissimilarity']:.4f}",
    )
    assert ok


def test_acceptance_end_to_end_feature_difference(e2e):
    gan, base = e2e["gan"], e2e["rrt_star"]
    ok = gan["feature_difference"] < base["feature_difference"]
    report_line(
        "end-to-end-feature-difference",
        ok,
        f"learned {gan['feature_difference']:.4f} < baseline {base['feature_difference']:.4f}",
    )
    assert ok


def test_acceptance_end_to_end_budget(e2e):
    ok = e2e["elapsed"] < 1800.0
    report_line("end-to-end-budget", ok, f"{e2e['elapsed']:.0f}s of 1800s")
    assert ok


def test_training_improves_over_pretrained_baseline(e2e):
    """Adversarial training should lift validation homotopy above the
    pretrained planner's rate.

    Known limitation: with demonstration and planned nodes both paired with
    the current generator's own cost, the discriminator can only separate the
    feature marginals, so the cost-channel gradient that reaches the
    generator carries no corrective signal; the best checkpoint tends to be
    the pretrained one. Kept faithful to the stated expectation rather than
    weakened; see the decisions ledger.
    """
    report = e2e["report"]
    ok = report.best_val_homotopy > report.baseline_val_homotopy
    report_line(
        "training-improvement",
        ok,
        f"best {report.best_val_homotopy:.3f} vs pretrained {report.baseline_val_homotopy:.3f}",
    )
    assert ok


# ---------------------------------------------------------------------------
# criterion: determinism (pipeline run twice, byte-identical report)


def test_acceptance_pipeline_determinism(tmp_path):
    from socialplan.cli import main

    t0 = time.time()
    cfg = {
        "scenario": {"resolution": 0.1},
        "planner": {"max_iterations": 400, "near_radius": 0.6},
        "train": {
            "epochs_max": 2,
            "repetitions": 1,
            "minibatch": 32,
            "pretrain_samples": 400,
            "patience": 2,
        },
    }
    cfg_file = tmp_path / "config.json"
    cfg_file.write_text(json.dumps(cfg))
    reports = []
    for run in ("a", "b"):
        base = tmp_path / run
        scen, demo, model, plans = base / "scen", base / "demo", base / "model", base / "plans"
        rep = base / "report.json"
        assert main(["gen", "--config", str(cfg_file), "--seed", "3", "--count", "20", "--width", "32",
                     "--height", "32", "--peds", "2", "--out", str(scen)]) == 0
        assert main(["demo", "--config", str(cfg_file), "--scenarios", str(scen), "--mode", "oracle",
                     "--out", str(demo)]) == 0
        assert main(["train", "--config", str(cfg_file), "--seed", "7", "--scenarios", str(scen),
                     "--demos", str(demo), "--split", "75:25", "--out", str(model)]) == 0
        plans.mkdir(parents=True)
        for f in sorted(scen.glob("*.json")):
            assert main(["plan", "--config", str(cfg_file), "--seed", "11", "--scenario", str(f),
                         "--planner", "ganrrtstar", "--model", str(model / "best.json"),
                         "--out", str(plans / f.name)]) == 0
        assert main(["eval", "--config", str(cfg_file), "--scenarios", str(scen), "--demos", str(demo),
                     "--plans", str(plans), "--out", str(rep)]) == 0
        reports.append(rep.read_bytes())
        # training artifacts must match too
        reports.append((model / "train_report.json").read_bytes())
    elapsed = time.time() - t0
    ok = reports[0] == reports[2] and reports[1] == reports[3]
    report_line(
        "pipeline-determinism",
        ok and elapsed < 1800.0,
        f"two full gen->demo->train->plan->eval runs byte-identical, {elapsed:.0f}s",
    )
    assert reports[0] == reports[2], "evaluation reports differ between identical runs"
    assert reports[1] == reports[3], "training reports differ between identical runs"
