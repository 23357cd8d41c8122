"""Adversarial training loop that fits the generator so planned paths match
demonstration paths.

Each epoch replans every training scenario with the current generator,
collects node features from the solution paths and from the demonstrations,
updates the discriminator to separate them and the generator to confuse it,
then scores the validation scenarios. The best-validation parameters are
checkpointed and returned.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .features import DEFAULT_FEATURES, FeatureConfig, FeatureExtractor
from .metrics import dissimilarity, same_homotopy
from .planner import PlannerConfig, plan_gan_rrt_star
from .scenario import Path, Scenario, is_free
from .tinynet import GanPair, d_loss_grads, g_loss_grads


class TrainingAborted(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    epochs_max: int = 200
    repetitions: int = 3
    minibatch: int = 64
    lr_g: float = 1e-3
    lr_d: float = 1e-3
    d_steps_per_g_step: int = 1
    pretrain_samples: int = 5000
    patience: int = 5
    resample_spacing: float = 0.2
    seed: int = 0

    def __post_init__(self):
        for name in ("epochs_max", "repetitions", "minibatch", "d_steps_per_g_step", "pretrain_samples"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if not (self.lr_g > 0.0 and self.lr_d > 0.0 and self.resample_spacing > 0.0):
            raise ValueError("learning rates and resample_spacing must be positive")

    def to_dict(self) -> dict:
        return {
            "epochs_max": self.epochs_max,
            "repetitions": self.repetitions,
            "minibatch": self.minibatch,
            "lr_g": self.lr_g,
            "lr_d": self.lr_d,
            "d_steps_per_g_step": self.d_steps_per_g_step,
            "pretrain_samples": self.pretrain_samples,
            "patience": self.patience,
            "resample_spacing": self.resample_spacing,
            "seed": self.seed,
        }


@dataclass
class EpochRow:
    epoch: int
    d_loss: float
    g_loss: float
    train_homotopy: float
    val_homotopy: float
    val_dissimilarity: float
    failed_scenarios: int

    def to_dict(self) -> dict:
        return {
            "epoch": self.epoch,
            "d_loss": self.d_loss,
            "g_loss": self.g_loss,
            "train_homotopy": self.train_homotopy,
            "val_homotopy": self.val_homotopy,
            "val_dissimilarity": self.val_dissimilarity,
            "failed_scenarios": self.failed_scenarios,
        }


@dataclass
class TrainReport:
    rows: list[EpochRow] = field(default_factory=list)
    stopping_epoch: int = 0
    stopping_reason: str = ""
    best_epoch: int = 0
    best_val_homotopy: float = 0.0
    baseline_val_homotopy: float = 0.0
    pretrain_mse: float = math.nan
    pretrain_warning: bool = False

    def to_dict(self) -> dict:
        return {
            "rows": [r.to_dict() for r in self.rows],
            "stopping_epoch": self.stopping_epoch,
            "stopping_reason": self.stopping_reason,
            "best_epoch": self.best_epoch,
            "best_val_homotopy": self.best_val_homotopy,
            "baseline_val_homotopy": self.baseline_val_homotopy,
            "pretrain_mse": self.pretrain_mse,
            "pretrain_warning": self.pretrain_warning,
        }

    def save_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, separators=(",", ":"))
            fh.write("\n")

    def save_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(
                fh,
                fieldnames=[
                    "epoch",
                    "d_loss",
                    "g_loss",
                    "train_homotopy",
                    "val_homotopy",
                    "val_dissimilarity",
                    "failed_scenarios",
                ],
            )
            writer.writeheader()
            for row in self.rows:
                writer.writerow(row.to_dict())


def derive_seed(*parts: int) -> int:
    """Deterministic child seed from integer parts."""
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


def pretrain_target(features: np.ndarray) -> np.ndarray:
    """Handcrafted prior the generator is regressed toward before the
    adversarial game starts: goal distance, lost clearance and pedestrian
    zones each contribute a fifth."""
    f = np.asarray(features, dtype=float)
    raw = 0.2 * f[:, 0] + 0.2 * (1.0 - f[:, 1]) + 0.2 * (f[:, 2] + f[:, 3] + f[:, 4])
    return np.clip(raw, 0.0, 1.0)


def sample_free_points(scenario: Scenario, count: int, rng: np.random.Generator) -> np.ndarray:
    pts = np.empty((count, 2))
    grid = scenario.grid
    for i in range(count):
        for _ in range(10000):
            cand = (rng.random() * grid.width_m, rng.random() * grid.height_m)
            if is_free(grid, scenario.robot_radius, cand):
                pts[i] = cand
                break
        else:
            raise TrainingAborted(f"scenario {scenario.id}: cannot sample free points")
    return pts


def collect_nodes(
    path: Path,
    scenario: Scenario,
    spacing: float,
    *,
    extractor: FeatureExtractor | None = None,
    feature_config: FeatureConfig = DEFAULT_FEATURES,
) -> np.ndarray:
    """Feature rows of the path resampled at fixed spacing. Demonstration and
    planned paths go through the same resampling so the discriminator cannot
    key on vertex density."""
    from .geometry import resample_spacing as _resample

    if extractor is None:
        extractor = FeatureExtractor(scenario, feature_config)
    pts = _resample(path.as_array(), spacing)
    return extractor.batch(pts)


def _minibatches(n: int, size: int, rng: np.random.Generator):
    order = rng.permutation(n)
    for i in range(0, n, size):
        chunk = order[i : i + size]
        if len(chunk) > 0:
            yield chunk


def pretrain(
    pair: GanPair,
    scenarios: list[Scenario],
    demos: list[Path],
    config: TrainConfig,
    planner_config: PlannerConfig,
    *,
    feature_config: FeatureConfig = DEFAULT_FEATURES,
    max_passes: int = 200,
    mse_stop: float = 1e-3,
    regression_lr: float = 0.2,
) -> tuple[GanPair, dict]:
    """Regress the generator toward the handcrafted prior, then give the
    discriminator one epoch of demo-vs-planned batches under the result.

    The supervised regression runs on its own optimizer (the adversarial
    learning rate is far too small for it); the pair's optimizers keep their
    pristine state for the adversarial phase.
    """
    rng = np.random.default_rng(derive_seed(config.seed, 101))
    extractors = [FeatureExtractor(s, feature_config) for s in scenarios]
    per_scenario = np.sort(rng.integers(0, len(scenarios), size=config.pretrain_samples))
    rows = []
    for i, scenario in enumerate(scenarios):
        count = int(np.sum(per_scenario == i))
        if count == 0:
            continue
        pts = sample_free_points(scenario, count, rng)
        rows.append(extractors[i].batch(pts))
    feats = np.vstack(rows)
    targets = pretrain_target(feats)

    from .tinynet import SgdMomentum

    reg_opt = SgdMomentum(pair.generator, regression_lr, 0.9)
    mse = math.inf
    for _ in range(max_passes):
        for chunk in _minibatches(len(feats), config.minibatch, rng):
            x = feats[chunk]
            t = targets[chunk]
            cache = pair.generator.forward_cached(x)
            y = cache[0][-1][:, 0]
            grad = (2.0 * (y - t) / len(chunk))[:, None]
            grads, _ = pair.generator.backward(cache, grad)
            reg_opt.step(grads)
        y_all = pair.generator.forward(feats)[:, 0]
        mse = float(np.mean((y_all - targets) ** 2))
        if mse < mse_stop:
            break
    warning = mse > 1e-2

    # one discriminator epoch on demo vs planned nodes under the fresh generator
    real_rows, fake_rows = [], []
    for i, (scenario, demo) in enumerate(zip(scenarios, demos)):
        seed = derive_seed(config.seed, 202, i)
        result = plan_gan_rrt_star(
            scenario,
            pair,
            replace(planner_config, seed=seed),
            extractor=extractors[i],
        )
        real_rows.append(collect_nodes(demo, scenario, config.resample_spacing, extractor=extractors[i]))
        if result.success:
            fake_rows.append(
                collect_nodes(result.path, scenario, config.resample_spacing, extractor=extractors[i])
            )
    if fake_rows:
        real = np.vstack(real_rows)
        fake = np.vstack(fake_rows)
        for chunk in _minibatches(len(fake), config.minibatch, rng):
            ridx = rng.integers(0, len(real), size=len(chunk))
            _, grads = d_loss_grads(pair, real[ridx], fake[chunk])
            pair.d_opt.step(grads)
    return pair, {"pretrain_mse": mse, "pretrain_warning": warning}


def _validate(
    pair: GanPair,
    val_scenarios: list[Scenario],
    val_demos: list[Path],
    config: TrainConfig,
    planner_config: PlannerConfig,
    extractors: list[FeatureExtractor],
) -> tuple[float, float]:
    """Fixed-seed validation pass: (homotopy rate, mean dissimilarity)."""
    hits = 0
    dissims = []
    for j, (scenario, demo) in enumerate(zip(val_scenarios, val_demos)):
        seed = derive_seed(config.seed, 303, j)
        result = plan_gan_rrt_star(scenario, pair, replace(planner_config, seed=seed), extractor=extractors[j])
        if not result.success:
            continue
        if same_homotopy(scenario, demo, result.path):
            hits += 1
        dissims.append(dissimilarity(result.path, demo))
    rate = hits / len(val_scenarios) if val_scenarios else 0.0
    mean_dissim = float(np.mean(dissims)) if dissims else math.inf
    return rate, mean_dissim


def train(
    pair: GanPair,
    train_scenarios: list[Scenario],
    demo_paths: list[Path],
    val_scenarios: list[Scenario],
    val_demos: list[Path],
    config: TrainConfig,
    planner_config: PlannerConfig,
    *,
    feature_config: FeatureConfig = DEFAULT_FEATURES,
    pretrain_info: dict | None = None,
    on_epoch=None,
    should_stop=None,
    collect_tree_nodes: bool = False,
    accumulate_rollouts: bool = False,
) -> tuple[GanPair, TrainReport]:
    """Alternating rollout / adversarial-update loop with validation-based
    early stopping. Returns the checkpoint from the best validation epoch
    (the pretrained parameters count as the epoch-0 baseline).

    Ablations: collect_tree_nodes draws planned-node features from the whole
    tree instead of the solution path; accumulate_rollouts keeps the node
    pools growing across epochs instead of resetting the game each epoch.
    """
    if len(train_scenarios) != len(demo_paths):
        raise ValueError("one demo path per training scenario required")
    if len(val_scenarios) != len(val_demos):
        raise ValueError("one demo path per validation scenario required")
    report = TrainReport()
    if pretrain_info:
        report.pretrain_mse = pretrain_info.get("pretrain_mse", math.nan)
        report.pretrain_warning = bool(pretrain_info.get("pretrain_warning", False))

    extractors = [FeatureExtractor(s, feature_config) for s in train_scenarios]
    val_extractors = [FeatureExtractor(s, feature_config) for s in val_scenarios]
    demo_feats = [
        collect_nodes(demo, scenario, config.resample_spacing, extractor=ext)
        for scenario, demo, ext in zip(train_scenarios, demo_paths, extractors)
    ]

    baseline_rate, _ = _validate(pair, val_scenarios, val_demos, config, planner_config, val_extractors)
    report.baseline_val_homotopy = baseline_rate
    best_pair = pair.copy()
    best_rate = baseline_rate
    best_epoch = 0
    no_improve = 0
    update_rng = np.random.default_rng(derive_seed(config.seed, 404))

    stop_reason = "epochs_max"
    epoch = 0
    kept_fake: list[np.ndarray] = []
    kept_real: list[np.ndarray] = []
    kept_demo_ids: set[int] = set()
    for epoch in range(1, config.epochs_max + 1):
        if should_stop is not None and should_stop():
            stop_reason = "cancelled"
            epoch -= 1
            break
        fake_rows = kept_fake if accumulate_rollouts else []
        real_rows = kept_real if accumulate_rollouts else []
        rollouts = 0
        homotopic_rollouts = 0
        failed_scenarios = 0
        for i, (scenario, demo) in enumerate(zip(train_scenarios, demo_paths)):
            scenario_rows = []
            for rep in range(config.repetitions):
                seed = derive_seed(config.seed, 1, epoch, i, rep)
                result = plan_gan_rrt_star(scenario, pair, replace(planner_config, seed=seed), extractor=extractors[i])
                if not result.success:
                    continue
                rollouts += 1
                if same_homotopy(scenario, demo, result.path):
                    homotopic_rollouts += 1
                if collect_tree_nodes:
                    scenario_rows.append(extractors[i].batch(result.tree.points))
                else:
                    scenario_rows.append(
                        collect_nodes(result.path, scenario, config.resample_spacing, extractor=extractors[i])
                    )
            if not scenario_rows:
                failed_scenarios += 1
                continue
            fake_rows.extend(scenario_rows)
            if not accumulate_rollouts:
                real_rows.append(demo_feats[i])
            elif i not in kept_demo_ids:  # union semantics: one demo copy total
                kept_demo_ids.add(i)
                real_rows.append(demo_feats[i])
        if failed_scenarios > len(train_scenarios) // 2:
            raise TrainingAborted(
                f"epoch {epoch}: planner failed on {failed_scenarios}/{len(train_scenarios)} scenarios"
            )
        fake = np.vstack(fake_rows)
        real = np.vstack(real_rows)

        d_losses = []
        for _ in range(config.d_steps_per_g_step):
            for chunk in _minibatches(len(fake), config.minibatch, update_rng):
                ridx = update_rng.integers(0, len(real), size=len(chunk))
                loss, grads = d_loss_grads(pair, real[ridx], fake[chunk])
                pair.d_opt.step(grads)
                d_losses.append(loss)
        g_losses = []
        for chunk in _minibatches(len(fake), config.minibatch, update_rng):
            loss, grads = g_loss_grads(pair, fake[chunk])
            pair.g_opt.step(grads)
            g_losses.append(loss)

        val_rate, val_dissim = _validate(pair, val_scenarios, val_demos, config, planner_config, val_extractors)
        row = EpochRow(
            epoch=epoch,
            d_loss=float(np.mean(d_losses)) if d_losses else math.nan,
            g_loss=float(np.mean(g_losses)) if g_losses else math.nan,
            train_homotopy=homotopic_rollouts / rollouts if rollouts else 0.0,
            val_homotopy=val_rate,
            val_dissimilarity=val_dissim,
            failed_scenarios=failed_scenarios,
        )
        report.rows.append(row)
        if on_epoch is not None:
            on_epoch(row)

        if val_rate > best_rate:
            best_rate = val_rate
            best_pair = pair.copy()
            best_epoch = epoch
            no_improve = 0
        else:
            no_improve += 1
            if no_improve >= config.patience:
                stop_reason = "patience"
                break

    report.stopping_epoch = epoch
    report.stopping_reason = stop_reason
    report.best_epoch = best_epoch
    report.best_val_homotopy = best_rate
    return best_pair, report
