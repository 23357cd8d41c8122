"""Evaluation suite: path homotopy via crossing words, area dissimilarity,
and aggregated feature differences between demonstration and planned paths.

Homotopy classes are decided with reduced words of signed ray crossings: each
obstacle (occupied-cell component or pedestrian disk) casts a vertical ray
upward from a representative interior point; a path's word lists the signed
transversal crossings in path order, with adjacent inverse pairs cancelled.
Two paths sharing endpoints are homotopic iff their reduced words match.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .features import DEFAULT_FEATURES, FeatureConfig, FeatureExtractor
from .geometry import dist, point_polyline_distance, polyline_length, resample_count, resample_spacing
from .scenario import Path, Scenario

_LABEL_4CONN = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=int)


class EndpointMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class HSignature:
    word: tuple[int, ...]

    def __str__(self) -> str:
        return "<" + ",".join(f"{s:+d}" for s in self.word) + ">"


def _reduce(word: list[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for sym in word:
        if stack and stack[-1] == -sym:
            stack.pop()
        else:
            stack.append(sym)
    return tuple(stack)


def obstacle_representatives(scenario: Scenario, include_pedestrians: bool = True) -> list[tuple[float, float]]:
    """Representative interior points: one per 4-connected occupied component
    (the deepest cell, scanline ties), then pedestrian centers; components in
    scanline order of their representatives, pedestrians likewise."""
    grid = scenario.grid
    occ = grid.cells.astype(bool)
    reps: list[tuple[float, float]] = []
    if occ.any():
        labels, n_comp = ndimage.label(occ, structure=_LABEL_4CONN)
        comp_reps = []
        for comp in range(1, n_comp + 1):
            mask = labels == comp
            depth = ndimage.distance_transform_edt(mask)
            flat = int(np.argmax(depth))  # row-major argmax = scanline tie-break
            iy, ix = divmod(flat, grid.width)
            comp_reps.append(grid.cell_center(ix, iy))
        comp_reps.sort(key=lambda p: (p[1], p[0]))
        reps.extend(comp_reps)
    if include_pedestrians:
        ped_reps = sorted(((p.x, p.y) for p in scenario.pedestrians), key=lambda p: (p[1], p[0]))
        reps.extend(ped_reps)
    return reps


def _ray_crossing_events(points: np.ndarray, rx: float, ry: float, obstacle_id: int):
    """Signed crossings of the upward ray at (rx, ry) by the path.

    A vertex belongs to its outgoing segment: runs of vertices exactly on the
    ray count once, at the last on-ray vertex, and touches that return to the
    same side contribute nothing. Yields (order_key, tie_key, signed id).
    """
    xs = points[:, 0]
    ys = points[:, 1]
    sides = np.sign(xs - rx)
    events = []
    last_strict = None  # (index, side)
    for i, s in enumerate(sides):
        if s == 0.0:
            continue
        if last_strict is not None and last_strict[1] != s:
            j0 = last_strict[0]
            if i == j0 + 1:
                t = (rx - xs[j0]) / (xs[i] - xs[j0])
                y_cross = ys[j0] + t * (ys[i] - ys[j0])
                order = j0 + float(t)
            else:
                y_cross = ys[i - 1]  # last on-ray vertex completes the crossing
                order = float(i - 1)
            if y_cross >= ry:
                sign = 1 if s > 0 else -1
                # simultaneous crossings order as if ray k sat at rx + k*eps
                tie = obstacle_id if sign > 0 else -obstacle_id
                events.append((order, tie, sign * obstacle_id))
        last_strict = (i, s)
    return events


def h_signature(scenario: Scenario, path: Path, *, include_pedestrians: bool = True) -> HSignature:
    """Reduced crossing word of the path against the scenario's obstacles."""
    pts = path.as_array()
    grid = scenario.grid
    for i, (x, y) in enumerate(pts):
        if not (0.0 <= x < grid.width_m and 0.0 <= y < grid.height_m):
            raise ValueError(f"points[{i}]: path leaves the map bounds")
    events = []
    for k, (rx, ry) in enumerate(obstacle_representatives(scenario, include_pedestrians), start=1):
        events.extend(_ray_crossing_events(pts, rx, ry, k))
    events.sort(key=lambda e: (e[0], e[1]))
    return HSignature(_reduce([e[2] for e in events]))


def same_homotopy(
    scenario: Scenario,
    path_a: Path,
    path_b: Path,
    *,
    include_pedestrians: bool = True,
) -> bool:
    """True iff the two paths can be deformed into each other without
    crossing obstacles. Both must share the start and the goal region."""
    if dist(path_a.points[0], path_b.points[0]) > scenario.goal_radius:
        raise EndpointMismatchError("start points differ by more than goal_radius")
    if dist(path_a.points[-1], path_b.points[-1]) > 2.0 * scenario.goal_radius:
        raise EndpointMismatchError("end points differ by more than the goal region allows")
    sig_a = h_signature(scenario, path_a, include_pedestrians=include_pedestrians)
    sig_b = h_signature(scenario, path_b, include_pedestrians=include_pedestrians)
    return sig_a == sig_b


# ---------------------------------------------------------------------------
# dissimilarity (enclosed-area style distance)

DISSIMILARITY_SAMPLES = 100


def _one_sided_dissimilarity(pts1: np.ndarray, pts2: np.ndarray) -> float:
    n = len(pts1)
    d = np.array([point_polyline_distance((p[0], p[1]), pts2) for p in pts1])
    seg = np.hypot(np.diff(pts1[:, 0]), np.diff(pts1[:, 1]))
    trapezoids = 0.5 * (d[:-1] + d[1:]) * seg
    return float(trapezoids.sum() / (n - 1))


def dissimilarity(path_1: Path, path_2: Path, *, symmetric: bool = False) -> float:
    """Trapezoidal area between two paths, normalized by the number of
    resampled segments of the first path. Both paths are resampled to 100
    arc-length-uniform points, so identical paths give exactly zero."""
    pts1 = resample_count(path_1.as_array(), DISSIMILARITY_SAMPLES)
    pts2 = resample_count(path_2.as_array(), DISSIMILARITY_SAMPLES)
    out = _one_sided_dissimilarity(pts1, pts2)
    if symmetric:
        out = 0.5 * (out + _one_sided_dissimilarity(pts2, pts1))
    return out


# ---------------------------------------------------------------------------
# feature difference

FEATURE_SPACING = 0.2


def path_feature_means(
    scenario: Scenario,
    path: Path,
    *,
    feature_config: FeatureConfig = DEFAULT_FEATURES,
    spacing: float = FEATURE_SPACING,
    extractor: FeatureExtractor | None = None,
) -> np.ndarray:
    """Mean of each feature over the path resampled at fixed spacing."""
    if extractor is None:
        extractor = FeatureExtractor(scenario, feature_config)
    pts = resample_spacing(path.as_array(), spacing)
    return extractor.batch(pts).mean(axis=0)


def feature_difference(
    scenarios: list[Scenario],
    demo_paths: list[Path],
    plan_paths: list[Path],
    *,
    feature_config: FeatureConfig = DEFAULT_FEATURES,
    spacing: float = FEATURE_SPACING,
) -> float:
    """Mean absolute difference of path-aggregated features across scenarios,
    averaged over the five features."""
    if not (len(scenarios) == len(demo_paths) == len(plan_paths)):
        raise ValueError("one demo and one plan path per scenario required")
    total = 0.0
    for scenario, demo, plan in zip(scenarios, demo_paths, plan_paths):
        if demo.scenario_id != scenario.id or plan.scenario_id != scenario.id:
            raise ValueError(f"path does not belong to scenario {scenario.id!r}")
        extractor = FeatureExtractor(scenario, feature_config)
        demo_means = path_feature_means(scenario, demo, extractor=extractor, spacing=spacing)
        plan_means = path_feature_means(scenario, plan, extractor=extractor, spacing=spacing)
        total += float(np.abs(demo_means - plan_means).sum())
    return total / (5.0 * len(scenarios))


def homotopy_rate(
    scenarios: list[Scenario],
    demo_paths: list[Path],
    plan_paths: list[Path],
    *,
    include_pedestrians: bool = True,
) -> float:
    """Fraction of scenarios whose planned path shares the demo's class."""
    if not (len(scenarios) == len(demo_paths) == len(plan_paths)):
        raise ValueError("one demo and one plan path per scenario required")
    hits = sum(
        1
        for scenario, demo, plan in zip(scenarios, demo_paths, plan_paths)
        if same_homotopy(scenario, demo, plan, include_pedestrians=include_pedestrians)
    )
    return hits / len(scenarios)


# ---------------------------------------------------------------------------
# per-scenario reports


@dataclass(frozen=True)
class MetricReport:
    scenario_id: str
    dissimilarity: float
    feature_difference: float
    homotopic: bool
    path_length_demo: float
    path_length_plan: float

    def to_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "dissimilarity": self.dissimilarity,
            "feature_difference": self.feature_difference,
            "homotopic": self.homotopic,
            "path_length_demo": self.path_length_demo,
            "path_length_plan": self.path_length_plan,
        }


def metric_report(
    scenario: Scenario,
    demo: Path,
    plan: Path,
    *,
    feature_config: FeatureConfig = DEFAULT_FEATURES,
    include_pedestrians: bool = True,
) -> MetricReport:
    return MetricReport(
        scenario_id=scenario.id,
        dissimilarity=dissimilarity(plan, demo),
        feature_difference=feature_difference([scenario], [demo], [plan], feature_config=feature_config),
        homotopic=same_homotopy(scenario, demo, plan, include_pedestrians=include_pedestrians),
        path_length_demo=polyline_length(demo.as_array()),
        path_length_plan=polyline_length(plan.as_array()),
    )


def aggregate_reports(reports: list[MetricReport]) -> dict:
    if not reports:
        return {"homotopy_rate": 0.0, "mean_dissimilarity": 0.0, "feature_difference": 0.0, "count": 0}
    return {
        "homotopy_rate": sum(1 for r in reports if r.homotopic) / len(reports),
        "mean_dissimilarity": sum(r.dissimilarity for r in reports) / len(reports),
        "feature_difference": sum(r.feature_difference for r in reports) / len(reports),
        "count": len(reports),
    }
