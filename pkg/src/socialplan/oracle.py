"""Ground-truth social demonstrator.

Grid search under a handcrafted social cost produces demonstration paths for
training and evaluation; it plays the role of a human driving the robot. The
cost shape is deliberately different from the generator's functional form so
learning has a real representation gap to bridge.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .features import DEFAULT_FEATURES, FeatureConfig, build_distance_field, features_at
from .geometry import Point, dist
from .scenario import Path, Scenario, segment_clear, traversal_blocked_mask


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleConfig:
    w_clearance: float = 2.0
    w_pedestrian: float = 5.0
    connectivity: int = 8

    def __post_init__(self):
        if self.w_clearance < 0.0 or self.w_pedestrian < 0.0:
            raise ValueError("oracle weights must be non-negative")
        if self.connectivity != 8:
            raise ValueError("only 8-connectivity is supported")

    def to_dict(self) -> dict:
        return {
            "w_clearance": self.w_clearance,
            "w_pedestrian": self.w_pedestrian,
            "connectivity": self.connectivity,
        }


DEFAULT_ORACLE = OracleConfig()


def social_weight_grid(
    scenario: Scenario,
    config: OracleConfig = DEFAULT_ORACLE,
    feature_config: FeatureConfig = DEFAULT_FEATURES,
) -> np.ndarray:
    """Per-cell multiplier 1 + w_c*(1-f2) + w_p*(f3+f4+f5) on cell centers."""
    grid = scenario.grid
    field = build_distance_field(grid)
    xs = (np.arange(grid.width) + 0.5) * grid.resolution
    ys = (np.arange(grid.height) + 0.5) * grid.resolution
    pts = np.stack(
        [np.tile(xs, grid.height), np.repeat(ys, grid.width)],
        axis=1,
    )
    feats = features_at(scenario, field, pts, feature_config)
    w = 1.0 + config.w_clearance * (1.0 - feats[:, 1]) + config.w_pedestrian * feats[:, 2:5].sum(axis=1)
    return w.reshape(grid.height, grid.width)


def dijkstra_grid_path(
    scenario: Scenario,
    config: OracleConfig = DEFAULT_ORACLE,
    feature_config: FeatureConfig = DEFAULT_FEATURES,
) -> tuple[list[tuple[int, int]], float]:
    """Socially weighted Dijkstra over open cells, 8-connected.

    Returns (cells from start to a goal-region cell, path cost). Edge cost is
    step length times the target cell's social weight; diagonal steps need
    both orthogonal side cells open so every move survives segment checks.
    Ties pop in row-major cell order.
    """
    grid = scenario.grid
    res = grid.resolution
    w, h = grid.width, grid.height
    open_mask = ~traversal_blocked_mask(grid, scenario.robot_radius)
    weight = social_weight_grid(scenario, config, feature_config)

    six, siy = grid.cell_of(scenario.start)
    start_idx = siy * w + six
    if not open_mask[siy, six]:
        raise OracleError(f"scenario {scenario.id}: start cell is blocked")

    # goal region = open cells whose centers lie inside the goal disk
    xs = (np.arange(w) + 0.5) * res
    ys = (np.arange(h) + 0.5) * res
    in_goal = (
        (xs[None, :] - scenario.goal[0]) ** 2 + (ys[:, None] - scenario.goal[1]) ** 2
    ) <= scenario.goal_radius**2
    goal_cells = set(np.flatnonzero((in_goal & open_mask).ravel()).tolist())
    if not goal_cells:
        raise OracleError(f"scenario {scenario.id}: no open cell inside the goal region")

    open_flat = open_mask.ravel()
    weight_flat = weight.ravel()
    diag = math.sqrt(2.0) * res
    dist_arr = np.full(w * h, np.inf)
    dist_arr[start_idx] = 0.0
    prev = np.full(w * h, -1, dtype=np.int64)
    heap = [(0.0, start_idx)]
    found = -1
    while heap:
        d, idx = heapq.heappop(heap)
        if d > dist_arr[idx]:
            continue
        if idx in goal_cells:
            found = idx
            break
        ix, iy = idx % w, idx // w
        for ddx, ddy in ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)):
            jx, jy = ix + ddx, iy + ddy
            if not (0 <= jx < w and 0 <= jy < h):
                continue
            jdx = jy * w + jx
            if not open_flat[jdx]:
                continue
            if ddx != 0 and ddy != 0:
                if not (open_flat[iy * w + jx] and open_flat[jy * w + ix]):
                    continue
                step = diag
            else:
                step = res
            nd = d + step * weight_flat[jdx]
            if nd < dist_arr[jdx]:
                dist_arr[jdx] = nd
                prev[jdx] = idx
                heapq.heappush(heap, (nd, jdx))
    if found == -1:
        raise OracleError(f"scenario {scenario.id}: goal region unreachable")
    cells = []
    idx = found
    while idx != -1:
        cells.append((idx % w, idx // w))
        idx = int(prev[idx])
    cells.reverse()
    return cells, float(dist_arr[found])


def path_social_cost(
    scenario: Scenario,
    points: np.ndarray,
    weight: np.ndarray,
) -> float:
    """Approximate integral of the social weight along a polyline, sampled at
    half-cell spacing."""
    grid = scenario.grid
    res = grid.resolution
    total = 0.0
    pts = np.asarray(points, dtype=float)
    for a, b in zip(pts[:-1], pts[1:]):
        seg_len = math.hypot(b[0] - a[0], b[1] - a[1])
        if seg_len == 0.0:
            continue
        n = max(1, int(math.ceil(seg_len / (0.5 * res))))
        ts = (np.arange(n) + 0.5) / n
        sx = a[0] + ts * (b[0] - a[0])
        sy = a[1] + ts * (b[1] - a[1])
        ix = np.clip((sx / res).astype(int), 0, grid.width - 1)
        iy = np.clip((sy / res).astype(int), 0, grid.height - 1)
        total += float(seg_len / n * weight[iy, ix].sum())
    return total


def _shortcut(
    scenario: Scenario,
    points: list[Point],
    weight: np.ndarray,
) -> list[Point]:
    """Greedy shortcutting: jump to the farthest waypoint that keeps the
    segment collision-free and does not increase the social integral."""
    grid = scenario.grid
    r = scenario.robot_radius
    prefix = [0.0]
    for a, b in zip(points[:-1], points[1:]):
        prefix.append(prefix[-1] + path_social_cost(scenario, np.asarray([a, b]), weight))
    out = [points[0]]
    i = 0
    while i < len(points) - 1:
        best = i + 1
        for j in range(len(points) - 1, i + 1, -1):
            if not segment_clear(grid, r, points[i], points[j]):
                continue
            direct = path_social_cost(scenario, np.asarray([points[i], points[j]]), weight)
            if direct <= prefix[j] - prefix[i] + 1e-9:
                best = j
                break
        out.append(points[best])
        i = best
    return out


def oracle_demo(
    scenario: Scenario,
    config: OracleConfig = DEFAULT_ORACLE,
    feature_config: FeatureConfig = DEFAULT_FEATURES,
) -> Path:
    """Demonstration path: social Dijkstra, converted to meters and
    shortcut-smoothed. Deterministic for a fixed scenario and config."""
    cells, _ = dijkstra_grid_path(scenario, config, feature_config)
    pts: list[Point] = [scenario.start]
    first_center = scenario.grid.cell_center(*cells[0])
    if first_center != scenario.start:
        pts.append(first_center)  # stay inside the start cell before stepping out
    pts.extend(scenario.grid.cell_center(ix, iy) for ix, iy in cells[1:])
    if len(pts) < 2:
        pts.append(pts[0])
    weight = social_weight_grid(scenario, config, feature_config)
    smoothed = _shortcut(scenario, pts, weight)
    if len(smoothed) < 2:
        smoothed = smoothed + [smoothed[0]]
    return Path(scenario_id=scenario.id, source="demo_oracle", points=tuple(smoothed))
