"""Socially aware node features.

Five values describe the interaction state of a point in a scenario: distance
to goal, clearance to the nearest obstacle, and three direction-dependent
pedestrian proximity costs (front, back, right side), each normalized to
[0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .geometry import Point
from .scenario import OccupancyGrid, Scenario, distance_to_occupied


class FeatureVector(NamedTuple):
    f1: float  # distance to goal / map diagonal
    f2: float  # clearance to nearest obstacle, clamped and normalized
    f3: float  # pedestrian front-zone cost
    f4: float  # pedestrian back-zone cost
    f5: float  # pedestrian right-side cost


@dataclass(frozen=True)
class FeatureConfig:
    sigma_front: float = 1.2
    sigma_back: float = 0.6
    sigma_side: float = 0.45
    sigma_side_lon: float = 0.9
    d_clamp: float = 2.0
    lateral_symmetric: bool = False

    def to_dict(self) -> dict:
        return {
            "sigma_front": self.sigma_front,
            "sigma_back": self.sigma_back,
            "sigma_side": self.sigma_side,
            "sigma_side_lon": self.sigma_side_lon,
            "d_clamp": self.d_clamp,
            "lateral_symmetric": self.lateral_symmetric,
        }


DEFAULT_FEATURES = FeatureConfig()


@dataclass(eq=False)
class DistanceField:
    """Immutable per-cell distance (meters) to the nearest occupied cell."""

    resolution: float
    values: np.ndarray  # (H, W), 0 on occupied cells, +inf when no obstacles

    def at(self, p: Point) -> float:
        ix = min(max(int(math.floor(p[0] / self.resolution)), 0), self.values.shape[1] - 1)
        iy = min(max(int(math.floor(p[1] / self.resolution)), 0), self.values.shape[0] - 1)
        return float(self.values[iy, ix])

    def at_many(self, pts: np.ndarray) -> np.ndarray:
        ix = np.clip((pts[:, 0] / self.resolution).astype(int), 0, self.values.shape[1] - 1)
        iy = np.clip((pts[:, 1] / self.resolution).astype(int), 0, self.values.shape[0] - 1)
        return self.values[iy, ix]


def build_distance_field(grid: OccupancyGrid) -> DistanceField:
    return DistanceField(resolution=grid.resolution, values=distance_to_occupied(grid))


def pedestrian_zone_costs(
    scenario: Scenario, pts: np.ndarray, config: FeatureConfig = DEFAULT_FEATURES
) -> np.ndarray:
    """(n, 3) front/back/right-side Gaussian costs, max over pedestrians."""
    n = len(pts)
    out = np.zeros((n, 3))
    for ped in scenario.pedestrians:
        dx = pts[:, 0] - ped.x
        dy = pts[:, 1] - ped.y
        c, s = math.cos(ped.heading), math.sin(ped.heading)
        fwd = c * dx + s * dy  # along heading
        lat = -s * dx + c * dy  # leftward
        lat_term = lat * lat / (2.0 * config.sigma_side**2)
        front = np.where(fwd >= 0.0, np.exp(-(fwd * fwd / (2.0 * config.sigma_front**2) + lat_term)), 0.0)
        back = np.where(fwd < 0.0, np.exp(-(fwd * fwd / (2.0 * config.sigma_back**2) + lat_term)), 0.0)
        side_gauss = np.exp(-(fwd * fwd / (2.0 * config.sigma_side_lon**2) + lat_term))
        side = side_gauss if config.lateral_symmetric else np.where(lat <= 0.0, side_gauss, 0.0)
        np.maximum(out[:, 0], front, out=out[:, 0])
        np.maximum(out[:, 1], back, out=out[:, 1])
        np.maximum(out[:, 2], side, out=out[:, 2])
    return out


def features_at(
    scenario: Scenario,
    field: DistanceField,
    pts: np.ndarray,
    config: FeatureConfig = DEFAULT_FEATURES,
) -> np.ndarray:
    """Feature rows (n, 5) for an array of query points."""
    pts = np.asarray(pts, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    out = np.empty((len(pts), 5))
    diag = scenario.grid.diagonal_m
    out[:, 0] = np.hypot(pts[:, 0] - scenario.goal[0], pts[:, 1] - scenario.goal[1]) / diag
    out[:, 1] = np.minimum(field.at_many(pts), config.d_clamp) / config.d_clamp
    out[:, 2:5] = pedestrian_zone_costs(scenario, pts, config)
    return out


def extract_features(
    scenario: Scenario,
    field: DistanceField,
    p: Point,
    config: FeatureConfig = DEFAULT_FEATURES,
) -> FeatureVector:
    """Feature vector for a single in-bounds point."""
    if not scenario.grid.in_bounds(p):
        raise ValueError(f"query point {p} outside map bounds")
    row = features_at(scenario, field, np.asarray([p]), config)[0]
    return FeatureVector(*(float(v) for v in row))


class FeatureExtractor:
    """Scenario-bound extractor reused across many queries."""

    def __init__(self, scenario: Scenario, config: FeatureConfig = DEFAULT_FEATURES):
        self.scenario = scenario
        self.config = config
        self.field = build_distance_field(scenario.grid)

    def at(self, p: Point) -> FeatureVector:
        return extract_features(self.scenario, self.field, p, self.config)

    def batch(self, pts: np.ndarray) -> np.ndarray:
        return features_at(self.scenario, self.field, pts, self.config)
