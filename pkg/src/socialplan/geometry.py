"""Small 2D polyline helpers shared by the planner, oracle and metrics."""

from __future__ import annotations

import math

import numpy as np

Point = tuple[float, float]


def dist(a: Point, b: Point) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def polyline_length(points) -> float:
    """Total length of a polyline given as an (n, 2) array or point sequence."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        return 0.0
    return float(np.sum(np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))))


def point_segment_distance(p: Point, a: Point, b: Point) -> float:
    """Euclidean distance from p to the closed segment ab."""
    px, py = p
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    dd = dx * dx + dy * dy
    if dd == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / dd
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def point_polyline_distance(p: Point, points) -> float:
    """Minimum distance from p to any segment of a polyline."""
    pts = np.asarray(points, dtype=float)
    if len(pts) == 1:
        return math.hypot(p[0] - pts[0, 0], p[1] - pts[0, 1])
    px, py = p
    ax, ay = pts[:-1, 0], pts[:-1, 1]
    dx, dy = np.diff(pts[:, 0]), np.diff(pts[:, 1])
    dd = dx * dx + dy * dy
    t = np.where(dd > 0.0, ((px - ax) * dx + (py - ay) * dy) / np.where(dd > 0.0, dd, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    return float(np.min(np.hypot(px - (ax + t * dx), py - (ay + t * dy))))


def resample_count(points, count: int) -> np.ndarray:
    """Resample a polyline to `count` arc-length-uniform points, endpoints kept."""
    pts = np.asarray(points, dtype=float)
    if count < 2:
        raise ValueError("resample count must be >= 2")
    if len(pts) < 2:
        raise ValueError("polyline needs >= 2 points")
    seg = np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))
    cum = np.concatenate(([0.0], np.cumsum(seg)))
    total = cum[-1]
    if total == 0.0:
        return np.repeat(pts[:1], count, axis=0)
    stations = np.linspace(0.0, total, count)
    out = np.empty((count, 2))
    out[0] = pts[0]
    out[-1] = pts[-1]
    idx = np.searchsorted(cum, stations[1:-1], side="right") - 1
    idx = np.clip(idx, 0, len(seg) - 1)
    frac = (stations[1:-1] - cum[idx]) / np.where(seg[idx] > 0.0, seg[idx], 1.0)
    out[1:-1] = pts[idx] + frac[:, None] * (pts[idx + 1] - pts[idx])
    return out


def resample_spacing(points, spacing: float) -> np.ndarray:
    """Resample a polyline at fixed arc-length spacing.

    Stations sit at 0, spacing, 2*spacing, ... plus the endpoint, so a path of
    length 2.0 at spacing 0.2 yields 11 points.
    """
    if spacing <= 0.0:
        raise ValueError("spacing must be positive")
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        raise ValueError("polyline needs >= 2 points")
    seg = np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))
    cum = np.concatenate(([0.0], np.cumsum(seg)))
    total = cum[-1]
    if total == 0.0:
        return pts[:2].copy()
    stations = np.arange(0.0, total, spacing)
    if total - stations[-1] > 1e-12 * max(1.0, total):
        stations = np.concatenate((stations, [total]))
    out = np.empty((len(stations), 2))
    out[0] = pts[0]
    out[-1] = pts[-1]
    idx = np.searchsorted(cum, stations[1:-1], side="right") - 1
    idx = np.clip(idx, 0, len(seg) - 1)
    frac = (stations[1:-1] - cum[idx]) / np.where(seg[idx] > 0.0, seg[idx], 1.0)
    out[1:-1] = pts[idx] + frac[:, None] * (pts[idx + 1] - pts[idx])
    return out
