"""World model: occupancy grids, pedestrians, scenarios, paths.

Coordinates are meters, grids are row-major with cell (ix, iy) covering
[ix*res, (ix+1)*res) x [iy*res, (iy+1)*res). Everything outside the map is
treated as occupied. A point is free for a robot of radius r when no occupied
cell center lies within r of it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .geometry import Point, dist

PATH_SOURCES = ("demo_human", "demo_oracle", "rrt", "rrt_star", "gan_rrt_star")

_LABEL_4CONN = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=int)


class FormatError(ValueError):
    """A scenario or path document violates the file schema or an invariant."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


class GenerationError(RuntimeError):
    pass


@dataclass(eq=False)
class OccupancyGrid:
    width: int
    height: int
    resolution: float
    cells: np.ndarray  # (height, width) uint8, 0 free / 1 occupied

    def __post_init__(self):
        if self.width < 8 or self.height < 8:
            raise FormatError("width" if self.width < 8 else "height", "grid must be at least 8x8 cells")
        if not self.resolution > 0.0:
            raise FormatError("resolution", "must be positive")
        cells = np.asarray(self.cells, dtype=np.uint8)
        if cells.size != self.width * self.height:
            raise FormatError("cells", f"expected {self.width * self.height} cells, got {cells.size}")
        cells = cells.reshape(self.height, self.width)
        if not np.isin(cells, (0, 1)).all():
            raise FormatError("cells", "occupancy values must be 0 or 1")
        cells.flags.writeable = False
        object.__setattr__(self, "cells", cells)
        self._cache: dict = {}

    def __eq__(self, other):
        return (
            isinstance(other, OccupancyGrid)
            and self.width == other.width
            and self.height == other.height
            and self.resolution == other.resolution
            and np.array_equal(self.cells, other.cells)
        )

    @property
    def width_m(self) -> float:
        return self.width * self.resolution

    @property
    def height_m(self) -> float:
        return self.height * self.resolution

    @property
    def diagonal_m(self) -> float:
        return math.hypot(self.width_m, self.height_m)

    def cell_of(self, p: Point) -> tuple[int, int]:
        return int(math.floor(p[0] / self.resolution)), int(math.floor(p[1] / self.resolution))

    def cell_center(self, ix: int, iy: int) -> Point:
        return ((ix + 0.5) * self.resolution, (iy + 0.5) * self.resolution)

    def in_bounds(self, p: Point) -> bool:
        return 0.0 <= p[0] < self.width_m and 0.0 <= p[1] < self.height_m


def distance_to_occupied(grid: OccupancyGrid) -> np.ndarray:
    """Per-cell Euclidean distance (meters) from each cell center to the
    nearest occupied cell center; 0 on occupied cells, +inf if none exist."""
    cached = grid._cache.get("edt")
    if cached is not None:
        return cached
    occ = grid.cells.astype(bool)
    if not occ.any():
        edt = np.full((grid.height, grid.width), np.inf)
    else:
        edt = ndimage.distance_transform_edt(~occ, sampling=grid.resolution)
    edt.flags.writeable = False
    grid._cache["edt"] = edt
    return edt


def _border_center_distance(grid: OccupancyGrid) -> np.ndarray:
    """Distance from each cell center to the nearest out-of-map cell center."""
    cached = grid._cache.get("border")
    if cached is not None:
        return cached
    res = grid.resolution
    cx = (np.arange(grid.width) + 0.5) * res
    cy = (np.arange(grid.height) + 0.5) * res
    dx = np.minimum(cx, grid.width_m - cx)
    dy = np.minimum(cy, grid.height_m - cy)
    out = np.minimum(dx[None, :], dy[:, None]) + 0.5 * res
    out.flags.writeable = False
    grid._cache["border"] = out
    return out


def free_center_mask(grid: OccupancyGrid, robot_radius: float) -> np.ndarray:
    """Boolean (H, W) mask: True where the cell center is a free point for the
    given robot radius (matches is_free at every center, up to floating-point
    ties when an occupied center sits at exactly robot_radius)."""
    key = ("free", robot_radius)
    cached = grid._cache.get(key)
    if cached is not None:
        return cached
    mask = (distance_to_occupied(grid) > robot_radius) & (_border_center_distance(grid) > robot_radius)
    mask.flags.writeable = False
    grid._cache[key] = mask
    return mask


def traversal_blocked_mask(grid: OccupancyGrid, robot_radius: float) -> np.ndarray:
    """Conservative per-cell blocked mask for segment traversal: a cell is
    blocked when any point inside it could be within robot_radius of an
    occupied cell center (margin of half a cell diagonal)."""
    key = ("blocked", robot_radius)
    cached = grid._cache.get(key)
    if cached is not None:
        return cached
    margin = robot_radius + 0.5 * grid.resolution * math.sqrt(2.0)
    mask = (distance_to_occupied(grid) <= margin) | (_border_center_distance(grid) <= margin)
    mask.flags.writeable = False
    grid._cache[key] = mask
    return mask


def _nearest_outside_center(grid: OccupancyGrid, p: Point) -> float:
    """Distance from p to the nearest cell center of the (occupied) lattice
    outside the map."""
    res = grid.resolution
    px, py = p

    def off_lattice(v: float) -> float:
        t = v / res - 0.5
        return abs(t - round(t)) * res

    d_left = math.hypot(px + 0.5 * res, off_lattice(py))
    d_right = math.hypot(grid.width_m + 0.5 * res - px, off_lattice(py))
    d_bottom = math.hypot(py + 0.5 * res, off_lattice(px))
    d_top = math.hypot(grid.height_m + 0.5 * res - py, off_lattice(px))
    return min(d_left, d_right, d_bottom, d_top)


def is_free(grid: OccupancyGrid, robot_radius: float, p: Point) -> bool:
    """True iff no occupied cell center (including the virtual occupied cells
    outside the map) lies within robot_radius of p. Out of bounds -> False."""
    if not grid.in_bounds(p):
        return False
    if _nearest_outside_center(grid, p) <= robot_radius:
        return False
    res = grid.resolution
    ix, iy = grid.cell_of(p)
    ix = min(ix, grid.width - 1)
    iy = min(iy, grid.height - 1)
    half_diag = 0.5 * res * math.sqrt(2.0)
    d_center = distance_to_occupied(grid)[iy, ix]
    if d_center > robot_radius + half_diag:
        return True
    if d_center + half_diag <= robot_radius:
        return False
    # exact scan over a superset window; the distance test keeps it exact
    px, py = p
    reach = math.ceil(robot_radius / res) + 1
    ix0 = max(0, ix - reach)
    ix1 = min(grid.width - 1, ix + reach)
    iy0 = max(0, iy - reach)
    iy1 = min(grid.height - 1, iy + reach)
    sub = grid.cells[iy0 : iy1 + 1, ix0 : ix1 + 1]
    if not sub.any():
        return True
    cxs = (np.arange(ix0, ix1 + 1) + 0.5) * res - px
    cys = (np.arange(iy0, iy1 + 1) + 0.5) * res - py
    d2 = cys[:, None] ** 2 + cxs[None, :] ** 2
    return not bool((sub.astype(bool) & (d2 <= robot_radius * robot_radius)).any())


def _supercover_blocked(grid: OccupancyGrid, blocked: np.ndarray, a: Point, b: Point) -> bool:
    """Walk every cell the segment ab passes through; exact corner crossings
    visit both corner-adjacent cells. Returns True if any cell is blocked."""
    res = grid.resolution
    gx0, gy0 = a[0] / res, a[1] / res
    gx1, gy1 = b[0] / res, b[1] / res
    w, h = grid.width, grid.height

    def clamp(ix, iy):
        return min(max(ix, 0), w - 1), min(max(iy, 0), h - 1)

    ix, iy = clamp(math.floor(gx0), math.floor(gy0))
    ex, ey = clamp(math.floor(gx1), math.floor(gy1))
    if blocked[iy, ix]:
        return True
    dx = gx1 - gx0
    dy = gy1 - gy0
    step_x = 1 if dx > 0 else -1
    step_y = 1 if dy > 0 else -1
    inv_dx = abs(1.0 / dx) if dx != 0.0 else math.inf
    inv_dy = abs(1.0 / dy) if dy != 0.0 else math.inf
    # parametric distance (fraction of segment) to the next cell boundary
    if dx > 0:
        t_max_x = (math.floor(gx0) + 1.0 - gx0) * inv_dx
    elif dx < 0:
        t_max_x = (gx0 - math.floor(gx0)) * inv_dx
    else:
        t_max_x = math.inf
    if dy > 0:
        t_max_y = (math.floor(gy0) + 1.0 - gy0) * inv_dy
    elif dy < 0:
        t_max_y = (gy0 - math.floor(gy0)) * inv_dy
    else:
        t_max_y = math.inf

    corner_eps = 1e-9
    budget = 2 * (abs(ex - ix) + abs(ey - iy)) + 8
    while (ix, iy) != (ex, ey) and budget > 0:
        budget -= 1
        if min(t_max_x, t_max_y) > 1.0 + 1e-12:
            break
        if abs(t_max_x - t_max_y) <= corner_eps:
            # corner crossing: both side cells are swept
            for sx, sy in ((ix + step_x, iy), (ix, iy + step_y)):
                cx, cy = clamp(sx, sy)
                if blocked[cy, cx]:
                    return True
            ix, iy = clamp(ix + step_x, iy + step_y)
            t_max_x += inv_dx
            t_max_y += inv_dy
        elif t_max_x < t_max_y:
            ix, iy = clamp(ix + step_x, iy)
            t_max_x += inv_dx
        else:
            ix, iy = clamp(ix, iy + step_y)
            t_max_y += inv_dy
        if blocked[iy, ix]:
            return True
    return False


def segment_clear(grid: OccupancyGrid, robot_radius: float, a: Point, b: Point) -> bool:
    """Supercover part of segment_free, assuming both endpoints are free."""
    if a == b:
        return True
    if (b[0], b[1]) < (a[0], a[1]):  # canonical direction, keeps the check symmetric
        a, b = b, a
    blocked = traversal_blocked_mask(grid, robot_radius)
    return not _supercover_blocked(grid, blocked, a, b)


def segment_free(grid: OccupancyGrid, robot_radius: float, a: Point, b: Point) -> bool:
    """True iff the whole segment ab stays free for the given robot radius.

    Conservative: supercover traversal against the blocked-cell mask plus
    exact endpoint checks; never True when any point of the segment is within
    robot_radius of an occupied cell center.
    """
    if a == b:
        return is_free(grid, robot_radius, a)
    if not (is_free(grid, robot_radius, a) and is_free(grid, robot_radius, b)):
        return False
    return segment_clear(grid, robot_radius, a, b)


@dataclass(frozen=True)
class Pedestrian:
    x: float
    y: float
    heading: float  # radians in [-pi, pi)
    speed: float = 0.0
    body_radius: float = 0.3

    def __post_init__(self):
        if not self.body_radius > 0.0:
            raise FormatError("body_radius", "must be positive")
        if self.speed < 0.0:
            raise FormatError("speed", "must be non-negative")
        if not -math.pi <= self.heading < math.pi:
            object.__setattr__(self, "heading", wrap_angle(self.heading))


def wrap_angle(theta: float) -> float:
    """Wrap to [-pi, pi)."""
    out = math.fmod(theta + math.pi, 2.0 * math.pi)
    if out < 0.0:
        out += 2.0 * math.pi
    return out - math.pi


@dataclass(eq=False)
class Scenario:
    id: str
    grid: OccupancyGrid
    pedestrians: tuple[Pedestrian, ...]
    start: Point
    goal: Point
    goal_radius: float = 0.25
    robot_radius: float = 0.2

    def __post_init__(self):
        self.pedestrians = tuple(self.pedestrians)
        self.start = (float(self.start[0]), float(self.start[1]))
        self.goal = (float(self.goal[0]), float(self.goal[1]))
        validate_scenario(self)

    def __eq__(self, other):
        return (
            isinstance(other, Scenario)
            and self.id == other.id
            and self.grid == other.grid
            and self.pedestrians == other.pedestrians
            and self.start == other.start
            and self.goal == other.goal
            and self.goal_radius == other.goal_radius
            and self.robot_radius == other.robot_radius
        )

    def in_goal(self, p: Point) -> bool:
        return dist(p, self.goal) <= self.goal_radius


def validate_scenario(s: Scenario) -> None:
    if not s.goal_radius > 0.0:
        raise FormatError("goal_radius", "must be positive")
    if not s.robot_radius >= 0.0:
        raise FormatError("robot_radius", "must be non-negative")
    for i, ped in enumerate(s.pedestrians):
        if not s.grid.in_bounds((ped.x, ped.y)):
            raise FormatError(f"pedestrians[{i}]", "position outside map bounds")
    if s.start == s.goal:
        raise FormatError("goal", "start and goal must be distinct")
    if not is_free(s.grid, s.robot_radius, s.start):
        raise FormatError("start", "not in free space after robot-radius dilation")
    if not is_free(s.grid, s.robot_radius, s.goal):
        raise FormatError("goal", "not in free space after robot-radius dilation")


@dataclass(eq=True, frozen=True)
class Path:
    scenario_id: str
    source: str
    points: tuple[Point, ...]

    def __post_init__(self):
        if self.source not in PATH_SOURCES:
            raise FormatError("source", f"unknown source {self.source!r}")
        pts = tuple((float(x), float(y)) for x, y in self.points)
        if len(pts) < 2:
            raise FormatError("points", "a path needs at least 2 points")
        object.__setattr__(self, "points", pts)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)


class PathInvariantError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def validate_path(scenario: Scenario, path: Path, *, endpoint_tol: float = 1e-9) -> None:
    """Check the geometric path invariants against a scenario."""
    if path.scenario_id != scenario.id:
        raise PathInvariantError("scenario_id", f"path belongs to {path.scenario_id!r}, not {scenario.id!r}")
    if dist(path.points[0], scenario.start) > endpoint_tol:
        raise PathInvariantError("points[0]", "path must start at the scenario start")
    if not scenario.in_goal(path.points[-1]):
        raise PathInvariantError("points[-1]", "path must end inside the goal region")
    for i in range(len(path.points) - 1):
        if not segment_free(scenario.grid, scenario.robot_radius, path.points[i], path.points[i + 1]):
            raise PathInvariantError(f"points[{i}]", "segment collides with an obstacle")


# ---------------------------------------------------------------------------
# feasibility


def feasibility_components(grid: OccupancyGrid, robot_radius: float) -> np.ndarray:
    """4-connected component labels over cells that segment traversal treats
    as open; two centers in the same component are connectable by a path whose
    segments pass segment_free."""
    open_mask = ~traversal_blocked_mask(grid, robot_radius)
    labels, _ = ndimage.label(open_mask, structure=_LABEL_4CONN)
    return labels


def is_feasible(scenario: Scenario) -> bool:
    labels = feasibility_components(scenario.grid, scenario.robot_radius)
    six, siy = scenario.grid.cell_of(scenario.start)
    gix, giy = scenario.grid.cell_of(scenario.goal)
    ls = labels[siy, six]
    lg = labels[giy, gix]
    return ls != 0 and ls == lg


# ---------------------------------------------------------------------------
# random scenario generation


def _distance_to_segment(px: np.ndarray, py: np.ndarray, a: Point, b: Point) -> np.ndarray:
    dx, dy = b[0] - a[0], b[1] - a[1]
    dd = dx * dx + dy * dy
    if dd == 0.0:
        return np.hypot(px - a[0], py - a[1])
    t = np.clip(((px - a[0]) * dx + (py - a[1]) * dy) / dd, 0.0, 1.0)
    return np.hypot(px - (a[0] + t * dx), py - (a[1] + t * dy))


def _paint_obstacles(rng: np.random.Generator, width: int, height: int) -> np.ndarray:
    occ = np.zeros((height, width), dtype=np.uint8)
    n_obs = int(rng.integers(2, 7))
    yy, xx = np.mgrid[0:height, 0:width]
    for _ in range(n_obs):
        if rng.random() < 0.5:
            w = int(rng.integers(max(2, width // 12), max(3, width // 4)))
            h = int(rng.integers(max(2, height // 12), max(3, height // 4)))
            x0 = int(rng.integers(0, max(1, width - w)))
            y0 = int(rng.integers(0, max(1, height - h)))
            occ[y0 : y0 + h, x0 : x0 + w] = 1
        else:
            cx = int(rng.integers(0, width))
            cy = int(rng.integers(0, height))
            n_lobes = int(rng.integers(3, 6))
            for _ in range(n_lobes):
                ox = cx + int(rng.integers(-width // 10, width // 10 + 1))
                oy = cy + int(rng.integers(-height // 10, height // 10 + 1))
                rad = int(rng.integers(2, max(3, min(width, height) // 10)))
                occ[(yy - oy) ** 2 + (xx - ox) ** 2 <= rad * rad] = 1
    return occ


def generate_scenarios(
    count: int,
    width: int,
    height: int,
    ped_count: int,
    seed: int,
    *,
    resolution: float = 0.02,
    empty_map: bool = False,
    robot_radius: float = 0.2,
    goal_radius: float = 0.25,
    ped_body_radius: float = 0.3,
    id_prefix: str = "scn",
) -> list[Scenario]:
    """Generate `count` random feasible scenarios, deterministic per seed.

    Each scenario gets 2-6 rectangular/blob obstacles (none in empty_map
    mode), `ped_count` pedestrians on free cells, and a start/goal pair at
    least 40% of the map diagonal apart in the same traversable component.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if width < 8 or height < 8:
        raise ValueError("map must be at least 8x8 cells")
    rng = np.random.default_rng(seed)
    out: list[Scenario] = []
    min_sep = 0.4 * math.hypot(width * resolution, height * resolution)
    for k in range(count):
        scenario = None
        for _ in range(1000):
            occ = (
                np.zeros((height, width), dtype=np.uint8)
                if empty_map
                else _paint_obstacles(rng, width, height)
            )
            try:
                grid = OccupancyGrid(width, height, resolution, occ)
            except FormatError:
                continue
            open_mask = ~traversal_blocked_mask(grid, robot_radius)
            open_idx = np.flatnonzero(open_mask.ravel())
            if len(open_idx) < 2:
                continue
            labels = feasibility_components(grid, robot_radius)
            placed = None
            for _ in range(100):
                si, gi = rng.choice(open_idx, size=2, replace=False)
                sx, sy = grid.cell_center(int(si % width), int(si // width))
                gx, gy = grid.cell_center(int(gi % width), int(gi // width))
                if dist((sx, sy), (gx, gy)) < min_sep:
                    continue
                if labels[int(si // width), int(si % width)] != labels[int(gi // width), int(gi % width)]:
                    continue
                placed = ((sx, sy), (gx, gy))
                break
            if placed is None:
                continue
            ped_mask = free_center_mask(grid, ped_body_radius)
            ped_idx = np.flatnonzero(ped_mask.ravel())
            if len(ped_idx) < ped_count:
                continue
            peds = []
            if ped_count > 0:
                # pedestrians cluster around the start-goal corridor, the
                # region where the interaction actually happens
                cx = (ped_idx % width + 0.5) * resolution
                cy = (ped_idx // width + 0.5) * resolution
                band = 0.12 * math.hypot(width * resolution, height * resolution)
                d_seg = _distance_to_segment(cx, cy, placed[0], placed[1])
                near = ped_idx[d_seg <= band]
                pool = near if len(near) >= ped_count else ped_idx
                chosen = rng.choice(pool, size=ped_count, replace=False)
                # headings roughly along the corridor axis (either way) plus
                # noise, like people walking the same route
                axis = math.atan2(placed[1][1] - placed[0][1], placed[1][0] - placed[0][0])
                for idx in chosen:
                    px, py = grid.cell_center(int(idx % width), int(idx // width))
                    heading = axis + (0.0 if rng.random() < 0.5 else math.pi) + rng.normal(0.0, 0.5)
                    peds.append(Pedestrian(px, py, wrap_angle(float(heading)), 0.0, ped_body_radius))
            scenario = Scenario(
                id=f"{id_prefix}-{seed}-{k:03d}",
                grid=grid,
                pedestrians=tuple(peds),
                start=placed[0],
                goal=placed[1],
                goal_radius=goal_radius,
                robot_radius=robot_radius,
            )
            break
        if scenario is None:
            raise GenerationError(f"scenario {k}: no feasible draw within 1000 attempts")
        out.append(scenario)
    return out


# ---------------------------------------------------------------------------
# serialization


def _rle_encode(cells: np.ndarray) -> list[list[int]]:
    flat = cells.ravel()
    boundaries = np.flatnonzero(np.diff(flat)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [len(flat)]))
    return [[int(flat[s]), int(e - s)] for s, e in zip(starts, ends)]


def _rle_decode(runs, expected: int) -> np.ndarray:
    if not isinstance(runs, list):
        raise FormatError("occupancy_rle", "must be a list of [value, count] pairs")
    values = []
    counts = []
    for i, run in enumerate(runs):
        if not (isinstance(run, list) and len(run) == 2):
            raise FormatError("occupancy_rle", f"run {i} is not a [value, count] pair")
        v, c = run
        if v not in (0, 1):
            raise FormatError("occupancy_rle", f"run {i} has value {v!r}, expected 0 or 1")
        if not isinstance(c, int) or c < 1:
            raise FormatError("occupancy_rle", f"run {i} has invalid count {c!r}")
        values.append(v)
        counts.append(c)
    total = sum(counts)
    if total != expected:
        raise FormatError("occupancy_rle", f"runs sum to {total} cells, expected {expected}")
    return np.repeat(np.asarray(values, dtype=np.uint8), counts)


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "id": s.id,
        "width": s.grid.width,
        "height": s.grid.height,
        "resolution": s.grid.resolution,
        "occupancy_rle": _rle_encode(s.grid.cells),
        "pedestrians": [
            {"x": p.x, "y": p.y, "heading": p.heading, "speed": p.speed, "body_radius": p.body_radius}
            for p in s.pedestrians
        ],
        "start": {"x": s.start[0], "y": s.start[1]},
        "goal": {"x": s.goal[0], "y": s.goal[1]},
        "goal_radius": s.goal_radius,
        "robot_radius": s.robot_radius,
    }


def _require(doc: dict, key: str, kinds, where: str = ""):
    name = f"{where}{key}"
    if key not in doc:
        raise FormatError(name, "missing field")
    val = doc[key]
    if not isinstance(val, kinds):
        raise FormatError(name, f"expected {kinds}, got {type(val).__name__}")
    return val


def _point_from(doc: dict, key: str) -> Point:
    sub = _require(doc, key, dict)
    x = _require(sub, "x", (int, float), f"{key}.")
    y = _require(sub, "y", (int, float), f"{key}.")
    return (float(x), float(y))


def scenario_from_dict(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise FormatError("document", "scenario document must be a JSON object")
    sid = _require(doc, "id", str)
    width = _require(doc, "width", int)
    height = _require(doc, "height", int)
    resolution = float(_require(doc, "resolution", (int, float)))
    cells = _rle_decode(_require(doc, "occupancy_rle", list), width * height)
    grid = OccupancyGrid(width, height, resolution, cells)
    peds = []
    for i, pd in enumerate(_require(doc, "pedestrians", list)):
        if not isinstance(pd, dict):
            raise FormatError(f"pedestrians[{i}]", "must be an object")
        peds.append(
            Pedestrian(
                float(_require(pd, "x", (int, float), f"pedestrians[{i}].")),
                float(_require(pd, "y", (int, float), f"pedestrians[{i}].")),
                float(_require(pd, "heading", (int, float), f"pedestrians[{i}].")),
                float(pd.get("speed", 0.0)),
                float(pd.get("body_radius", 0.3)),
            )
        )
    return Scenario(
        id=sid,
        grid=grid,
        pedestrians=tuple(peds),
        start=_point_from(doc, "start"),
        goal=_point_from(doc, "goal"),
        goal_radius=float(doc.get("goal_radius", 0.25)),
        robot_radius=float(doc.get("robot_radius", 0.2)),
    )


def path_to_dict(p: Path) -> dict:
    return {
        "scenario_id": p.scenario_id,
        "source": p.source,
        "points": [{"x": x, "y": y} for x, y in p.points],
    }


def path_from_dict(doc: dict) -> Path:
    if not isinstance(doc, dict):
        raise FormatError("document", "path document must be a JSON object")
    sid = _require(doc, "scenario_id", str)
    source = _require(doc, "source", str)
    raw = _require(doc, "points", list)
    pts = []
    for i, pt in enumerate(raw):
        if not isinstance(pt, dict):
            raise FormatError(f"points[{i}]", "must be an object")
        pts.append(
            (
                float(_require(pt, "x", (int, float), f"points[{i}].")),
                float(_require(pt, "y", (int, float), f"points[{i}].")),
            )
        )
    return Path(scenario_id=sid, source=source, points=tuple(pts))


def dumps_json(doc: dict) -> str:
    return json.dumps(doc, separators=(",", ":")) + "\n"


def save_scenario(s: Scenario, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_json(scenario_to_dict(s)))


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError("document", f"invalid JSON: {exc}") from exc
    return scenario_from_dict(doc)


def save_path(p: Path, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_json(path_to_dict(p)))


def load_path(path) -> Path:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError("document", f"invalid JSON: {exc}") from exc
    return path_from_dict(doc)
