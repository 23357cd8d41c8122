import math

import numpy as np
import pytest

from socialplan.scenario import OccupancyGrid, Pedestrian, Scenario


def make_grid(rows: list[str], resolution: float = 0.1) -> OccupancyGrid:
    """Grid from ascii art: '#' occupied, '.' free; first row is the TOP of
    the map (highest y), so drawings read naturally."""
    height = len(rows)
    width = len(rows[0])
    cells = np.zeros((height, width), dtype=np.uint8)
    for r, row in enumerate(rows):
        assert len(row) == width
        for c, ch in enumerate(row):
            cells[height - 1 - r, c] = 1 if ch == "#" else 0
    return OccupancyGrid(width, height, resolution, cells)


def empty_grid(width: int = 20, height: int = 20, resolution: float = 0.1) -> OccupancyGrid:
    return OccupancyGrid(width, height, resolution, np.zeros((height, width), dtype=np.uint8))


def make_scenario(
    grid: OccupancyGrid,
    start,
    goal,
    pedestrians=(),
    goal_radius: float = 0.25,
    robot_radius: float = 0.1,
    scenario_id: str = "test",
) -> Scenario:
    return Scenario(
        id=scenario_id,
        grid=grid,
        pedestrians=tuple(pedestrians),
        start=start,
        goal=goal,
        goal_radius=goal_radius,
        robot_radius=robot_radius,
    )


@pytest.fixture
def simple_scenario():
    """20x20 empty 2m map, start bottom-left, goal top-right."""
    grid = empty_grid()
    return make_scenario(grid, (0.35, 0.35), (1.65, 1.65))


@pytest.fixture
def ped_scenario():
    """Empty map with one pedestrian facing +x in the middle."""
    grid = empty_grid(30, 30, 0.1)
    ped = Pedestrian(1.5, 1.5, 0.0)
    return make_scenario(grid, (0.35, 1.5), (2.65, 1.5), pedestrians=(ped,))


def rotate_scenario_ccw(s: Scenario) -> Scenario:
    """Rotate a scenario 90 degrees counter-clockwise about the origin and
    shift back into the positive quadrant: (x, y) -> (H - y, x)."""
    g = s.grid
    new_cells = np.rot90(g.cells, k=-1)
    new_grid = OccupancyGrid(g.height, g.width, g.resolution, new_cells.copy())
    h_m = g.height_m

    def tf(p):
        return (h_m - p[1], p[0])

    peds = tuple(
        Pedestrian(*tf((p.x, p.y)), heading_wrap(p.heading + math.pi / 2.0), p.speed, p.body_radius)
        for p in s.pedestrians
    )
    return Scenario(
        id=s.id + "-rot",
        grid=new_grid,
        pedestrians=peds,
        start=tf(s.start),
        goal=tf(s.goal),
        goal_radius=s.goal_radius,
        robot_radius=s.robot_radius,
    )


def heading_wrap(theta: float) -> float:
    out = math.fmod(theta + math.pi, 2.0 * math.pi)
    if out < 0.0:
        out += 2.0 * math.pi
    return out - math.pi


def rotate_point_ccw(s: Scenario, p):
    return (s.grid.height_m - p[1], p[0])
