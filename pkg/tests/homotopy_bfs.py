"""Brute-force homotopy ground truth for tiny grids.

Grid paths are sequences of 4-connected free cells with fixed endpoints. Two
paths are deformable into each other iff they are connected by elementary
moves that never touch an obstacle cell:

  - spike insert/remove:  ... a ...      <->  ... a b a ...   (b free neighbor)
  - corner flip:          ... a v c ...  <->  ... a v' c ...  (unit square,
                          all four cells free)

Component labels over the bounded path space (lengths capped) give the
deformation verdict; this is completely independent of the crossing-word
implementation it is used to check.
"""

from __future__ import annotations

from collections import deque

import numpy as np

Cell = tuple[int, int]

_MOVES4 = ((1, 0), (-1, 0), (0, 1), (0, -1))


class GridWorld:
    def __init__(self, free: np.ndarray):
        self.free = free  # (H, W) bool
        self.h, self.w = free.shape

    def is_free(self, c: Cell) -> bool:
        x, y = c
        return 0 <= x < self.w and 0 <= y < self.h and bool(self.free[y, x])

    def neighbors(self, c: Cell):
        for dx, dy in _MOVES4:
            n = (c[0] + dx, c[1] + dy)
            if self.is_free(n):
                yield n


def path_moves(world: GridWorld, path: tuple[Cell, ...], max_len: int):
    """All paths reachable from `path` by one elementary move."""
    n = len(path)
    # spike removal: a b a -> a
    for i in range(n - 2):
        if path[i] == path[i + 2]:
            yield path[: i + 1] + path[i + 3 :]
    # spike insertion: a -> a b a
    if n + 2 <= max_len:
        for i in range(n):
            for b in world.neighbors(path[i]):
                yield path[: i + 1] + (b, path[i]) + path[i + 1 :]
    # corner flip: a v c -> a v' c across a fully free unit square
    for i in range(1, n - 1):
        a, v, c = path[i - 1], path[i], path[i + 1]
        if a != c and a[0] != c[0] and a[1] != c[1]:
            v2 = (a[0] + c[0] - v[0], a[1] + c[1] - v[1])
            if world.is_free(v2):
                yield path[: i] + (v2,) + path[i + 1 :]


def label_components(world: GridWorld, paths: list[tuple[Cell, ...]], slack: int = 6, state_cap: int = 400_000):
    """Deformation-component label for each input path.

    BFS floods the bounded path space from each unlabeled path; paths sharing
    a component are deformable into each other. Raises if the bounded space
    exceeds state_cap (instance too large for ground truth).
    """
    max_len = max(len(p) for p in paths) + slack
    labels: dict[tuple[Cell, ...], int] = {}
    out = []
    next_label = 0
    for start in paths:
        if start in labels:
            out.append(labels[start])
            continue
        label = next_label
        next_label += 1
        queue = deque([start])
        labels[start] = label
        while queue:
            cur = queue.popleft()
            for nxt in path_moves(world, cur, max_len):
                if nxt not in labels:
                    labels[nxt] = label
                    queue.append(nxt)
            if len(labels) > state_cap:
                raise RuntimeError(f"path space exceeded {state_cap} states")
        out.append(label)
    return out


def _greedy_walk(world: GridWorld, start: Cell, goal: Cell, rng: np.random.Generator, max_steps: int):
    path = [start]
    seen_budget: dict[Cell, int] = {}
    cur = start
    for _ in range(max_steps):
        if cur == goal:
            return path
        options = list(world.neighbors(cur))
        if not options:
            return None

        def score(c):
            return abs(c[0] - goal[0]) + abs(c[1] - goal[1])

        options.sort(key=score)
        weights = np.array([0.6 if i == 0 else 0.4 / max(1, len(options) - 1) for i in range(len(options))])
        weights /= weights.sum()
        pick = options[0]
        for _ in range(4):
            pick = options[int(rng.choice(len(options), p=weights))]
            if seen_budget.get(pick, 0) < 2:
                break
        seen_budget[pick] = seen_budget.get(pick, 0) + 1
        path.append(pick)
        cur = pick
    return path if cur == goal else None


def random_grid_path(world: GridWorld, start: Cell, goal: Cell, rng: np.random.Generator, max_steps: int = 80):
    """Random start-goal grid path routed through a random free waypoint, so
    samples spread across homotopy classes. None when the walk strands."""
    free_cells = [tuple(int(v) for v in c[::-1]) for c in np.argwhere(world.free)]
    way = free_cells[int(rng.integers(len(free_cells)))]
    first = _greedy_walk(world, start, way, rng, max_steps)
    if first is None:
        return None
    second = _greedy_walk(world, way, goal, rng, max_steps)
    if second is None:
        return None
    return tuple(first + second[1:])
