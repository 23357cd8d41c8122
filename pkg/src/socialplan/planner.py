"""Sampling-based planners over a scenario.

Three planners share one tree-growing engine: classic RRT (first path wins),
RRT* with cumulative Euclidean cost, and the learned-cost variant where each
edge is weighted by the generator's node cost. With cost_weight 0 and the
discriminator gate off, the learned-cost planner reduces bit-identically to
RRT*.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .features import DEFAULT_FEATURES, FeatureConfig, FeatureExtractor
from .geometry import Point
from .scenario import Path, Scenario, is_free, segment_clear
from .tinynet import GanPair, Mlp


class PlanningError(RuntimeError):
    pass


@dataclass(frozen=True)
class PlannerConfig:
    max_iterations: int = 3000
    steer_step: float = 0.25
    near_radius: float = 0.8
    goal_bias: float = 0.05
    cost_weight: float = 4.0
    discriminator_gate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.steer_step > 0.0:
            raise ValueError("steer_step must be positive")
        if not self.near_radius > 0.0:
            raise ValueError("near_radius must be positive")
        if not 0.0 <= self.goal_bias <= 1.0:
            raise ValueError("goal_bias must be a probability")
        if self.cost_weight < 0.0:
            raise ValueError("cost_weight must be non-negative")
        if not 0.0 <= self.discriminator_gate < 1.0:
            raise ValueError("discriminator_gate must be in [0, 1)")

    def to_dict(self) -> dict:
        return {
            "max_iterations": self.max_iterations,
            "steer_step": self.steer_step,
            "near_radius": self.near_radius,
            "goal_bias": self.goal_bias,
            "cost_weight": self.cost_weight,
            "discriminator_gate": self.discriminator_gate,
            "seed": self.seed,
        }


@dataclass
class PlanTree:
    scenario_id: str
    source: str
    points: np.ndarray  # (n, 2)
    parents: np.ndarray  # (n,), -1 for the root
    costs: np.ndarray  # (n,) cumulative cost from the root
    gvals: np.ndarray  # (n,) generator cost of each node (0 for plain planners)
    cost_weight: float
    goal_indices: list[int]

    def __len__(self) -> int:
        return len(self.points)

    def best_goal_index(self) -> int | None:
        if not self.goal_indices:
            return None
        best = min(self.goal_indices, key=lambda i: (self.costs[i], i))
        return best

    def to_dicts(self) -> list[dict]:
        return [
            {
                "point": {"x": float(self.points[i, 0]), "y": float(self.points[i, 1])},
                "parent": int(self.parents[i]),
                "cost": float(self.costs[i]),
            }
            for i in range(len(self.points))
        ]


@dataclass
class PlanResult:
    success: bool
    path: Path | None
    tree: PlanTree
    iterations: int
    best_cost_history: list[float]


def edge_cost_gan(generator: Mlp, to_features, from_cost: float, edge_length: float, cost_weight: float) -> float:
    """Cumulative cost through an edge: source cost plus length scaled by the
    generator's cost of the target node. Reduces to Euclidean accumulation at
    cost_weight 0."""
    if edge_length < 0.0:
        raise ValueError("edge_length must be non-negative")
    g = float(generator.forward(np.asarray(to_features, dtype=float))[0])
    return from_cost + edge_length * (1.0 + cost_weight * g)


def extract_solution(tree: PlanTree) -> Path | None:
    """Walk parent links from the cheapest goal node back to the root."""
    best = tree.best_goal_index()
    if best is None:
        return None
    idx = best
    rev = []
    while idx != -1:
        rev.append((float(tree.points[idx, 0]), float(tree.points[idx, 1])))
        idx = int(tree.parents[idx])
    rev.reverse()
    if len(rev) == 1:  # root already inside the goal region
        rev.append(rev[0])
    return Path(scenario_id=tree.scenario_id, source=tree.source, points=tuple(rev))


def _grow(
    scenario: Scenario,
    config: PlannerConfig,
    source: str,
    *,
    star: bool,
    lam: float,
    pair: GanPair | None,
    extractor: FeatureExtractor | None,
) -> PlanResult:
    grid = scenario.grid
    r_robot = scenario.robot_radius
    rng = np.random.default_rng(config.seed)
    cap = config.max_iterations + 1
    pts = np.empty((cap, 2))
    parents = np.full(cap, -1, dtype=np.int64)
    costs = np.zeros(cap)
    gvals = np.zeros(cap)
    incs = np.zeros(cap)
    children: list[list[int]] = [[] for _ in range(cap)]
    pts[0] = scenario.start
    n = 1
    goal_nodes: list[int] = []
    history: list[float] = []
    gate = config.discriminator_gate
    width_m, height_m = grid.width_m, grid.height_m
    r_near2 = config.near_radius * config.near_radius
    use_gan = pair is not None

    if scenario.in_goal(scenario.start):
        goal_nodes.append(0)

    # with cost_weight 0 and the gate off the generator cannot influence the
    # tree, so it is not evaluated; this keeps the reduction to plain RRT*
    # bit-identical, stored g-values included
    gan_active = use_gan and (lam > 0.0 or gate > 0.0)

    def node_gval(p: Point) -> float:
        if not gan_active:
            return 0.0
        feats = extractor.batch(np.asarray([p]))
        return float(pair.generator.forward(feats)[0, 0])

    def propagate(root_idx: int, touched: list[int]) -> None:
        stack = list(children[root_idx])
        while stack:
            c = stack.pop()
            costs[c] = costs[parents[c]] + incs[c]
            touched.append(c)
            stack.extend(children[c])

    best_cost = math.inf
    it = 0
    for it in range(1, config.max_iterations + 1):
        # sample: goal with goal_bias probability, else uniform over free space
        if rng.random() < config.goal_bias:
            x_rand = scenario.goal
        else:
            x_rand = None
            for _ in range(10000):
                cand = (rng.random() * width_m, rng.random() * height_m)
                if is_free(grid, r_robot, cand):
                    x_rand = cand
                    break
            if x_rand is None:
                raise PlanningError("could not sample a free point")
        dx = pts[:n, 0] - x_rand[0]
        dy = pts[:n, 1] - x_rand[1]
        d2 = dx * dx + dy * dy
        nearest = int(np.argmin(d2))
        d_near = math.sqrt(d2[nearest])
        if d_near <= config.steer_step:
            x_new = x_rand
        else:
            f = config.steer_step / d_near
            x_new = (
                pts[nearest, 0] + f * (x_rand[0] - pts[nearest, 0]),
                pts[nearest, 1] + f * (x_rand[1] - pts[nearest, 1]),
            )
        if not is_free(grid, r_robot, x_new):
            history.append(best_cost)
            continue
        ndx = pts[:n, 0] - x_new[0]
        ndy = pts[:n, 1] - x_new[1]
        nd2 = ndx * ndx + ndy * ndy
        if nd2.min() == 0.0:  # exact duplicate of an existing node
            history.append(best_cost)
            continue
        g_new = node_gval(x_new)
        if use_gan and gate > 0.0:
            feats = extractor.batch(np.asarray([x_new]))
            score = pair.realness(feats[0], g_new)
            if score < gate:
                history.append(best_cost)
                continue
        mult_new = 1.0 + lam * g_new

        if star:
            near = np.flatnonzero(nd2 <= r_near2)
            cand = near if nearest in near else np.concatenate((near, [nearest]))
            seg = np.sqrt(nd2[cand])
            cand_costs = costs[cand] + seg * mult_new
            order = np.lexsort((cand, cand_costs))
            parent = -1
            for oi in order:
                j = int(cand[oi])
                if segment_clear(grid, r_robot, (pts[j, 0], pts[j, 1]), x_new):
                    parent = j
                    inc = float(seg[oi] * mult_new)
                    break
            if parent == -1:
                history.append(best_cost)
                continue
        else:
            if not segment_clear(grid, r_robot, (pts[nearest, 0], pts[nearest, 1]), x_new):
                history.append(best_cost)
                continue
            parent = nearest
            inc = float(math.sqrt(nd2[nearest]) * mult_new)

        idx = n
        pts[idx] = x_new
        parents[idx] = parent
        incs[idx] = inc
        costs[idx] = costs[parent] + inc
        gvals[idx] = g_new
        children[parent].append(idx)
        n += 1
        reached_goal = scenario.in_goal(x_new)
        if reached_goal:
            goal_nodes.append(idx)

        if star:
            # rewire: adopt a cheaper parent wherever the new node (or any node
            # whose cost subsequently dropped) lowers a neighbor's cost, so no
            # node within near_radius of another is left improvable
            queue = deque([idx])
            seen_in_queue = {idx}
            while queue:
                q = queue.popleft()
                seen_in_queue.discard(q)
                qx, qy = pts[q, 0], pts[q, 1]
                qdx = pts[:n, 0] - qx
                qdy = pts[:n, 1] - qy
                qd2 = qdx * qdx + qdy * qdy
                neigh = np.flatnonzero(qd2 <= r_near2)
                if len(neigh) == 0:
                    continue
                seg_n = np.sqrt(qd2[neigh])
                cand_n = costs[q] + seg_n * (1.0 + lam * gvals[neigh])
                for k in np.flatnonzero(cand_n < costs[neigh]):
                    j = int(neigh[k])
                    if j == q:
                        continue
                    inc_j = float(seg_n[k]) * (1.0 + lam * float(gvals[j]))
                    candidate_cost = costs[q] + inc_j
                    if candidate_cost >= costs[j]:  # may have changed meanwhile
                        continue
                    if not segment_clear(grid, r_robot, (qx, qy), (pts[j, 0], pts[j, 1])):
                        continue
                    children[int(parents[j])].remove(j)
                    parents[j] = q
                    children[q].append(j)
                    incs[j] = inc_j
                    costs[j] = candidate_cost
                    touched = [j]
                    propagate(j, touched)
                    for t in touched:
                        if t not in seen_in_queue:
                            queue.append(t)
                            seen_in_queue.add(t)

        if goal_nodes:
            best_cost = min(float(costs[i]) for i in goal_nodes)
        history.append(best_cost)
        if reached_goal and not star:
            break

    tree = PlanTree(
        scenario_id=scenario.id,
        source=source,
        points=pts[:n].copy(),
        parents=parents[:n].copy(),
        costs=costs[:n].copy(),
        gvals=gvals[:n].copy(),
        cost_weight=lam,
        goal_indices=goal_nodes,
    )
    path = extract_solution(tree)
    return PlanResult(success=path is not None, path=path, tree=tree, iterations=it, best_cost_history=history)


def plan_rrt(scenario: Scenario, config: PlannerConfig) -> PlanResult:
    """Classic RRT: nearest-node parenting, stops at the first goal hit."""
    return _grow(scenario, config, "rrt", star=False, lam=0.0, pair=None, extractor=None)


def plan_rrt_star(scenario: Scenario, config: PlannerConfig) -> PlanResult:
    """RRT* with cumulative Euclidean cost, rewiring, full iteration budget."""
    return _grow(scenario, config, "rrt_star", star=True, lam=0.0, pair=None, extractor=None)


def plan_gan_rrt_star(
    scenario: Scenario,
    pair: GanPair,
    config: PlannerConfig,
    *,
    feature_config: FeatureConfig = DEFAULT_FEATURES,
    extractor: FeatureExtractor | None = None,
) -> PlanResult:
    """RRT* whose edge costs are scaled by the learned node cost, optionally
    gated by the discriminator's realness score."""
    if pair.generator.sizes[0] != 5:
        raise ValueError(f"generator expects input width {pair.generator.sizes[0]}, features provide 5")
    if extractor is None:
        extractor = FeatureExtractor(scenario, feature_config)
    return _grow(
        scenario,
        config,
        "gan_rrt_star",
        star=True,
        lam=config.cost_weight,
        pair=pair,
        extractor=extractor,
    )
