"""Independent brute-force oracle for small instances.

Deliberately shares nothing with the search backend beyond the topology
type: paths are enumerated by plain depth-first search over arms, and route
combinations are checked for side-capacity compatibility by recounting side
usage from the vertex side sets.  Exponential and proud of it; intended for
meshes up to about 2x2 with a handful of routes.
"""

from __future__ import annotations

from ..mesh import is_port_ref, is_vertex_ref, ref_index
from ..routing import (
    INFEASIBLE,
    OPTIMAL,
    RoutingProblem,
    SolveOutcome,
    build_solution,
)


def _undirected_id(topology, arm_id: int) -> int:
    mate = topology.reverse_arm.get(arm_id)
    return arm_id if mate is None else min(arm_id, mate)


def _enumerate_paths(
    problem: RoutingProblem, source: str, drain: str, cap: int
) -> list[tuple[float, tuple[int, ...]]]:
    """All arm-simple source->drain paths within the loss budget and cap.

    Arm-simple means neither direction of any coupler arm repeats.  Inner
    nodes must be junction vertices; ports other than the drain end nothing.
    """
    topology = problem.topology
    loss_w = problem.loss_weights
    cost_w = problem.cost_weights
    budget = problem.max_route_length
    found: list[tuple[float, tuple[int, ...]]] = []
    path: list[int] = []
    used: set[int] = set()

    def dfs(node: str, loss: float, cost: float) -> None:
        for arm_id in topology.arms_by_tail.get(node, ()):
            uid = _undirected_id(topology, arm_id)
            if uid in used:
                continue
            new_loss = loss + loss_w[arm_id]
            if new_loss > budget or len(path) + 1 > cap:
                continue
            head = topology.arms[arm_id].head
            new_cost = cost + cost_w[arm_id]
            if head == drain:
                found.append((new_cost, tuple(path + [arm_id])))
                continue
            if is_port_ref(head):
                continue
            used.add(uid)
            path.append(arm_id)
            dfs(head, new_loss, new_cost)
            path.pop()
            used.remove(uid)

    dfs(source, 0.0, 0.0)
    found.sort()
    return found


def _side_usage(topology, arms: tuple[int, ...]) -> dict[tuple[int, int], int]:
    usage: dict[tuple[int, int], int] = {}
    for arm_id in arms:
        arm = topology.arms[arm_id]
        for ref in (arm.tail, arm.head):
            if not is_vertex_ref(ref):
                continue
            v = topology.vertices[ref_index(ref)]
            side = 0 if arm_id in v.side_a else 1
            key = (v.id, side)
            usage[key] = usage.get(key, 0) + 1
    return usage


def brute_force_solve(problem: RoutingProblem, path_length_cap: int | None = None) -> SolveOutcome:
    """Exhaustive reference solver; same contract as solve, no time budget.

    ``path_length_cap`` bounds the arm count per path; None uses the
    structural maximum (a path cannot revisit arms, so it is finite anyway).
    """
    topology = problem.topology
    if path_length_cap is None:
        path_length_cap = len(topology.arms)
    if not problem.routes:
        return SolveOutcome(status=OPTIMAL, solution=build_solution(problem, {}))

    candidates: list[list[tuple[float, tuple[int, ...], dict[tuple[int, int], int]]]] = []
    for route in problem.routes:
        paths = _enumerate_paths(problem, route.source, route.drain, path_length_cap)
        if not paths:
            return SolveOutcome(status=INFEASIBLE)
        candidates.append([(cost, arms, _side_usage(topology, arms)) for cost, arms in paths])

    best_cost = float("inf")
    best: list[tuple[int, ...]] | None = None
    chosen: list[tuple[int, ...]] = []

    def compatible(
        acc: dict[tuple[int, int], int], usage: dict[tuple[int, int], int]
    ) -> dict[tuple[int, int], int] | None:
        merged = dict(acc)
        for key, count in usage.items():
            total = merged.get(key, 0) + count
            if total > 1:
                return None
            merged[key] = total
        return merged

    def combine(i: int, cost: float, acc: dict[tuple[int, int], int]) -> None:
        nonlocal best_cost, best
        if i == len(candidates):
            if cost < best_cost:
                best_cost = cost
                best = list(chosen)
            return
        for path_cost, arms, usage in candidates[i]:
            if cost + path_cost >= best_cost:
                break  # candidates are cost-sorted
            merged = compatible(acc, usage)
            if merged is None:
                continue
            chosen.append(arms)
            combine(i + 1, cost + path_cost, merged)
            chosen.pop()

    combine(0, 0.0, {})
    if best is None:
        return SolveOutcome(status=INFEASIBLE)
    raw = {route.route_id: frozenset(arms) for route, arms in zip(problem.routes, best)}
    return SolveOutcome(status=OPTIMAL, solution=build_solution(problem, raw))
