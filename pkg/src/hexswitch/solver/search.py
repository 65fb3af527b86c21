"""Built-in exact backend: depth-first branch and bound over directed arms.

The search assigns routes one at a time, growing each route's path arm by
arm.  Side-capacity bookkeeping is the only shared state: a route entering a
junction vertex consumes the entry side and the exit side, which is exactly
the per-side capacity of one arm, so any interleaving the search reaches is
feasible and any feasible assignment (reduced to simple paths) is reachable.

Pruning uses admissible lower bounds precomputed per route by a backward
Dijkstra over arms: g_cost[a] is the cheapest way to finish the route after
committing to arm a, ignoring other routes, and g_loss[a] the least
additional length.  Candidates at each step are tried cheapest-first, so the
first completed assignment is already good and the cost prune can stop a
candidate loop early.  Bounds never overestimate, hence the search is exact;
it ends with the optimum, a proof of infeasibility, or a timeout.
"""

from __future__ import annotations

import heapq
import sys
import time

from ..mesh import MeshTopology, is_vertex_ref, ref_index, vertex_ref
from ..routing import (
    INFEASIBLE,
    OPTIMAL,
    TIMEOUT,
    RoutingProblem,
    SolveOutcome,
    build_solution,
)

_INF = float("inf")


class _Deadline(Exception):
    pass


class _SideGraph:
    """Per-vertex side structure of a topology, in dense arrays."""

    def __init__(self, topology: MeshTopology):
        n_arms = len(topology.arms)
        self.tail_side = [-1] * n_arms  # side index at tail vertex, -1 if tail is a port
        self.head_side = [-1] * n_arms
        self.out_by_side: list[tuple[list[int], list[int]]] = []
        self.in_by_side: list[tuple[list[int], list[int]]] = []
        for v in topology.vertices:
            ref = vertex_ref(v.id)
            outs: tuple[list[int], list[int]] = ([], [])
            ins: tuple[list[int], list[int]] = ([], [])
            for side, arm_ids in ((0, v.side_a), (1, v.side_b)):
                for a in arm_ids:
                    arm = topology.arms[a]
                    if arm.tail == ref:
                        self.tail_side[a] = side
                        outs[side].append(a)
                    if arm.head == ref:
                        self.head_side[a] = side
                        ins[side].append(a)
            self.out_by_side.append(outs)
            self.in_by_side.append(ins)


def _suffix_bounds(
    topology: MeshTopology, graph: _SideGraph, drain: str, weights: tuple[float, ...]
) -> list[float]:
    """g[a] = least total weight of a legal continuation that starts by taking
    arm a and ends at the drain, or inf if none exists."""
    g = [_INF] * len(topology.arms)
    heap: list[tuple[float, int]] = []
    for a in topology.arms_by_head.get(drain, ()):
        g[a] = weights[a]
        heapq.heappush(heap, (g[a], a))
    while heap:
        d, a = heapq.heappop(heap)
        if d > g[a]:
            continue
        tail = topology.arms[a].tail
        if not is_vertex_ref(tail):
            continue  # paths may not continue backward through a port
        v = ref_index(tail)
        # Predecessor b hands over to a iff b enters v on the side opposite
        # a's own side at v.
        for b in graph.in_by_side[v][1 - graph.tail_side[a]]:
            nd = weights[b] + d
            if nd < g[b]:
                g[b] = nd
                heapq.heappush(heap, (nd, b))
    return g


def solve_search(problem: RoutingProblem, time_budget_ms: float | None) -> SolveOutcome:
    topology = problem.topology
    arms = topology.arms
    cost_w = problem.cost_weights
    loss_w = problem.loss_weights
    budget = problem.max_route_length
    routes = problem.routes
    n_vertices = len(topology.vertices)

    deadline = None if time_budget_ms is None else time.monotonic() + time_budget_ms / 1000.0
    graph = _SideGraph(topology)

    g_cost: list[list[float]] = []
    g_loss: list[list[float]] = []
    start_arms: list[list[int]] = []
    route_lb: list[float] = []
    for route in routes:
        gc = _suffix_bounds(topology, graph, route.drain, cost_w)
        gl = _suffix_bounds(topology, graph, route.drain, loss_w)
        starts = sorted(topology.arms_by_tail.get(route.source, ()), key=lambda a: (gc[a], a))
        feasible_starts = [a for a in starts if gl[a] <= budget]
        if not feasible_starts:
            # No path at all, or none within the length budget; conflicts can
            # only make it worse, so the whole problem is infeasible.
            return SolveOutcome(status=INFEASIBLE)
        g_cost.append(gc)
        g_loss.append(gl)
        start_arms.append(feasible_starts)
        route_lb.append(min(gc[a] for a in feasible_starts))

    suffix_lb = [0.0] * (len(routes) + 1)
    for i in range(len(routes) - 1, -1, -1):
        suffix_lb[i] = suffix_lb[i + 1] + route_lb[i]

    # Candidate arms out of each (vertex, side), sorted per route by its own
    # completion bound so candidate loops can break on the first cost prune.
    out_sorted: list[list[tuple[list[int], list[int]]]] = []
    for i in range(len(routes)):
        gc = g_cost[i]
        per_vertex = []
        for v in range(n_vertices):
            outs = graph.out_by_side[v]
            per_vertex.append(
                (
                    sorted(outs[0], key=lambda a: (gc[a], a)),
                    sorted(outs[1], key=lambda a: (gc[a], a)),
                )
            )
        out_sorted.append(per_vertex)

    side_used = bytearray(2 * n_vertices)
    stacks: list[list[int]] = [[] for _ in routes]
    best_cost = _INF
    best_assignment: list[list[int]] | None = None
    ticks = 0

    def tick() -> None:
        nonlocal ticks
        ticks += 1
        if deadline is not None and ticks & 0x7F == 0 and time.monotonic() > deadline:
            raise _Deadline

    head_side = graph.head_side
    drains = [r.drain for r in routes]

    def place_route(i: int, total_cost: float) -> None:
        nonlocal best_cost, best_assignment
        if i == len(routes):
            if total_cost < best_cost:
                best_cost = total_cost
                best_assignment = [list(s) for s in stacks]
            return
        tick()
        gc = g_cost[i]
        rest = suffix_lb[i + 1]
        for a in start_arms[i]:
            if total_cost + gc[a] + rest >= best_cost:
                break
            try_arm(i, a, total_cost, 0.0, rest)

    def try_arm(i: int, a: int, total_cost: float, route_loss: float, rest: float) -> None:
        new_cost = total_cost + cost_w[a]
        new_loss = route_loss + loss_w[a]
        head = arms[a].head
        if head == drains[i]:
            stacks[i].append(a)
            place_route(i + 1, new_cost)
            stacks[i].pop()
            return
        if not is_vertex_ref(head):
            return  # some other port: dead end
        tick()
        v = ref_index(head)
        enter = 2 * v + head_side[a]
        leave = enter ^ 1
        if side_used[enter] or side_used[leave]:
            return
        side_used[enter] = side_used[leave] = 1
        stacks[i].append(a)
        gc = g_cost[i]
        gl = g_loss[i]
        for b in out_sorted[i][v][1 - head_side[a]]:
            if new_cost + gc[b] + rest >= best_cost:
                break
            if new_loss + gl[b] > budget:
                continue
            try_arm(i, b, new_cost, new_loss, rest)
        stacks[i].pop()
        side_used[enter] = side_used[leave] = 0

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 4 * n_vertices + 1000))
    try:
        place_route(0, 0.0)
    except _Deadline:
        return SolveOutcome(status=TIMEOUT, budget_ms=time_budget_ms)
    finally:
        sys.setrecursionlimit(old_limit)

    if best_assignment is None:
        return SolveOutcome(status=INFEASIBLE)
    raw = {route.route_id: frozenset(path) for route, path in zip(routes, best_assignment)}
    return SolveOutcome(status=OPTIMAL, solution=build_solution(problem, raw))
