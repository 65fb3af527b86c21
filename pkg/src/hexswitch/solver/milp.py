"""Optional exact backend formulating the routing problem as a MIP.

One binary variable per (route, directed arm).  Port exclusivity is encoded
as variable bounds (a route may only touch arms at its own source and drain
ports), the rest as sparse linear constraints.  The model is handed to
scipy.optimize.milp, i.e. HiGHS branch-and-cut.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

from ..mesh import is_port_ref, vertex_ref
from ..routing import (
    INFEASIBLE,
    OPTIMAL,
    TIMEOUT,
    RoutingProblem,
    SolveOutcome,
    build_solution,
)


def solve_milp(problem: RoutingProblem, time_budget_ms: float | None) -> SolveOutcome:
    from . import SolverError

    topology = problem.topology
    routes = problem.routes
    n_arms = len(topology.arms)
    n_routes = len(routes)
    n_vars = n_routes * n_arms

    def var(route_idx: int, arm_id: int) -> int:
        return route_idx * n_arms + arm_id

    upper = np.ones(n_vars)
    for i, route in enumerate(routes):
        for arm in topology.arms:
            if is_port_ref(arm.tail) and arm.tail != route.source:
                upper[var(i, arm.id)] = 0.0
            if is_port_ref(arm.head) and arm.head != route.drain:
                upper[var(i, arm.id)] = 0.0

    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    lo: list[float] = []
    hi: list[float] = []

    def add_row(entries: list[tuple[int, float]], lower: float, upper_: float) -> None:
        row = len(lo)
        for col, val in entries:
            rows.append(row)
            cols.append(col)
            vals.append(val)
        lo.append(lower)
        hi.append(upper_)

    for i, route in enumerate(routes):
        # Per-route length budget.
        add_row(
            [(var(i, a), problem.loss_weights[a]) for a in range(n_arms)],
            -np.inf,
            problem.max_route_length,
        )
        # Unit flow out of the source and into the drain.
        add_row([(var(i, a), 1.0) for a in topology.arms_by_tail.get(route.source, ())], 1.0, 1.0)
        add_row([(var(i, a), 1.0) for a in topology.arms_by_head.get(route.drain, ())], 1.0, 1.0)
        # Flow conservation at every junction vertex.
        for v in topology.vertices:
            ref = vertex_ref(v.id)
            entries = [(var(i, a), 1.0) for a in topology.arms_by_head.get(ref, ())]
            entries += [(var(i, a), -1.0) for a in topology.arms_by_tail.get(ref, ())]
            add_row(entries, 0.0, 0.0)

    # Side capacity: over all routes and both directions, at most one arm per
    # vertex side.
    for v in topology.vertices:
        for side_arms in (v.side_a, v.side_b):
            entries = [(var(i, a), 1.0) for i in range(n_routes) for a in side_arms]
            add_row(entries, -np.inf, 1.0)

    matrix = sparse.csc_matrix((vals, (rows, cols)), shape=(len(lo), n_vars))
    objective = np.tile(np.asarray(problem.cost_weights, dtype=float), n_routes)

    options: dict[str, float] = {}
    if time_budget_ms is not None:
        options["time_limit"] = time_budget_ms / 1000.0
    result = milp(
        c=objective,
        constraints=LinearConstraint(matrix, np.array(lo), np.array(hi)),
        integrality=np.ones(n_vars),
        bounds=Bounds(np.zeros(n_vars), upper),
        options=options,
    )

    if result.status == 0:
        raw = {}
        for i, route in enumerate(routes):
            x = result.x[i * n_arms : (i + 1) * n_arms]
            raw[route.route_id] = frozenset(int(a) for a in np.nonzero(x > 0.5)[0])
        return SolveOutcome(status=OPTIMAL, solution=build_solution(problem, raw))
    if result.status == 1:
        return SolveOutcome(status=TIMEOUT, budget_ms=time_budget_ms)
    if result.status == 2:
        return SolveOutcome(status=INFEASIBLE)
    raise SolverError(f"MIP backend failed: status {result.status}: {result.message}")
