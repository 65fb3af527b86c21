"""Exact solver backends behind a single entry point.

``solve`` dispatches to a named backend.  The built-in "search" backend is a
self-contained branch-and-bound and the default; "milp" formulates the same
constraints as a mixed-integer program and hands it to scipy/HiGHS.  Both are
exact: they return an optimal assignment, a proof of infeasibility, or an
explicit timeout, never a best-effort answer.
"""

from __future__ import annotations

from ..routing import (
    OPTIMAL,
    RoutingProblem,
    SolveOutcome,
    build_solution,
)


class SolverError(RuntimeError):
    """A backend produced output that failed its own exactness checks."""


def available_backends() -> list[str]:
    return ["search", "milp"]


def solve(
    problem: RoutingProblem,
    time_budget_ms: float | None = None,
    backend: str = "search",
) -> SolveOutcome:
    """Solve the routing problem exactly with the named backend.

    ``time_budget_ms`` of None means no limit.  An Optimal outcome has been
    reduced to simple paths and re-checked by the independent verifier before
    it is returned.
    """
    if not problem.routes:
        return SolveOutcome(status=OPTIMAL, solution=build_solution(problem, {}))

    if backend == "search":
        from .search import solve_search

        outcome = solve_search(problem, time_budget_ms)
    elif backend == "milp":
        from .milp import solve_milp

        outcome = solve_milp(problem, time_budget_ms)
    else:
        raise ValueError(f"unknown backend {backend!r}; available: {', '.join(available_backends())}")

    if outcome.is_optimal:
        from ..verify import verify

        report = verify(problem, outcome.solution)
        if report.violations:
            first = report.violations[0]
            raise SolverError(
                f"backend {backend!r} returned a solution the verifier rejects: {first.rule}: {first.detail}"
            )
    return outcome
