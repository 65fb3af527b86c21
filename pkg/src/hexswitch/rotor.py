"""Rotor-style scheduling: cyclic matchings driven through the solver.

A rotor switch with N logical ports does not compute traffic-aware
matchings; it rotates through the N-1 cyclic shifts i -> (i+k) mod N,
k = 1..N-1, which together connect every ordered port pair exactly once.
Here each logical port is bound to one transmit and one receive physical
port on the mesh, every matching becomes a routing problem, and the solver
is asked to realize it from an empty mesh.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Any

from .hardware import LatencyModel, estimate_config_latency
from .mesh import MeshTopology, enumerate_ports
from .routing import OPTIMAL, TIMEOUT, UNUSED, RoutingProblem, SolveOutcome, make_problem
from .verify import verify_matching_semantics


class BindingError(ValueError):
    """Requested radix does not fit on the mesh."""


POLICIES = ("spread", "corners")


@dataclass(frozen=True)
class Matching:
    k: int
    pairs: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class PortBinding:
    index: int
    tx: str
    rx: str


@dataclass(frozen=True)
class RotorSchedule:
    radix: int
    policy: str
    bindings: tuple[PortBinding, ...]
    matchings: tuple[Matching, ...]


@dataclass(frozen=True)
class MatchingOutcome:
    k: int
    status: str
    objective: float | None
    puc_count: int | None
    latency_ms: float | None
    solve_ms: float


@dataclass(frozen=True)
class ScheduleResult:
    radix: int
    policy: str
    matchings: tuple[MatchingOutcome, ...]

    @property
    def feasible(self) -> bool:
        return all(m.status == OPTIMAL for m in self.matchings)


def generate_rotor_matchings(radix: int) -> list[Matching]:
    """The N-1 shift matchings; k=0 (everyone to themselves) is no service."""
    if radix < 2:
        raise ValueError(f"radix must be at least 2, got {radix}")
    return [
        Matching(k=k, pairs=tuple((i, (i + k) % radix) for i in range(radix)))
        for k in range(1, radix)
    ]


def bind_ports(topology: MeshTopology, radix: int, policy: str = "spread") -> tuple[PortBinding, ...]:
    """Deterministically pick 2N distinct physical ports for N logical ones.

    spread: N host positions evenly spaced along the canonical boundary
    order, each host plugging tx and rx into the adjacent port pair at its
    position (like a fiber pair into neighbouring couplers).  corners: tx
    ports from the front of the order (top left of the device), rx ports
    from the back (bottom right).
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown placement policy {policy!r}; known: {', '.join(POLICIES)}")
    if radix < 1:
        raise ValueError(f"radix must be positive, got {radix}")
    ports = enumerate_ports(topology)
    if 2 * radix > len(ports):
        raise BindingError(f"radix {radix} needs {2 * radix} ports but the mesh exposes {len(ports)}")
    if policy == "spread":
        # Host h sits at boundary offset h*P/N; spacing >= 2 whenever
        # 2N <= P, so the pairs never collide.
        bases = [h * len(ports) // radix for h in range(radix)]
        return tuple(PortBinding(i, ports[bases[i]], ports[bases[i] + 1]) for i in range(radix))
    return tuple(PortBinding(i, ports[i], ports[len(ports) - 1 - i]) for i in range(radix))


def make_schedule(topology: MeshTopology, radix: int, policy: str = "spread") -> RotorSchedule:
    return RotorSchedule(
        radix=radix,
        policy=policy,
        bindings=bind_ports(topology, radix, policy),
        matchings=tuple(generate_rotor_matchings(radix)),
    )


def matching_problem(
    topology: MeshTopology,
    schedule: RotorSchedule,
    matching: Matching,
    max_route_length: float | None = None,
) -> RoutingProblem:
    routes = [
        (i, schedule.bindings[i].tx, schedule.bindings[j].rx) for i, j in matching.pairs
    ]
    return make_problem(topology, routes, max_route_length=max_route_length)


def run_schedule(
    topology: MeshTopology,
    schedule: RotorSchedule,
    backend: str = "search",
    budget_ms: float | None = None,
    latency_model: LatencyModel | None = None,
    max_route_length: float | None = None,
) -> ScheduleResult:
    """Solve every matching independently and collect the outcomes.

    A failed or timed-out matching never aborts the cycle; it is recorded
    and the next matching still runs.
    """
    from .solver import solve

    model = latency_model or LatencyModel()
    outcomes = []
    for matching in schedule.matchings:
        problem = matching_problem(topology, schedule, matching, max_route_length)
        started = time.monotonic()
        outcome = solve(problem, time_budget_ms=budget_ms, backend=backend)
        solve_ms = (time.monotonic() - started) * 1000.0
        outcomes.append(_record(problem, matching, outcome, solve_ms, model))
    return ScheduleResult(radix=schedule.radix, policy=schedule.policy, matchings=tuple(outcomes))


def _record(
    problem: RoutingProblem,
    matching: Matching,
    outcome: SolveOutcome,
    solve_ms: float,
    model: LatencyModel,
) -> MatchingOutcome:
    if not outcome.is_optimal:
        return MatchingOutcome(matching.k, outcome.status, None, None, None, solve_ms)
    report = verify_matching_semantics(problem, outcome.solution)
    if not report.ok:
        # solve() already verifies; a failure here means a solver bug.
        raise RuntimeError(f"matching k={matching.k} produced an unverifiable solution: {report.violations[0]}")
    pucs = sum(1 for state in outcome.solution.puc_states.values() if state != UNUSED)
    return MatchingOutcome(
        k=matching.k,
        status=outcome.status,
        objective=outcome.solution.objective_value,
        puc_count=pucs,
        latency_ms=estimate_config_latency(model, pucs),
        solve_ms=solve_ms,
    )


# Per-candidate verdicts for radix scans.
FEASIBLE = "feasible"
INFEASIBLE_RADIX = "infeasible"
UNKNOWN = "unknown"  # at least one matching timed out, none proved infeasible
BINDING_INFEASIBLE = "binding_infeasible"


@dataclass(frozen=True)
class RadixProbe:
    radix: int
    verdict: str
    result: ScheduleResult | None
    failing_k: int | None = None


@dataclass(frozen=True)
class RadixScan:
    probes: tuple[RadixProbe, ...]

    @property
    def max_feasible(self) -> int | None:
        feasible = [p.radix for p in self.probes if p.verdict == FEASIBLE]
        return max(feasible) if feasible else None


def max_feasible_radix(
    topology: MeshTopology,
    policy: str,
    candidates: list[int],
    backend: str = "search",
    budget_ms: float | None = None,
    latency_model: LatencyModel | None = None,
    max_route_length: float | None = None,
) -> RadixScan:
    """Probe each candidate radix with a full schedule run.

    A candidate is feasible only if every matching solves to optimality.  A
    timeout makes the verdict "unknown": the schedule was neither realized
    nor refuted within the budget.
    """
    if not candidates:
        raise ValueError("need at least one candidate radix")
    probes = []
    for radix in candidates:
        try:
            schedule = make_schedule(topology, radix, policy)
        except BindingError:
            probes.append(RadixProbe(radix, BINDING_INFEASIBLE, None))
            continue
        result = run_schedule(
            topology,
            schedule,
            backend=backend,
            budget_ms=budget_ms,
            latency_model=latency_model,
            max_route_length=max_route_length,
        )
        failing = next((m.k for m in result.matchings if m.status != OPTIMAL), None)
        if result.feasible:
            verdict = FEASIBLE
        elif any(m.status == TIMEOUT for m in result.matchings) and all(
            m.status in (OPTIMAL, TIMEOUT) for m in result.matchings
        ):
            verdict = UNKNOWN
        else:
            verdict = INFEASIBLE_RADIX
        probes.append(RadixProbe(radix, verdict, result, failing))
    return RadixScan(tuple(probes))


# Document forms.

def export_schedule(schedule: RotorSchedule) -> dict[str, Any]:
    return {
        "radix": schedule.radix,
        "policy": schedule.policy,
        "bindings": [{"index": b.index, "tx": b.tx, "rx": b.rx} for b in schedule.bindings],
        "matchings": [{"k": m.k, "pairs": [list(p) for p in m.pairs]} for m in schedule.matchings],
    }


def import_schedule(doc: dict[str, Any]) -> RotorSchedule:
    try:
        bindings = tuple(
            PortBinding(b["index"], b["tx"], b["rx"]) for b in doc["bindings"]
        )
        matchings = tuple(
            Matching(m["k"], tuple((i, j) for i, j in m["pairs"])) for m in doc["matchings"]
        )
        return RotorSchedule(doc["radix"], doc["policy"], bindings, matchings)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed schedule document: missing or bad field {exc}") from exc


def export_schedule_result(result: ScheduleResult) -> dict[str, Any]:
    return {
        "radix": result.radix,
        "policy": result.policy,
        "feasible": result.feasible,
        "matchings": [
            {
                "k": m.k,
                "status": m.status,
                "objective": m.objective,
                "puc_count": m.puc_count,
                "latency_ms": m.latency_ms,
                "solve_ms": m.solve_ms,
            }
            for m in result.matchings
        ],
    }
