"""Experiment harness: radix scaling and mesh scaling, exported as CSV.

CSV is the deliverable; schemas are fixed and documented in the README.
Radix rows:     experiment,height,width,radix,matching,status,objective,solve_ms,latency_ms
Meshscale rows: width,height,n_routes,status,objective,solve_ms

Wall time is measured with a monotonic clock around the solve call only;
mesh construction and verification are excluded.  Row order is sorted by
instance key, never by completion time, so reruns diff cleanly.
"""

from __future__ import annotations

import io
import time
from dataclasses import dataclass

from .hardware import LatencyModel
from .mesh import build_hex_mesh
from .rotor import (
    BINDING_INFEASIBLE,
    BindingError,
    RadixScan,
    bind_ports,
    max_feasible_radix,
)
from .routing import OPTIMAL, make_problem
from .solver import solve

RADIX_COLUMNS = ("experiment", "height", "width", "radix", "matching", "status", "objective", "solve_ms", "latency_ms")
MESHSCALE_COLUMNS = ("width", "height", "n_routes", "status", "objective", "solve_ms")


@dataclass(frozen=True)
class BenchRecord:
    experiment: str
    height: int
    width: int
    scale: int  # radix for the radix experiment, route count for meshscale
    matching: int | None
    status: str
    objective: float | None
    solve_ms: float | None
    latency_ms: float | None


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def _to_csv(columns: tuple[str, ...], rows: list[tuple]) -> str:
    out = io.StringIO()
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(_cell(v) for v in row) + "\n")
    return out.getvalue()


def bench_radix(
    height: int,
    width: int,
    radices: list[int],
    budget_ms: float | None = None,
    policy: str = "spread",
    backend: str = "search",
    latency_model: LatencyModel | None = None,
    max_route_length: float | None = None,
) -> tuple[list[BenchRecord], RadixScan | None]:
    """One record per (radix, matching); binding failures give a single row."""
    records: list[BenchRecord] = []
    if not radices:
        return records, None
    topology = build_hex_mesh(height, width)
    scan = max_feasible_radix(
        topology,
        policy,
        sorted(radices),
        backend=backend,
        budget_ms=budget_ms,
        latency_model=latency_model,
        max_route_length=max_route_length,
    )
    for probe in scan.probes:
        if probe.result is None:
            records.append(
                BenchRecord("radix", height, width, probe.radix, None, BINDING_INFEASIBLE, None, None, None)
            )
            continue
        for m in probe.result.matchings:
            records.append(
                BenchRecord("radix", height, width, probe.radix, m.k, m.status, m.objective, m.solve_ms, m.latency_ms)
            )
    records.sort(key=lambda r: (r.scale, -1 if r.matching is None else r.matching))
    return records, scan


def radix_records_to_csv(records: list[BenchRecord]) -> str:
    rows = [
        (r.experiment, r.height, r.width, r.scale, r.matching, r.status, r.objective, r.solve_ms, r.latency_ms)
        for r in records
    ]
    return _to_csv(RADIX_COLUMNS, rows)


def bench_meshscale(
    sizes: list[int],
    route_counts: list[int] = (1, 2, 4),
    budget_ms: float | None = None,
    backend: str = "search",
) -> list[BenchRecord]:
    """Square meshes, n parallel routes from the top-left ports to the
    bottom-right ones (corners placement), one row per (size, n)."""
    records: list[BenchRecord] = []
    for size in sorted(sizes):
        topology = build_hex_mesh(size, size)
        for n in sorted(route_counts):
            try:
                bindings = bind_ports(topology, n, "corners")
            except BindingError:
                records.append(BenchRecord("meshscale", size, size, n, None, BINDING_INFEASIBLE, None, None, None))
                continue
            problem = make_problem(topology, [(b.index, b.tx, b.rx) for b in bindings])
            started = time.monotonic()
            outcome = solve(problem, time_budget_ms=budget_ms, backend=backend)
            solve_ms = (time.monotonic() - started) * 1000.0
            objective = outcome.solution.objective_value if outcome.status == OPTIMAL else None
            records.append(BenchRecord("meshscale", size, size, n, None, outcome.status, objective, solve_ms, None))
    return records


def meshscale_records_to_csv(records: list[BenchRecord]) -> str:
    rows = [(r.width, r.height, r.scale, r.status, r.objective, r.solve_ms) for r in records]
    return _to_csv(MESHSCALE_COLUMNS, rows)


def make_meshscale_problem(size: int, n_routes: int):
    """The exact problem a meshscale row solves; used to re-verify rows."""
    topology = build_hex_mesh(size, size)
    bindings = bind_ports(topology, n_routes, "corners")
    return make_problem(topology, [(b.index, b.tx, b.rx) for b in bindings])


__all__ = [
    "BenchRecord",
    "RADIX_COLUMNS",
    "MESHSCALE_COLUMNS",
    "bench_radix",
    "bench_meshscale",
    "radix_records_to_csv",
    "meshscale_records_to_csv",
    "make_meshscale_problem",
]
