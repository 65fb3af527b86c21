"""Benchmark harness records and CSV schemas."""

import pytest

from hexswitch.bench import (
    MESHSCALE_COLUMNS,
    RADIX_COLUMNS,
    BenchRecord,
    bench_meshscale,
    bench_radix,
    make_meshscale_problem,
    meshscale_records_to_csv,
    radix_records_to_csv,
)
from hexswitch.rotor import BindingError
from hexswitch.routing import OPTIMAL
from hexswitch.solver import solve
from hexswitch.verify import verify


def test_column_schemas_are_pinned():
    assert RADIX_COLUMNS == (
        "experiment", "height", "width", "radix", "matching",
        "status", "objective", "solve_ms", "latency_ms",
    )
    assert MESHSCALE_COLUMNS == ("width", "height", "n_routes", "status", "objective", "solve_ms")


def test_empty_radix_list_yields_header_only():
    records, scan = bench_radix(1, 1, [])
    assert records == [] and scan is None
    assert radix_records_to_csv([]) == ",".join(RADIX_COLUMNS) + "\n"


def test_smallest_radix_experiment():
    records, scan = bench_radix(1, 1, [2])
    assert scan.max_feasible == 2
    (rec,) = records
    assert (rec.experiment, rec.height, rec.width, rec.scale, rec.matching) == ("radix", 1, 1, 2, 1)
    assert rec.status == OPTIMAL
    assert rec.objective == 6.0
    assert rec.latency_ms == 283.134
    assert rec.solve_ms >= 0.0
    line = radix_records_to_csv(records).splitlines()[1]
    assert line.startswith("radix,1,1,2,1,optimal,6,")
    assert line.endswith(",283.134")


def test_four_by_four_scan_rows():
    records, scan = bench_radix(4, 4, [2, 3, 4, 6, 19])
    assert scan.max_feasible == 4
    key_rows = [(r.scale, r.matching, r.status, r.objective) for r in records]
    assert key_rows == [
        (2, 1, "optimal", 14.0),
        (3, 1, "optimal", 18.0),
        (3, 2, "infeasible", None),
        (4, 1, "optimal", 35.0),
        (4, 2, "optimal", 35.0),
        (4, 3, "optimal", 41.0),
        (6, 1, "infeasible", None),
        (6, 2, "optimal", 42.0),
        (6, 3, "infeasible", None),
        (6, 4, "infeasible", None),
        (6, 5, "infeasible", None),
        (19, None, "binding_infeasible", None),
    ]
    csv = radix_records_to_csv(records)
    assert csv.splitlines()[-1] == "radix,4,4,19,,binding_infeasible,,,"


def test_rows_are_sorted_regardless_of_input_order():
    a, _ = bench_radix(1, 1, [4, 2, 3])
    b, _ = bench_radix(1, 1, [2, 3, 4])
    assert [(r.scale, r.matching, r.status) for r in a] == [(r.scale, r.matching, r.status) for r in b]


def test_meshscale_small_grid():
    records = bench_meshscale([1, 2])
    rows = [(r.width, r.height, r.scale, r.status, r.objective) for r in records]
    assert rows == [
        (1, 1, 1, "optimal", 3.0),
        (1, 1, 2, "optimal", 6.0),
        (1, 1, 4, "infeasible", None),
        (2, 2, 1, "optimal", 7.0),
        (2, 2, 2, "optimal", 14.0),
        (2, 2, 4, "optimal", 24.0),
    ]
    assert all(r.solve_ms is None or r.solve_ms >= 0.0 for r in records)


def test_meshscale_records_binding_failures_in_row():
    records = bench_meshscale([1], route_counts=[7])
    (rec,) = records
    assert rec.status == "binding_infeasible"
    assert rec.objective is None and rec.solve_ms is None
    assert meshscale_records_to_csv(records).splitlines()[1] == "1,1,7,binding_infeasible,,"


def test_meshscale_problem_rebuild_matches_rows():
    # The published row must be reproducible from scratch.
    problem = make_meshscale_problem(2, 2)
    out = solve(problem)
    assert out.status == OPTIMAL
    assert out.solution.objective_value == 14.0
    assert verify(problem, out.solution).ok
    with pytest.raises(BindingError):
        make_meshscale_problem(1, 7)


def test_csv_float_formatting():
    rec = BenchRecord("radix", 1, 1, 2, None, "x", 1234.5678, None, 0.0001234567)
    line = radix_records_to_csv([rec]).splitlines()[1]
    assert line == "radix,1,1,2,,x,1234.57,,0.000123457"
