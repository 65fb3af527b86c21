"""HTTP service tests.

Every endpoint is exercised through FastAPI's TestClient: happy paths
against frozen expectations, domain errors as 422s whose detail names
the offending field or invariant, and the request envelopes' own
validation (bounds, required fields, unknown keys rejected).
"""

from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from hexswitch import __version__
from hexswitch.meshdoc import export_mesh
from hexswitch.routing import UNUSED, export_problem, make_problem
from hexswitch.service import create_app


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


def _problem_doc(topology, routes, **kwargs):
    return export_problem(make_problem(topology, routes, **kwargs))


# -- health ------------------------------------------------------------------


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok", "version": __version__}


# -- mesh --------------------------------------------------------------------


def test_mesh_build_counts(client):
    resp = client.post("/mesh/build", json={"height": 2, "width": 2})
    assert resp.status_code == 200
    doc = resp.json()
    assert doc["height"] == 2 and doc["width"] == 2
    assert len(doc["pucs"]) == 19
    assert len(doc["vertices"]) == 28
    assert len(doc["ports"]) == 20
    assert len(doc["arms"]) == 152


def test_mesh_build_rejects_zero_height(client):
    resp = client.post("/mesh/build", json={"height": 0, "width": 1})
    assert resp.status_code == 422


def test_mesh_build_rejects_unknown_field(client):
    resp = client.post("/mesh/build", json={"height": 1, "width": 1, "bogus": 1})
    assert resp.status_code == 422


def test_mesh_info(client, mesh1):
    resp = client.post("/mesh/info", json={"mesh": export_mesh(mesh1)})
    assert resp.status_code == 200
    assert resp.json() == {
        "height": 1,
        "width": 1,
        "pucs": 6,
        "vertices": 6,
        "ports": 12,
        "arms": 48,
        "port_order": [f"p{i}" for i in range(12)],
    }


def test_mesh_validate_ok(client, mesh1):
    resp = client.post("/mesh/validate", json={"mesh": export_mesh(mesh1)})
    assert resp.status_code == 200
    assert resp.json() == {"ok": True, "invariant": None, "detail": None}


def test_mesh_validate_names_broken_invariant(client, mesh1):
    doc = export_mesh(mesh1)
    doc["arms"] = doc["arms"][:-1]
    resp = client.post("/mesh/validate", json={"mesh": doc})
    assert resp.status_code == 200
    body = resp.json()
    assert body["ok"] is False
    assert body["invariant"] == "arm_count"
    assert body["detail"]


def test_mesh_validate_wrong_version(client, mesh1):
    doc = export_mesh(mesh1)
    doc["version"] = 99
    body = client.post("/mesh/validate", json={"mesh": doc}).json()
    assert body["ok"] is False
    assert body["invariant"] == "document_version"


# -- solve -------------------------------------------------------------------


def test_solve_optimal(client, mesh1):
    doc = _problem_doc(mesh1, [(0, "p0", "p3")])
    resp = client.post("/solve", json={"problem": doc})
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "optimal"
    assert body["objective"] == 1.0
    assert body["routes"] == [{"id": 0, "arms": [33]}]
    assert {"puc": 4, "state": "bar"} in body["puc_states"]
    assert body["budget_ms"] is None


def test_solve_infeasible_is_an_answer(client, mesh1):
    doc = _problem_doc(mesh1, [(0, "p0", "p5")], max_route_length=48)
    resp = client.post("/solve", json={"problem": doc, "backend": "search"})
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "infeasible"
    assert body["objective"] is None
    assert body["routes"] == []


def test_solve_timeout_reports_budget(client):
    from hexswitch.bench import make_meshscale_problem

    problem = make_meshscale_problem(5, 4)
    resp = client.post(
        "/solve", json={"problem": export_problem(problem), "budget_ms": 1.0}
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "timeout"
    assert body["budget_ms"] == 1.0


def test_solve_malformed_problem_is_422(client, mesh1):
    resp = client.post("/solve", json={"problem": {"mesh": export_mesh(mesh1)}})
    assert resp.status_code == 422
    assert "routes" in str(resp.json()["detail"])


def test_solve_unknown_backend_is_422(client, mesh1):
    doc = _problem_doc(mesh1, [(0, "p0", "p3")])
    resp = client.post("/solve", json={"problem": doc, "backend": "nosuch"})
    assert resp.status_code == 422
    assert "nosuch" in str(resp.json()["detail"])


def test_solve_rejects_nonpositive_budget(client, mesh1):
    doc = _problem_doc(mesh1, [(0, "p0", "p3")])
    resp = client.post("/solve", json={"problem": doc, "budget_ms": 0})
    assert resp.status_code == 422


# -- verify ------------------------------------------------------------------


def test_verify_round_trip_clean(client, mesh1):
    doc = _problem_doc(mesh1, [(0, "p0", "p3")])
    solution = client.post("/solve", json={"problem": doc}).json()
    resp = client.post("/verify", json={"problem": doc, "solution": solution})
    assert resp.status_code == 200
    assert resp.json() == {"ok": True, "violations": []}


def test_verify_flags_budget_overrun(client, mesh1):
    doc = _problem_doc(mesh1, [(0, "p0", "p3")])
    solution = client.post("/solve", json={"problem": doc}).json()
    tight = dict(doc, L=0.5)
    body = client.post("/verify", json={"problem": tight, "solution": solution}).json()
    assert body["ok"] is False
    assert [v["rule"] for v in body["violations"]] == ["Eq1"]
    assert body["violations"][0]["entity"] == "route:0"


def _pass_through_solution(topology):
    arms = (33, 36, 46)
    states = {p.id: UNUSED for p in topology.pucs}
    for arm_id in arms:
        arm = topology.arms[arm_id]
        states[arm.puc] = arm.kind
    return {
        "status": "optimal",
        "objective": 3.0,
        "routes": [{"id": 0, "arms": list(arms)}],
        "puc_states": [{"puc": p, "state": s} for p, s in sorted(states.items())],
    }


def test_verify_matching_semantics_flag(client, mesh1):
    # A clean matching passes the strict check; a route that runs through
    # a foreign port is rejected with Eq6 naming that port.
    doc = _problem_doc(mesh1, [(0, "p0", "p3"), (1, "p4", "p8")])
    solution = client.post("/solve", json={"problem": doc}).json()
    clean = client.post(
        "/verify",
        json={"problem": doc, "solution": solution, "matching_semantics": True},
    ).json()
    assert clean == {"ok": True, "violations": []}

    doc = _problem_doc(mesh1, [(0, "p0", "p5")], max_route_length=17)
    strict = client.post(
        "/verify",
        json={
            "problem": doc,
            "solution": _pass_through_solution(mesh1),
            "matching_semantics": True,
        },
    ).json()
    assert strict["ok"] is False
    assert all(v["rule"] == "Eq6" for v in strict["violations"])
    assert any(v["entity"] == "p3" for v in strict["violations"])


def test_verify_malformed_solution_is_422(client, mesh1):
    doc = _problem_doc(mesh1, [(0, "p0", "p3")])
    resp = client.post(
        "/verify", json={"problem": doc, "solution": {"routes": [{"id": 0}]}}
    )
    assert resp.status_code == 422
    assert "arms" in str(resp.json()["detail"])


# -- rotor -------------------------------------------------------------------


def test_rotor_generate(client):
    resp = client.post("/rotor/generate", json={"height": 1, "width": 1, "radix": 2})
    assert resp.status_code == 200
    doc = resp.json()
    assert doc["radix"] == 2
    assert doc["policy"] == "spread"
    assert doc["bindings"] == [
        {"index": 0, "tx": "p0", "rx": "p1"},
        {"index": 1, "tx": "p6", "rx": "p7"},
    ]
    assert len(doc["matchings"]) == 1
    assert doc["matchings"][0]["k"] == 1
    assert sorted(doc["matchings"][0]["pairs"]) == [[0, 1], [1, 0]]


def test_rotor_generate_rejects_oversubscription(client):
    resp = client.post("/rotor/generate", json={"height": 1, "width": 1, "radix": 7})
    assert resp.status_code == 422
    assert "needs 14 ports" in str(resp.json()["detail"])


def test_rotor_run_with_radix(client):
    resp = client.post("/rotor/run", json={"height": 1, "width": 1, "radix": 2})
    assert resp.status_code == 200
    doc = resp.json()
    assert doc["radix"] == 2
    assert doc["feasible"] is True
    assert len(doc["matchings"]) == 1
    row = doc["matchings"][0]
    assert row["status"] == "optimal"
    assert row["objective"] == 6.0
    assert row["puc_count"] == 6
    assert row["latency_ms"] == 283.134


def test_rotor_run_accepts_schedule_document(client):
    schedule = client.post(
        "/rotor/generate", json={"height": 1, "width": 1, "radix": 2}
    ).json()
    resp = client.post(
        "/rotor/run", json={"height": 1, "width": 1, "schedule": schedule}
    )
    assert resp.status_code == 200
    assert resp.json()["feasible"] is True


def test_rotor_run_latency_override(client):
    resp = client.post(
        "/rotor/run",
        json={
            "height": 1,
            "width": 1,
            "radix": 2,
            "latency": {"per_puc_mean_ms": 10.0},
        },
    )
    assert resp.json()["matchings"][0]["latency_ms"] == 60.0


def test_rotor_run_needs_schedule_or_radix(client):
    resp = client.post("/rotor/run", json={"height": 1, "width": 1})
    assert resp.status_code == 422
    assert resp.json()["detail"] == "request needs either a schedule or a radix"


def test_rotor_run_needs_mesh_or_dimensions(client):
    resp = client.post("/rotor/run", json={"radix": 2})
    assert resp.status_code == 422
    assert (
        resp.json()["detail"]
        == "request needs either a mesh document or both height and width"
    )


# -- bench -------------------------------------------------------------------


def test_bench_radix_endpoint(client):
    resp = client.post(
        "/bench/radix", json={"height": 1, "width": 1, "radices": [2]}
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["max_feasible"] == 2
    assert body["probes"] == [{"radix": 2, "verdict": "feasible", "failing_k": None}]
    lines = body["csv"].splitlines()
    assert lines[0].startswith("experiment,")
    assert lines[1].startswith("radix,1,1,2,1,optimal,6,")


def test_bench_meshscale_endpoint(client):
    resp = client.post("/bench/meshscale", json={"sizes": [1]})
    assert resp.status_code == 200
    body = resp.json()
    key = [
        (r["width"], r["height"], r["n_routes"], r["status"], r["objective"])
        for r in body["rows"]
    ]
    assert key == [
        (1, 1, 1, "optimal", 3.0),
        (1, 1, 2, "optimal", 6.0),
        (1, 1, 4, "infeasible", None),
    ]
    assert len(body["csv"].splitlines()) == 4


# -- predict / latency --------------------------------------------------------


def test_predict_default_table(client):
    resp = client.post("/predict", json={"route_length": 17})
    assert resp.status_code == 200
    assert resp.json() == {"route_length": 17, "bitrate_gbps": 9.41, "loss_pct": 0.0}


def test_predict_custom_table(client):
    resp = client.post(
        "/predict", json={"route_length": 17, "table": [[9, 40.0, 0.5]]}
    )
    assert resp.json() == {"route_length": 17, "bitrate_gbps": 40.0, "loss_pct": 0.5}


def test_predict_rejects_zero_length(client):
    assert client.post("/predict", json={"route_length": 0}).status_code == 422


def test_predict_rejects_short_table_row(client):
    resp = client.post("/predict", json={"route_length": 5, "table": [[9]]})
    assert resp.status_code == 422


def test_latency_estimate_default(client):
    resp = client.post("/latency/estimate", json={"total_pucs": 13})
    assert resp.status_code == 200
    assert resp.json() == {"total_pucs": 13, "mode": "serial", "latency_ms": 613.457}


def test_latency_estimate_linear(client):
    resp = client.post(
        "/latency/estimate",
        json={"total_pucs": 10, "model": {"mode": "linear"}},
    )
    assert resp.json() == {"total_pucs": 10, "mode": "linear", "latency_ms": 50.0}


def test_latency_estimate_rejects_negative(client):
    assert client.post("/latency/estimate", json={"total_pucs": -1}).status_code == 422
