"""FastAPI application wrapping the core package.

Every endpoint is a thin adapter: decode documents with the core
importers, run the core function, re-encode the result.  Domain
validation errors surface as 422 responses whose detail names the
offending invariant or field.
"""

from __future__ import annotations

from typing import Any

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..bench import (
    bench_meshscale,
    bench_radix,
    meshscale_records_to_csv,
    radix_records_to_csv,
)
from ..hardware import (
    DEFAULT_BITRATE_TABLE,
    BitratePredictor,
    LatencyModel,
    estimate_config_latency,
    predict_bitrate,
)
from ..mesh import MeshError, MeshTopology, build_hex_mesh
from ..meshdoc import export_mesh, import_mesh
from ..routing import ProblemError, export_solution, import_problem, import_solution
from ..rotor import (
    BindingError,
    export_schedule,
    export_schedule_result,
    import_schedule,
    make_schedule,
    run_schedule,
)
from ..solver import SolverError, solve
from ..verify import verify, verify_matching_semantics
from . import schemas


def _unprocessable(exc: Exception) -> HTTPException:
    return HTTPException(status_code=422, detail=str(exc))


def _mesh_from_doc(doc: dict[str, Any]) -> MeshTopology:
    try:
        return import_mesh(doc)
    except (MeshError, ValueError) as exc:
        raise _unprocessable(exc) from exc


def _mesh_from_request(
    mesh: dict[str, Any] | None, height: int | None, width: int | None
) -> MeshTopology:
    if mesh is not None:
        return _mesh_from_doc(mesh)
    if height is None or width is None:
        raise HTTPException(
            status_code=422,
            detail="request needs either a mesh document or both height and width",
        )
    return build_hex_mesh(height, width)


def _latency_model(params: schemas.LatencyParams | None) -> LatencyModel:
    if params is None:
        return LatencyModel()
    try:
        return LatencyModel(
            per_puc_mean_ms=params.per_puc_mean_ms,
            per_puc_std_ms=params.per_puc_std_ms,
            linear_slope_k=params.linear_slope_k,
            linear_intercept_ms=params.linear_intercept_ms,
            mode=params.mode,
        )
    except ValueError as exc:
        raise _unprocessable(exc) from exc


def create_app() -> FastAPI:
    app = FastAPI(title="hexswitch", version=__version__)

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/mesh/build")
    def mesh_build(req: schemas.MeshBuildRequest) -> dict[str, Any]:
        try:
            topology = build_hex_mesh(req.height, req.width)
        except (MeshError, ValueError) as exc:
            raise _unprocessable(exc) from exc
        return export_mesh(topology)

    @app.post("/mesh/info", response_model=schemas.MeshInfoResponse)
    def mesh_info(req: schemas.MeshDocRequest) -> schemas.MeshInfoResponse:
        topology = _mesh_from_doc(req.mesh)
        return schemas.MeshInfoResponse(
            height=topology.height,
            width=topology.width,
            pucs=len(topology.pucs),
            vertices=len(topology.vertices),
            ports=len(topology.ports),
            arms=len(topology.arms),
            port_order=[f"p{p.id}" for p in topology.ports],
        )

    @app.post("/mesh/validate", response_model=schemas.MeshValidateResponse)
    def mesh_validate(req: schemas.MeshDocRequest) -> schemas.MeshValidateResponse:
        try:
            import_mesh(req.mesh)
        except MeshError as exc:
            return schemas.MeshValidateResponse(
                ok=False, invariant=exc.invariant, detail=exc.detail
            )
        except ValueError as exc:
            return schemas.MeshValidateResponse(ok=False, invariant="document", detail=str(exc))
        return schemas.MeshValidateResponse(ok=True)

    @app.post("/solve", response_model=schemas.SolveResponse)
    def solve_endpoint(req: schemas.SolveRequest) -> schemas.SolveResponse:
        try:
            problem = import_problem(req.problem)
        except (MeshError, ProblemError, ValueError) as exc:
            raise _unprocessable(exc) from exc
        try:
            outcome = solve(problem, time_budget_ms=req.budget_ms, backend=req.backend)
        except ValueError as exc:
            raise _unprocessable(exc) from exc
        except SolverError as exc:
            raise HTTPException(status_code=500, detail=str(exc)) from exc
        doc = export_solution(outcome, [r.route_id for r in problem.routes])
        return schemas.SolveResponse(
            status=doc["status"],
            objective=doc["objective"],
            routes=doc["routes"],
            puc_states=doc["puc_states"],
            budget_ms=outcome.budget_ms,
        )

    @app.post("/verify", response_model=schemas.VerifyResponse)
    def verify_endpoint(req: schemas.VerifyRequest) -> schemas.VerifyResponse:
        try:
            problem = import_problem(req.problem)
            solution = import_solution(req.solution)
        except (MeshError, ProblemError, ValueError) as exc:
            raise _unprocessable(exc) from exc
        check = verify_matching_semantics if req.matching_semantics else verify
        report = check(problem, solution)
        return schemas.VerifyResponse(ok=report.ok, violations=report.to_doc()["violations"])

    @app.post("/rotor/generate")
    def rotor_generate(req: schemas.RotorGenerateRequest) -> dict[str, Any]:
        topology = _mesh_from_request(req.mesh, req.height, req.width)
        try:
            schedule = make_schedule(topology, req.radix, policy=req.policy)
        except (BindingError, ValueError) as exc:
            raise _unprocessable(exc) from exc
        return export_schedule(schedule)

    @app.post("/rotor/run")
    def rotor_run(req: schemas.RotorRunRequest) -> dict[str, Any]:
        topology = _mesh_from_request(req.mesh, req.height, req.width)
        try:
            if req.schedule is not None:
                schedule = import_schedule(req.schedule)
            elif req.radix is not None:
                schedule = make_schedule(topology, req.radix, policy=req.policy)
            else:
                raise HTTPException(
                    status_code=422, detail="request needs either a schedule or a radix"
                )
            result = run_schedule(
                topology,
                schedule,
                backend=req.backend,
                budget_ms=req.budget_ms,
                latency_model=_latency_model(req.latency),
                max_route_length=req.max_route_length,
            )
        except (BindingError, ProblemError, ValueError) as exc:
            raise _unprocessable(exc) from exc
        except SolverError as exc:
            raise HTTPException(status_code=500, detail=str(exc)) from exc
        return export_schedule_result(result)

    @app.post("/bench/radix", response_model=schemas.BenchRadixResponse)
    def bench_radix_endpoint(req: schemas.BenchRadixRequest) -> schemas.BenchRadixResponse:
        try:
            records, scan = bench_radix(
                req.height,
                req.width,
                req.radices,
                policy=req.policy,
                backend=req.backend,
                budget_ms=req.budget_ms,
                latency_model=_latency_model(req.latency),
                max_route_length=req.max_route_length,
            )
        except (MeshError, ProblemError, ValueError) as exc:
            raise _unprocessable(exc) from exc
        except SolverError as exc:
            raise HTTPException(status_code=500, detail=str(exc)) from exc
        probes: list[dict[str, Any]] = []
        if scan is not None:
            for probe in scan.probes:
                probes.append(
                    {
                        "radix": probe.radix,
                        "verdict": probe.verdict,
                        "failing_k": probe.failing_k,
                    }
                )
        return schemas.BenchRadixResponse(
            max_feasible=scan.max_feasible if scan is not None else None,
            probes=probes,
            csv=radix_records_to_csv(records),
        )

    @app.post("/bench/meshscale", response_model=schemas.BenchMeshScaleResponse)
    def bench_meshscale_endpoint(
        req: schemas.BenchMeshScaleRequest,
    ) -> schemas.BenchMeshScaleResponse:
        try:
            records = bench_meshscale(
                req.sizes,
                route_counts=tuple(req.route_counts),
                backend=req.backend,
                budget_ms=req.budget_ms,
            )
        except (MeshError, ProblemError, ValueError) as exc:
            raise _unprocessable(exc) from exc
        except SolverError as exc:
            raise HTTPException(status_code=500, detail=str(exc)) from exc
        rows = [
            {
                "width": rec.width,
                "height": rec.height,
                "n_routes": rec.scale,
                "status": rec.status,
                "objective": rec.objective,
                "solve_ms": rec.solve_ms,
            }
            for rec in records
        ]
        return schemas.BenchMeshScaleResponse(csv=meshscale_records_to_csv(records), rows=rows)

    @app.post("/predict", response_model=schemas.PredictResponse)
    def predict(req: schemas.PredictRequest) -> schemas.PredictResponse:
        if req.table is None:
            predictor = BitratePredictor(DEFAULT_BITRATE_TABLE)
        else:
            try:
                rows = tuple((int(r[0]), float(r[1]), float(r[2])) for r in req.table)
                predictor = BitratePredictor(rows)
            except (IndexError, TypeError, ValueError) as exc:
                raise _unprocessable(exc) from exc
        try:
            bitrate, loss = predict_bitrate(predictor, req.route_length)
        except ValueError as exc:
            raise _unprocessable(exc) from exc
        return schemas.PredictResponse(
            route_length=req.route_length, bitrate_gbps=bitrate, loss_pct=loss
        )

    @app.post("/latency/estimate", response_model=schemas.LatencyEstimateResponse)
    def latency_estimate(
        req: schemas.LatencyEstimateRequest,
    ) -> schemas.LatencyEstimateResponse:
        model = _latency_model(req.model)
        return schemas.LatencyEstimateResponse(
            total_pucs=req.total_pucs,
            mode=model.mode,
            latency_ms=estimate_config_latency(model, req.total_pucs),
        )

    return app
