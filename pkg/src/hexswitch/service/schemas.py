"""Request and response envelopes for the HTTP service.

Mesh, problem, solution and schedule payloads travel as their canonical
document dicts; the core importers are the single source of validation
truth for them and their error messages name the offending field.  The
envelopes here pin everything around those payloads.
"""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field


class MeshBuildRequest(BaseModel, extra="forbid"):
    height: int = Field(ge=1)
    width: int = Field(ge=1)


class MeshDocRequest(BaseModel, extra="forbid"):
    mesh: dict[str, Any]


class MeshInfoResponse(BaseModel):
    height: int
    width: int
    pucs: int
    vertices: int
    ports: int
    arms: int
    port_order: list[str]


class MeshValidateResponse(BaseModel):
    ok: bool
    invariant: str | None = None
    detail: str | None = None


class LatencyParams(BaseModel, extra="forbid"):
    mode: Literal["serial", "linear"] = "serial"
    per_puc_mean_ms: float = 47.189
    per_puc_std_ms: float = 3.96
    linear_slope_k: float = 0.005
    linear_intercept_ms: float = 0.0


class SolveRequest(BaseModel, extra="forbid"):
    problem: dict[str, Any]
    budget_ms: float | None = Field(default=None, gt=0)
    backend: str = "search"


class SolveResponse(BaseModel):
    status: Literal["optimal", "infeasible", "timeout"]
    objective: float | None
    routes: list[dict[str, Any]]
    puc_states: list[dict[str, Any]]
    budget_ms: float | None = None


class VerifyRequest(BaseModel, extra="forbid"):
    problem: dict[str, Any]
    solution: dict[str, Any]
    matching_semantics: bool = False


class VerifyResponse(BaseModel):
    ok: bool
    violations: list[dict[str, Any]]


class RotorGenerateRequest(BaseModel, extra="forbid"):
    mesh: dict[str, Any] | None = None
    height: int | None = Field(default=None, ge=1)
    width: int | None = Field(default=None, ge=1)
    radix: int = Field(ge=2)
    policy: Literal["spread", "corners"] = "spread"


class RotorRunRequest(BaseModel, extra="forbid"):
    mesh: dict[str, Any] | None = None
    height: int | None = Field(default=None, ge=1)
    width: int | None = Field(default=None, ge=1)
    radix: int | None = Field(default=None, ge=2)
    policy: Literal["spread", "corners"] = "spread"
    schedule: dict[str, Any] | None = None
    budget_ms: float | None = Field(default=None, gt=0)
    backend: str = "search"
    max_route_length: float | None = Field(default=None, ge=0)
    latency: LatencyParams | None = None


class BenchRadixRequest(BaseModel, extra="forbid"):
    height: int = Field(ge=1)
    width: int = Field(ge=1)
    radices: list[int]
    budget_ms: float | None = Field(default=None, gt=0)
    policy: Literal["spread", "corners"] = "spread"
    backend: str = "search"
    max_route_length: float | None = Field(default=None, ge=0)
    latency: LatencyParams | None = None


class BenchRadixResponse(BaseModel):
    max_feasible: int | None
    probes: list[dict[str, Any]]
    csv: str


class BenchMeshScaleRequest(BaseModel, extra="forbid"):
    sizes: list[int]
    route_counts: list[int] = [1, 2, 4]
    budget_ms: float | None = Field(default=None, gt=0)
    backend: str = "search"


class BenchMeshScaleResponse(BaseModel):
    csv: str
    rows: list[dict[str, Any]]


class PredictRequest(BaseModel, extra="forbid"):
    route_length: int = Field(ge=1)
    table: list[list[float]] | None = None


class PredictResponse(BaseModel):
    route_length: int
    bitrate_gbps: float
    loss_pct: float


class LatencyEstimateRequest(BaseModel, extra="forbid"):
    total_pucs: int = Field(ge=0)
    model: LatencyParams | None = None


class LatencyEstimateResponse(BaseModel):
    total_pucs: int
    mode: str
    latency_ms: float


class HealthResponse(BaseModel):
    status: str
    version: str
