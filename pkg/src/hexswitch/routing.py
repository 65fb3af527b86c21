"""Routing problems and solutions over a mesh topology.

A problem asks for a set of simultaneous optical circuits, one per route
request, each from a source port to a drain port.  A solution assigns every
route a set of directed arms forming a simple path, and derives from the
union of assignments the gate state each PUC must be programmed to.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

from .mesh import BAR, CROSS, MeshError, MeshTopology, is_port_ref

UNUSED = "unused"

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
TIMEOUT = "timeout"


class ProblemError(ValueError):
    """Raised when a routing problem is not well formed."""


@dataclass(frozen=True)
class RouteRequest:
    route_id: int
    source: str
    drain: str


@dataclass(frozen=True)
class RoutingProblem:
    topology: MeshTopology
    routes: tuple[RouteRequest, ...]
    max_route_length: float
    # Dense per-arm weight vectors, indexed by arm id.
    cost_weights: tuple[float, ...] = field(repr=False)
    loss_weights: tuple[float, ...] = field(repr=False)

    def route_ids(self) -> list[int]:
        return [r.route_id for r in self.routes]


@dataclass(frozen=True)
class RoutingSolution:
    """One concrete circuit assignment.

    ``assignment`` maps route id to the set of directed arms the route uses,
    ``per_route_paths`` to the same arms in source-to-drain order.
    ``puc_states`` maps every PUC id to "bar", "cross" or "unused".
    """

    assignment: Mapping[int, frozenset[int]]
    per_route_paths: Mapping[int, tuple[int, ...]]
    puc_states: Mapping[int, str]
    objective_value: float


@dataclass(frozen=True)
class SolveOutcome:
    status: str  # optimal | infeasible | timeout
    solution: RoutingSolution | None = None
    budget_ms: float | None = None

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL


def default_max_route_length(topology: MeshTopology) -> int:
    return 2 * (topology.height + topology.width)


def make_problem(
    topology: MeshTopology,
    routes: list[RouteRequest] | list[tuple[int, str, str]],
    max_route_length: float | None = None,
    cost_overrides: Mapping[int, float] | None = None,
    loss_overrides: Mapping[int, float] | None = None,
) -> RoutingProblem:
    """Build and validate a routing problem.

    Weights default to 1 per arm; ``max_route_length`` defaults to
    2*(height+width) of the topology.
    """
    reqs = tuple(r if isinstance(r, RouteRequest) else RouteRequest(*r) for r in routes)

    seen_ids: set[int] = set()
    seen_ports: set[str] = set()
    for r in reqs:
        if r.route_id in seen_ids:
            raise ProblemError(f"duplicate route id {r.route_id}")
        seen_ids.add(r.route_id)
        if r.source == r.drain:
            raise ProblemError(f"route {r.route_id} has identical source and drain {r.source!r}")
        for role, ref in (("source", r.source), ("drain", r.drain)):
            if not (isinstance(ref, str) and is_port_ref(ref) and topology.endpoint_exists(ref)):
                raise ProblemError(f"route {r.route_id} {role} {ref!r} is not a port of the mesh")
            if ref in seen_ports:
                raise ProblemError(f"port {ref!r} used by more than one route endpoint")
            seen_ports.add(ref)

    if max_route_length is None:
        max_route_length = default_max_route_length(topology)
    if max_route_length < 0:
        raise ProblemError(f"max_route_length must be nonnegative, got {max_route_length}")

    n_arms = len(topology.arms)

    def densify(overrides: Mapping[int, float] | None, label: str) -> tuple[float, ...]:
        weights = [1.0] * n_arms
        for arm_id, value in (overrides or {}).items():
            if not 0 <= arm_id < n_arms:
                raise ProblemError(f"{label} override names unknown arm {arm_id}")
            if value < 0:
                raise ProblemError(f"{label} for arm {arm_id} must be nonnegative, got {value}")
            weights[arm_id] = float(value)
        return tuple(weights)

    return RoutingProblem(
        topology=topology,
        routes=reqs,
        max_route_length=float(max_route_length),
        cost_weights=densify(cost_overrides, "cost weight"),
        loss_weights=densify(loss_overrides, "loss weight"),
    )


def derive_puc_states(topology: MeshTopology, assignment: Mapping[int, frozenset[int]]) -> dict[int, str]:
    """State each PUC must be set to so that all assigned arms light up.

    A PUC with any bar arm assigned is "bar", with any cross arm "cross";
    assigning both kinds on one PUC is contradictory and raises.
    """
    states = {puc.id: UNUSED for puc in topology.pucs}
    for arms in assignment.values():
        for arm_id in arms:
            arm = topology.arms[arm_id]
            if states[arm.puc] not in (UNUSED, arm.kind):
                raise ValueError(f"puc {arm.puc} is assigned both bar and cross arms")
            states[arm.puc] = arm.kind
    return states


def trace_route_path(
    topology: MeshTopology, source: str, drain: str, arm_ids: frozenset[int]
) -> tuple[int, ...]:
    """Order the assigned arms into the source-to-drain walk, dropping strays.

    Any arm not reached by the walk (a cycle disconnected from the path) is
    discarded.  Raises ValueError if the walk breaks or branches, which for a
    side-capacity-feasible assignment cannot happen.
    """
    by_tail: dict[str, list[int]] = {}
    for arm_id in sorted(arm_ids):
        by_tail.setdefault(topology.arms[arm_id].tail, []).append(arm_id)
    path: list[int] = []
    used: set[int] = set()
    node = source
    while node != drain:
        candidates = [a for a in by_tail.get(node, ()) if a not in used]
        if not candidates:
            raise ValueError(f"assignment does not reach the drain: stuck at {node}")
        if len(candidates) > 1:
            raise ValueError(f"assignment branches at {node}")
        arm_id = candidates[0]
        used.add(arm_id)
        path.append(arm_id)
        node = topology.arms[arm_id].head
        if len(path) > len(arm_ids):
            raise ValueError("assignment loops without reaching the drain")
    return tuple(path)


def build_solution(
    problem: RoutingProblem, raw_assignment: Mapping[int, frozenset[int]]
) -> RoutingSolution:
    """Reduce a raw feasible assignment to simple paths and package it.

    Runs the unconditional stray-discard pass per route, recomputes the
    objective from the surviving arms, and derives PUC states.
    """
    assignment: dict[int, frozenset[int]] = {}
    paths: dict[int, tuple[int, ...]] = {}
    for route in problem.routes:
        raw = raw_assignment.get(route.route_id, frozenset())
        path = trace_route_path(problem.topology, route.source, route.drain, raw)
        paths[route.route_id] = path
        assignment[route.route_id] = frozenset(path)
    # Sum in route-then-path order so the float result is reproducible.
    objective = sum(problem.cost_weights[a] for route in problem.routes for a in paths[route.route_id])
    states = derive_puc_states(problem.topology, assignment)
    return RoutingSolution(
        assignment=assignment,
        per_route_paths=paths,
        puc_states=states,
        objective_value=objective,
    )


# Document (JSON) forms.

def export_problem(problem: RoutingProblem, mesh: Any = None) -> dict[str, Any]:
    """Problem document; ``mesh`` may override the inline mesh (e.g. a path string)."""
    from .meshdoc import export_mesh

    doc: dict[str, Any] = {
        "mesh": export_mesh(problem.topology) if mesh is None else mesh,
        "routes": [
            {"id": r.route_id, "source": r.source, "drain": r.drain} for r in problem.routes
        ],
        "L": problem.max_route_length,
    }
    cost = {str(i): w for i, w in enumerate(problem.cost_weights) if w != 1.0}
    loss = {str(i): w for i, w in enumerate(problem.loss_weights) if w != 1.0}
    if cost:
        doc["cost_weights"] = cost
    if loss:
        doc["loss_weights"] = loss
    return doc


def import_problem(
    doc: dict[str, Any],
    mesh_loader: Callable[[str], MeshTopology] | None = None,
    topology: MeshTopology | None = None,
) -> RoutingProblem:
    """Parse a problem document.

    ``mesh`` may be an inline mesh document or a string reference resolved
    through ``mesh_loader``; a pre-built ``topology`` overrides both.
    """
    from .meshdoc import import_mesh

    if not isinstance(doc, dict):
        raise ProblemError("problem document must be a JSON object")
    if topology is None:
        mesh_field = doc.get("mesh")
        if isinstance(mesh_field, dict):
            topology = import_mesh(mesh_field)
        elif isinstance(mesh_field, str):
            if mesh_loader is None:
                raise ProblemError("mesh is a file reference but no loader is available here; inline the mesh document")
            topology = mesh_loader(mesh_field)
        else:
            raise ProblemError("problem document needs a 'mesh' field (inline document or file reference)")

    routes_field = doc.get("routes")
    if not isinstance(routes_field, list):
        raise ProblemError("problem document needs a 'routes' list")
    routes = []
    for i, entry in enumerate(routes_field):
        if not isinstance(entry, dict) or not {"id", "source", "drain"} <= set(entry):
            raise ProblemError(f"routes[{i}] must carry id, source and drain")
        routes.append(RouteRequest(entry["id"], entry["source"], entry["drain"]))

    def parse_weights(key: str) -> dict[int, float] | None:
        raw = doc.get(key)
        if raw is None:
            return None
        if not isinstance(raw, dict):
            raise ProblemError(f"{key} must map arm ids to numbers")
        out = {}
        for k, v in raw.items():
            try:
                out[int(k)] = float(v)
            except (TypeError, ValueError):
                raise ProblemError(f"{key} entry {k!r}: {v!r} is not numeric") from None
        return out

    try:
        return make_problem(
            topology,
            routes,
            max_route_length=doc.get("L"),
            cost_overrides=parse_weights("cost_weights"),
            loss_overrides=parse_weights("loss_weights"),
        )
    except MeshError as exc:
        raise ProblemError(str(exc)) from exc


def export_solution(outcome: SolveOutcome, route_ids: list[int] | None = None) -> dict[str, Any]:
    doc: dict[str, Any] = {"status": outcome.status, "objective": None, "routes": [], "puc_states": []}
    if outcome.status == TIMEOUT and outcome.budget_ms is not None:
        doc["budget_ms"] = outcome.budget_ms
    solution = outcome.solution
    if solution is None:
        return doc
    doc["objective"] = solution.objective_value
    ids = route_ids if route_ids is not None else sorted(solution.per_route_paths)
    doc["routes"] = [{"id": rid, "arms": list(solution.per_route_paths[rid])} for rid in ids]
    doc["puc_states"] = [
        {"puc": puc, "state": state} for puc, state in sorted(solution.puc_states.items())
    ]
    return doc


def import_solution(doc: dict[str, Any]) -> RoutingSolution:
    """Parse a solution document into the in-memory form the verifier takes.

    Deliberately lenient: the verifier's job is to judge the content, so only
    the gross shape is enforced here.
    """
    if not isinstance(doc, dict):
        raise ValueError("solution document must be a JSON object")
    routes = doc.get("routes", [])
    if not isinstance(routes, list):
        raise ValueError("solution 'routes' must be a list")
    paths: dict[int, tuple[int, ...]] = {}
    for i, entry in enumerate(routes):
        if not isinstance(entry, dict) or "id" not in entry or "arms" not in entry:
            raise ValueError(f"solution routes[{i}] must carry id and arms")
        paths[entry["id"]] = tuple(entry["arms"])
    states: dict[int, str] = {}
    for entry in doc.get("puc_states", []):
        if not isinstance(entry, dict) or "puc" not in entry or "state" not in entry:
            raise ValueError("solution puc_states entries must carry puc and state")
        states[entry["puc"]] = entry["state"]
    objective = doc.get("objective")
    return RoutingSolution(
        assignment={rid: frozenset(arms) for rid, arms in paths.items()},
        per_route_paths=paths,
        puc_states=states,
        objective_value=float(objective) if objective is not None else 0.0,
    )


def dump_solution_json(outcome: SolveOutcome, route_ids: list[int] | None = None) -> str:
    return json.dumps(export_solution(outcome, route_ids), indent=2)
