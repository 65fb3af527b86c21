"""Independent checker for claimed routing solutions.

Re-derives every index it needs from the raw topology and recounts flows,
side usage, port usage, lengths and gate states from scratch; the solver's
own bookkeeping is never trusted.  Each rule is reported under a stable
code, with one violation per offending (route, entity) pair:

  Eq1            route length exceeds the budget
  Eq2            flow not conserved at a junction vertex
  Eq3            more than one arm assigned on one vertex side
  Eq4            source port flow wrong (own out != 1, or any in, or foreign out)
  Eq5            drain port flow wrong (own in != 1, or any out, or foreign in)
  Eq6            flow at a port no route is attached to
  PathIntegrity  assignment does not trace to a simple source->drain path
  StateConflict  claimed PUC states disagree with the assignment

Path tracing for a route is only attempted when its flow counts are clean
(no Eq2/Eq4/Eq5/Eq6 entries name it); a broken flow already explains why no
path exists, and reporting both would bury the cause.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .mesh import MeshTopology, is_port_ref, is_vertex_ref, port_ref, ref_index, vertex_ref
from .routing import UNUSED, RoutingProblem, RoutingSolution

RULE_ORDER = ("Eq1", "Eq2", "Eq3", "Eq4", "Eq5", "Eq6", "PathIntegrity", "StateConflict")


@dataclass(frozen=True)
class Violation:
    rule: str
    route: int | None
    entity: str
    detail: str


@dataclass(frozen=True)
class ViolationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}

    def to_doc(self) -> dict[str, Any]:
        return {
            "violations": [
                {"rule": v.rule, "route": v.route, "entity": v.entity, "detail": v.detail}
                for v in self.violations
            ]
        }

    def to_json(self) -> str:
        return json.dumps(self.to_doc(), indent=2)


def _sort_key(v: Violation) -> tuple[int, float, str]:
    rule_rank = RULE_ORDER.index(v.rule) if v.rule in RULE_ORDER else len(RULE_ORDER)
    route_rank = v.route if v.route is not None else -1
    return (rule_rank, route_rank, v.entity)


def _finish(violations: list[Violation]) -> ViolationReport:
    return ViolationReport(tuple(sorted(violations, key=_sort_key)))


def verify(problem: RoutingProblem, solution: RoutingSolution) -> ViolationReport:
    topology = problem.topology
    n_arms = len(topology.arms)
    violations: list[Violation] = []

    # Which side of which vertex each arm lies on, rebuilt from the raw
    # vertex records.
    arm_sides: dict[int, list[tuple[int, int]]] = {}
    for v in topology.vertices:
        for side_index, side_arms in ((0, v.side_a), (1, v.side_b)):
            for a in side_arms:
                arm_sides.setdefault(a, []).append((v.id, side_index))

    route_ids = {r.route_id for r in problem.routes}
    for rid in sorted(solution.assignment.keys() | solution.per_route_paths.keys()):
        if rid not in route_ids:
            violations.append(
                Violation("PathIntegrity", rid, f"route:{rid}", "solution names a route the problem does not have")
            )

    # Screen references; a route with junk arm ids is excluded from flow math.
    clean_arms: dict[int, list[int]] = {}
    malformed: set[int] = set()
    for route in problem.routes:
        rid = route.route_id
        listed = solution.assignment.get(rid)
        arms = sorted(listed) if listed is not None else list(solution.per_route_paths.get(rid, ()))
        good: list[int] = []
        seen: set[int] = set()
        for a in arms:
            if not isinstance(a, int) or isinstance(a, bool) or not 0 <= a < n_arms:
                violations.append(Violation("PathIntegrity", rid, f"arm:{a}", "assignment references an unknown arm"))
                malformed.add(rid)
            elif a in seen:
                violations.append(Violation("PathIntegrity", rid, f"arm:{a}", "assignment lists an arm twice"))
                malformed.add(rid)
            else:
                seen.add(a)
                good.append(a)
        clean_arms[rid] = good

    # Recount all flows.
    vertex_in: dict[tuple[int, int], int] = {}   # (route, vertex) -> count
    vertex_out: dict[tuple[int, int], int] = {}
    side_load: dict[tuple[int, int], list[int]] = {}  # (vertex, side) -> routes touching it
    port_in: dict[tuple[int, int], int] = {}     # (route, port) -> count
    port_out: dict[tuple[int, int], int] = {}
    for route in problem.routes:
        rid = route.route_id
        for a in clean_arms[rid]:
            arm = topology.arms[a]
            if is_vertex_ref(arm.tail):
                vertex_out[(rid, ref_index(arm.tail))] = vertex_out.get((rid, ref_index(arm.tail)), 0) + 1
            elif is_port_ref(arm.tail):
                port_out[(rid, ref_index(arm.tail))] = port_out.get((rid, ref_index(arm.tail)), 0) + 1
            if is_vertex_ref(arm.head):
                vertex_in[(rid, ref_index(arm.head))] = vertex_in.get((rid, ref_index(arm.head)), 0) + 1
            elif is_port_ref(arm.head):
                port_in[(rid, ref_index(arm.head))] = port_in.get((rid, ref_index(arm.head)), 0) + 1
            for key in arm_sides.get(a, ()):
                side_load.setdefault(key, []).append(rid)

    flow_dirty: set[int] = set(malformed)

    # Eq1: per-route weighted length within budget.
    for route in problem.routes:
        rid = route.route_id
        total = sum(problem.loss_weights[a] for a in clean_arms[rid])
        if total > problem.max_route_length:
            violations.append(
                Violation("Eq1", rid, f"route:{rid}",
                          f"route length {total:g} exceeds the budget {problem.max_route_length:g}")
            )

    # Eq2: per-route conservation at each junction vertex.
    for route in problem.routes:
        rid = route.route_id
        touched = sorted({v for (r, v) in list(vertex_in) + list(vertex_out) if r == rid})
        for v in touched:
            n_in = vertex_in.get((rid, v), 0)
            n_out = vertex_out.get((rid, v), 0)
            if n_in != n_out:
                flow_dirty.add(rid)
                violations.append(
                    Violation("Eq2", rid, vertex_ref(v), f"{n_in} arms in but {n_out} arms out")
                )

    # Eq3: at most one assigned arm per vertex side, over all routes.
    for (v, side), rids in sorted(side_load.items()):
        if len(rids) > 1:
            violations.append(
                Violation("Eq3", None, f"{vertex_ref(v)}/side_{'ab'[side]}",
                          f"{len(rids)} arms assigned on one side (routes {sorted(set(rids))})")
            )

    # Eq4/Eq5: flow at named source and drain ports; Eq6: at all other ports.
    sources = {ref_index(r.source): r.route_id for r in problem.routes}
    drains = {ref_index(r.drain): r.route_id for r in problem.routes}
    for route in problem.routes:
        rid = route.route_id
        src = ref_index(route.source)
        n_out = port_out.get((rid, src), 0)
        if n_out != 1:
            flow_dirty.add(rid)
            violations.append(
                Violation("Eq4", rid, route.source, f"route must leave its source on exactly 1 arm, found {n_out}")
            )
        drn = ref_index(route.drain)
        n_in = port_in.get((rid, drn), 0)
        if n_in != 1:
            flow_dirty.add(rid)
            violations.append(
                Violation("Eq5", rid, route.drain, f"route must enter its drain on exactly 1 arm, found {n_in}")
            )

    for (rid, p), count in sorted(port_in.items()):
        if count == 0:
            continue
        if p in drains and drains[p] == rid:
            continue  # own drain, counted above
        rule = "Eq4" if p in sources else ("Eq5" if p in drains else "Eq6")
        flow_dirty.add(rid)
        violations.append(
            Violation(rule, rid, port_ref(p), f"{count} arms enter a port the route is not drained at")
        )
    for (rid, p), count in sorted(port_out.items()):
        if count == 0:
            continue
        if p in sources and sources[p] == rid:
            continue  # own source, counted above
        rule = "Eq4" if p in sources else ("Eq5" if p in drains else "Eq6")
        flow_dirty.add(rid)
        violations.append(
            Violation(rule, rid, port_ref(p), f"{count} arms leave a port the route is not sourced at")
        )

    # PathIntegrity: the assignment must trace to a simple source->drain
    # path with nothing left over, and agree with the ordered path field.
    for route in problem.routes:
        rid = route.route_id
        if rid in flow_dirty:
            continue
        arms = clean_arms[rid]
        by_tail: dict[str, list[int]] = {}
        for a in arms:
            by_tail.setdefault(topology.arms[a].tail, []).append(a)
        path: list[int] = []
        used: set[int] = set()
        node = route.source
        broken = None
        while node != route.drain:
            options = [a for a in by_tail.get(node, ()) if a not in used]
            if not options:
                broken = f"walk from the source sticks at {node}"
                break
            if len(options) > 1:
                broken = f"walk from the source branches at {node}"
                break
            used.add(options[0])
            path.append(options[0])
            node = topology.arms[options[0]].head
        if broken:
            violations.append(Violation("PathIntegrity", rid, route.source, broken))
            continue
        leftover = sorted(set(arms) - used)
        if leftover:
            violations.append(
                Violation("PathIntegrity", rid, f"arm:{leftover[0]}",
                          f"arms {leftover} are assigned but lie off the source->drain path")
            )
        declared = list(solution.per_route_paths.get(rid, ()))
        if rid in solution.per_route_paths and declared != path and not leftover:
            violations.append(
                Violation("PathIntegrity", rid, route.source,
                          "ordered path field disagrees with the traced assignment")
            )

    # StateConflict: claimed states must match states recomputed from arms.
    # An assignment that needs one gate in both kinds at once is not reported
    # here: the two arms always share a terminal, so the side-capacity rule
    # (or a port-flow rule) already rejects it, and the claim for such a gate
    # is unverifiable.
    derived: dict[int, set[str]] = {}
    for route in problem.routes:
        for a in clean_arms[route.route_id]:
            arm = topology.arms[a]
            derived.setdefault(arm.puc, set()).add(arm.kind)
    n_pucs = len(topology.pucs)
    for puc_id, claimed in sorted(solution.puc_states.items()):
        if not isinstance(puc_id, int) or not 0 <= puc_id < n_pucs:
            violations.append(
                Violation("StateConflict", None, f"puc:{puc_id}", "claimed state names an unknown gate")
            )
            continue
        kinds = derived.get(puc_id, set())
        expected = kinds.copy().pop() if len(kinds) == 1 else (UNUSED if not kinds else None)
        if expected is not None and claimed != expected:
            violations.append(
                Violation("StateConflict", None, f"puc:{puc_id}",
                          f"claimed state {claimed!r} but the assignment implies {expected!r}")
            )

    return _finish(violations)


def verify_matching_semantics(problem: RoutingProblem, solution: RoutingSolution) -> ViolationReport:
    """verify() plus the switch-level rule that a route's path may touch no
    port besides its own source and drain."""
    base = verify(problem, solution)
    violations = list(base.violations)
    covered = {(v.rule, v.route, v.entity) for v in violations}
    n_arms = len(problem.topology.arms)
    for route in problem.routes:
        rid = route.route_id
        arms = solution.assignment.get(rid, solution.per_route_paths.get(rid, ()))
        foreign: set[str] = set()
        for a in arms:
            if not isinstance(a, int) or isinstance(a, bool) or not 0 <= a < n_arms:
                continue
            arm = problem.topology.arms[a]
            for ref in (arm.tail, arm.head):
                if is_port_ref(ref) and ref not in (route.source, route.drain):
                    foreign.add(ref)
        for ref in sorted(foreign):
            key = next((k for k in covered if k[1] == rid and k[2] == ref), None)
            if key is None:
                violations.append(
                    Violation("Eq6", rid, ref, "path touches a port that is not its own source or drain")
                )
    return _finish(violations)


def report_from_doc(doc: dict[str, Any]) -> ViolationReport:
    entries = doc.get("violations", [])
    return ViolationReport(
        tuple(Violation(e["rule"], e.get("route"), e.get("entity", ""), e.get("detail", "")) for e in entries)
    )
