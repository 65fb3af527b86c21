"""Serialization of mesh topologies to and from plain JSON documents.

The document is the interchange format: ``export_mesh`` produces a dict that
serializes to stable JSON, ``import_mesh`` rebuilds a topology from such a
dict and re-runs every structural invariant, so a hand-written document is
accepted exactly when it describes a legal device.  Import of an export is
the identity on ids and structure.
"""

from __future__ import annotations

import json
from typing import Any

from .mesh import (
    BAR,
    CROSS,
    SLOT_NAMES,
    CellCoord,
    DirectedArm,
    JunctionVertex,
    MeshError,
    MeshTopology,
    Port,
    Puc,
)

DOCUMENT_VERSION = 1


def export_mesh(topology: MeshTopology) -> dict[str, Any]:
    return {
        "version": DOCUMENT_VERSION,
        "height": topology.height,
        "width": topology.width,
        "pucs": [
            {
                "id": puc.id,
                "owner_row": puc.owner.row,
                "owner_col": puc.owner.col,
                "side": puc.side,
                "terminals": dict(zip(SLOT_NAMES, puc.terminals)),
            }
            for puc in topology.pucs
        ],
        "vertices": [
            {"id": v.id, "side_a": list(v.side_a), "side_b": list(v.side_b)}
            for v in topology.vertices
        ],
        "ports": [
            {"id": p.id, "in_arms": list(p.in_arms), "out_arms": list(p.out_arms)}
            for p in topology.ports
        ],
        "arms": [
            {"id": a.id, "puc": a.puc, "kind": a.kind, "tail": a.tail, "head": a.head}
            for a in topology.arms
        ],
    }


def _require(doc: dict, key: str, kind: type, where: str) -> Any:
    if key not in doc:
        raise MeshError("document_field", f"{where} is missing required field {key!r}")
    value = doc[key]
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        raise MeshError("document_field", f"{where} field {key!r} must be {kind.__name__}, got {type(value).__name__}")
    return value


def import_mesh(doc: dict[str, Any]) -> MeshTopology:
    """Rebuild a topology from a document, validating every invariant."""
    if not isinstance(doc, dict):
        raise MeshError("document_shape", "mesh document must be a JSON object")
    version = _require(doc, "version", int, "mesh document")
    if version != DOCUMENT_VERSION:
        raise MeshError("document_version", f"unsupported mesh document version {version}")
    height = _require(doc, "height", int, "mesh document")
    width = _require(doc, "width", int, "mesh document")

    pucs = []
    for i, entry in enumerate(_require(doc, "pucs", list, "mesh document")):
        where = f"pucs[{i}]"
        terminals_map = _require(entry, "terminals", dict, where)
        if set(terminals_map) != set(SLOT_NAMES):
            raise MeshError(
                "puc_terminals",
                f"{where} must bind exactly the 4 terminal slots {list(SLOT_NAMES)}, got {sorted(terminals_map)}",
            )
        terminals = tuple(terminals_map[slot] for slot in SLOT_NAMES)
        for ref in terminals:
            if not isinstance(ref, str):
                raise MeshError("terminal_binding", f"{where} terminal references must be strings")
        pucs.append(
            Puc(
                id=_require(entry, "id", int, where),
                owner=CellCoord(_require(entry, "owner_row", int, where), _require(entry, "owner_col", int, where)),
                side=_require(entry, "side", int, where),
                terminals=terminals,  # type: ignore[arg-type]
            )
        )

    vertices = []
    for i, entry in enumerate(_require(doc, "vertices", list, "mesh document")):
        where = f"vertices[{i}]"
        vertices.append(
            JunctionVertex(
                id=_require(entry, "id", int, where),
                side_a=tuple(_require(entry, "side_a", list, where)),
                side_b=tuple(_require(entry, "side_b", list, where)),
            )
        )

    ports = []
    for i, entry in enumerate(_require(doc, "ports", list, "mesh document")):
        where = f"ports[{i}]"
        ports.append(
            Port(
                id=_require(entry, "id", int, where),
                in_arms=tuple(_require(entry, "in_arms", list, where)),
                out_arms=tuple(_require(entry, "out_arms", list, where)),
            )
        )

    arms = []
    for i, entry in enumerate(_require(doc, "arms", list, "mesh document")):
        where = f"arms[{i}]"
        kind = _require(entry, "kind", str, where)
        if kind not in (BAR, CROSS):
            raise MeshError("arm_kind", f"{where} kind must be 'bar' or 'cross', got {kind!r}")
        arms.append(
            DirectedArm(
                id=_require(entry, "id", int, where),
                puc=_require(entry, "puc", int, where),
                kind=kind,
                tail=_require(entry, "tail", str, where),
                head=_require(entry, "head", str, where),
            )
        )

    return MeshTopology.assemble(height, width, pucs, vertices, ports, arms)


def dump_mesh_json(topology: MeshTopology) -> str:
    return json.dumps(export_mesh(topology), indent=2, sort_keys=False)


def load_mesh_json(text: str) -> MeshTopology:
    return import_mesh(json.loads(text))
