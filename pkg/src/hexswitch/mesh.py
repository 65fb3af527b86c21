"""Hexagonal mesh graph for programmable photonic circuit switching.

The device is a grid of hexagonal cells.  Every hexagon side carries one
programmable unit cell (PUC), a 2x2 optical gate with two terminals at each
end.  Where the sides of adjacent cells meet at a lattice corner, terminals
of neighbouring PUCs fuse pairwise into junction vertices; terminals that
never fuse are exposed as ports on the device boundary.  Light moves along
directed coupler arms inside each PUC: "bar" arms keep the lane (top to top,
bottom to bottom), "cross" arms swap lanes.

Cells are addressed (row, col) with odd rows shifted right (odd-r offset).
Side indices on a cell go clockwise from east: 0=E, 1=SE, 2=SW, 3=W, 4=NW,
5=NE.  All geometry is done on an integer lattice so construction is exact
and deterministic: the cell centre of (row, col) sits at
(2*col + (row & 1), 3*row) with y growing downward.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping


class MeshError(ValueError):
    """Raised when a topology violates a structural invariant.

    ``invariant`` carries a short machine-readable name for the first rule
    that failed, ``detail`` the human-readable explanation.
    """

    def __init__(self, invariant: str, detail: str):
        super().__init__(f"{invariant}: {detail}")
        self.invariant = invariant
        self.detail = detail


# Endpoint references are compact strings: "v3" is junction vertex 3,
# "p7" is port 7.  They double as the on-the-wire representation.

def vertex_ref(index: int) -> str:
    return f"v{index}"


def port_ref(index: int) -> str:
    return f"p{index}"


def is_vertex_ref(ref: str) -> bool:
    return ref.startswith("v")


def is_port_ref(ref: str) -> bool:
    return ref.startswith("p")


def ref_index(ref: str) -> int:
    return int(ref[1:])


SIDE_E, SIDE_SE, SIDE_SW, SIDE_W, SIDE_NW, SIDE_NE = range(6)

_OPPOSITE_SIDE = (SIDE_W, SIDE_NW, SIDE_NE, SIDE_E, SIDE_SE, SIDE_SW)

# Neighbour cell across each side, for even and odd rows (odd-r offset).
_NEIGHBOR_EVEN = ((0, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0))
_NEIGHBOR_ODD = ((0, 1), (1, 1), (1, 0), (0, -1), (-1, 0), (-1, 1))

# Lattice offsets of the six hexagon corners relative to the cell centre.
_CORNER_N = (0, -2)
_CORNER_NE = (1, -1)
_CORNER_SE = (1, 1)
_CORNER_S = (0, 2)
_CORNER_SW = (-1, 1)
_CORNER_NW = (-1, -1)

# The two corners bounding each side, in side-index order E..NE.
_SIDE_CORNERS = (
    (_CORNER_NE, _CORNER_SE),
    (_CORNER_SE, _CORNER_S),
    (_CORNER_S, _CORNER_SW),
    (_CORNER_SW, _CORNER_NW),
    (_CORNER_NW, _CORNER_N),
    (_CORNER_N, _CORNER_NE),
)

SLOT_LEFT_TOP, SLOT_LEFT_BOTTOM, SLOT_RIGHT_TOP, SLOT_RIGHT_BOTTOM = range(4)

SLOT_NAMES = ("left_top", "left_bottom", "right_top", "right_bottom")

BAR, CROSS = "bar", "cross"

# The eight directed arms of a PUC as (tail slot, head slot, kind).  Reverse
# pairs are adjacent, so in a built mesh arm 8*p+2*i+1 reverses 8*p+2*i.
_ARM_PLAN = (
    (SLOT_LEFT_TOP, SLOT_RIGHT_TOP, BAR),
    (SLOT_RIGHT_TOP, SLOT_LEFT_TOP, BAR),
    (SLOT_LEFT_BOTTOM, SLOT_RIGHT_BOTTOM, BAR),
    (SLOT_RIGHT_BOTTOM, SLOT_LEFT_BOTTOM, BAR),
    (SLOT_LEFT_TOP, SLOT_RIGHT_BOTTOM, CROSS),
    (SLOT_RIGHT_BOTTOM, SLOT_LEFT_TOP, CROSS),
    (SLOT_LEFT_BOTTOM, SLOT_RIGHT_TOP, CROSS),
    (SLOT_RIGHT_TOP, SLOT_LEFT_BOTTOM, CROSS),
)


@dataclass(frozen=True)
class CellCoord:
    row: int
    col: int


@dataclass(frozen=True)
class Puc:
    """One 2x2 gate sitting on a hexagon side.

    ``terminals`` holds the endpoint reference bound to each of the four
    slots in order left_top, left_bottom, right_top, right_bottom.
    """

    id: int
    owner: CellCoord
    side: int
    terminals: tuple[str, str, str, str]


@dataclass(frozen=True)
class JunctionVertex:
    """Fusion point of two PUC ends; each side contributes four arms."""

    id: int
    side_a: tuple[int, ...]
    side_b: tuple[int, ...]
    # Builder annotations; imported topologies may leave them unset.
    corner: tuple[int, int] | None = field(default=None, compare=False)
    cell: tuple[int, int] | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Port:
    """Unfused boundary terminal: two arms in, two arms out."""

    id: int
    in_arms: tuple[int, ...]
    out_arms: tuple[int, ...]
    corner: tuple[int, int] | None = field(default=None, compare=False)


@dataclass(frozen=True)
class DirectedArm:
    id: int
    puc: int
    kind: str  # "bar" or "cross"
    tail: str
    head: str


@dataclass(frozen=True)
class MeshTopology:
    height: int
    width: int
    pucs: tuple[Puc, ...]
    vertices: tuple[JunctionVertex, ...]
    ports: tuple[Port, ...]
    arms: tuple[DirectedArm, ...]
    # Derived lookup tables, not part of equality.
    arms_by_tail: Mapping[str, tuple[int, ...]] = field(compare=False, repr=False, default=None)  # type: ignore[assignment]
    arms_by_head: Mapping[str, tuple[int, ...]] = field(compare=False, repr=False, default=None)  # type: ignore[assignment]
    arms_by_puc: Mapping[int, tuple[int, ...]] = field(compare=False, repr=False, default=None)  # type: ignore[assignment]
    reverse_arm: Mapping[int, int] = field(compare=False, repr=False, default=None)  # type: ignore[assignment]

    @classmethod
    def assemble(
        cls,
        height: int,
        width: int,
        pucs: Iterable[Puc],
        vertices: Iterable[JunctionVertex],
        ports: Iterable[Port],
        arms: Iterable[DirectedArm],
        validate: bool = True,
    ) -> "MeshTopology":
        pucs = tuple(pucs)
        vertices = tuple(vertices)
        ports = tuple(ports)
        arms = tuple(arms)
        by_tail: dict[str, list[int]] = {}
        by_head: dict[str, list[int]] = {}
        by_puc: dict[int, list[int]] = {}
        for arm in arms:
            by_tail.setdefault(arm.tail, []).append(arm.id)
            by_head.setdefault(arm.head, []).append(arm.id)
            by_puc.setdefault(arm.puc, []).append(arm.id)
        arm_by_signature = {(a.puc, a.kind, a.tail, a.head): a.id for a in arms}
        reverse = {}
        for a in arms:
            mate = arm_by_signature.get((a.puc, a.kind, a.head, a.tail))
            if mate is not None:
                reverse[a.id] = mate
        topology = cls(
            height=height,
            width=width,
            pucs=pucs,
            vertices=vertices,
            ports=ports,
            arms=arms,
            arms_by_tail={k: tuple(v) for k, v in by_tail.items()},
            arms_by_head={k: tuple(v) for k, v in by_head.items()},
            arms_by_puc={k: tuple(v) for k, v in by_puc.items()},
            reverse_arm=reverse,
        )
        if validate:
            validate_topology(topology)
        return topology

    def vertex(self, ref: str) -> JunctionVertex:
        return self.vertices[ref_index(ref)]

    def port(self, ref: str) -> Port:
        return self.ports[ref_index(ref)]

    def endpoint_exists(self, ref: str) -> bool:
        try:
            i = ref_index(ref)
        except (ValueError, IndexError):
            return False
        if is_vertex_ref(ref):
            return 0 <= i < len(self.vertices) and self.vertices[i].id == i
        if is_port_ref(ref):
            return 0 <= i < len(self.ports) and self.ports[i].id == i
        return False

    def arm_sides_at(self, vertex_index: int) -> dict[int, int]:
        """Map arm id -> side index (0 or 1) at the given vertex."""
        v = self.vertices[vertex_index]
        sides = {a: 0 for a in v.side_a}
        sides.update({a: 1 for a in v.side_b})
        return sides


def cell_center(row: int, col: int) -> tuple[int, int]:
    return (2 * col + (row & 1), 3 * row)


def neighbor_cell(row: int, col: int, side: int) -> tuple[int, int]:
    dr, dc = (_NEIGHBOR_ODD if row & 1 else _NEIGHBOR_EVEN)[side]
    return (row + dr, col + dc)


def _side_corners(row: int, col: int, side: int) -> tuple[tuple[int, int], tuple[int, int]]:
    cx, cy = cell_center(row, col)
    (ax, ay), (bx, by) = _SIDE_CORNERS[side]
    return ((cx + ax, cy + ay), (cx + bx, cy + by))


def build_hex_mesh(height: int, width: int) -> MeshTopology:
    """Construct the full mesh for a height x width grid of hexagon cells.

    Construction is deterministic: ids of every entity kind are dense and
    assigned in a fixed scan order, so two calls with equal dimensions yield
    identical topologies.
    """
    if height < 1 or width < 1:
        raise MeshError("mesh_dimensions", f"mesh must be at least 1x1, got {height}x{width}")

    def in_grid(cell: tuple[int, int]) -> bool:
        return 0 <= cell[0] < height and 0 <= cell[1] < width

    # One PUC per geometric side.  A side shared by two cells is owned by the
    # lexicographically smaller (row, col, side) claim.
    puc_geo = []  # per puc: (owner, side, left corner, right corner, flank top, flank bottom)
    for row in range(height):
        for col in range(width):
            for side in range(6):
                across = neighbor_cell(row, col, side)
                if in_grid(across) and (across[0], across[1], _OPPOSITE_SIDE[side]) < (row, col, side):
                    continue
                c1, c2 = _side_corners(row, col, side)
                left, right = (c1, c2) if c1 < c2 else (c2, c1)
                dx, dy = right[0] - left[0], right[1] - left[1]
                flanks = []
                for cell in ((row, col), across):
                    px, py = cell_center(*cell)
                    cross = dx * (py - left[1]) - dy * (px - left[0])
                    flanks.append((cross, cell))
                (ka, cell_a), (kb, cell_b) = flanks
                if ka * kb >= 0:
                    raise AssertionError("side flanks must straddle the side line")
                # Fixed lane convention: the flank with negative cross product
                # is "top".
                top = cell_a if ka < 0 else cell_b
                bottom = cell_b if ka < 0 else cell_a
                puc_geo.append(((row, col), side, left, right, top, bottom))

    # Index PUC ends by lattice corner.
    ends_at_corner: dict[tuple[int, int], list[tuple[int, int]]] = {}  # corner -> [(puc, end)]
    for puc_id, (_, _, left, right, _, _) in enumerate(puc_geo):
        ends_at_corner.setdefault(left, []).append((puc_id, 0))
        ends_at_corner.setdefault(right, []).append((puc_id, 1))

    def flank_cells(puc_id: int) -> tuple[tuple[int, int], tuple[int, int]]:
        return (puc_geo[puc_id][4], puc_geo[puc_id][5])

    def slot_of(puc_id: int, end: int, flank: tuple[int, int]) -> int:
        top, _ = flank_cells(puc_id)
        lane = 0 if flank == top else 1  # 0=top, 1=bottom
        return end * 2 + lane  # LT=0, LB=1, RT=2, RB=3

    # Fuse terminals: at every corner, each pair of incident PUC ends whose
    # sides flank a common cell position joins the terminals facing that
    # position into one junction vertex.  The shared position may lie outside
    # the grid; the fusion still happens (boundary sides still meet there).
    binding: dict[tuple[int, int], str] = {}  # (puc, slot) -> endpoint ref
    vertex_meta = []  # (corner, shared cell, (puc_a, slot_a), (puc_b, slot_b))
    for corner in sorted(ends_at_corner, key=lambda xy: (xy[1], xy[0])):
        ends = sorted(ends_at_corner[corner])
        for (puc_a, end_a), (puc_b, end_b) in itertools.combinations(ends, 2):
            shared = set(flank_cells(puc_a)) & set(flank_cells(puc_b))
            if not shared:
                continue
            if len(shared) != 1:
                raise AssertionError("two distinct sides share at most one flank cell")
            cell = shared.pop()
            vid = len(vertex_meta)
            slot_a = slot_of(puc_a, end_a, cell)
            slot_b = slot_of(puc_b, end_b, cell)
            for key in ((puc_a, slot_a), (puc_b, slot_b)):
                if key in binding:
                    raise AssertionError(f"terminal {key} fused twice")
                binding[key] = vertex_ref(vid)
            vertex_meta.append((corner, cell, (puc_a, slot_a), (puc_b, slot_b)))

    # Leftover terminals become ports, enumerated corner by corner so that
    # port ids sweep the boundary from the top-left corner down to the
    # bottom-right one.
    port_meta = []  # (corner, puc, slot)
    for corner in sorted(ends_at_corner, key=lambda xy: (xy[1], xy[0])):
        for puc_id, end in sorted(ends_at_corner[corner]):
            for slot in (end * 2, end * 2 + 1):
                if (puc_id, slot) not in binding:
                    binding[(puc_id, slot)] = port_ref(len(port_meta))
                    port_meta.append((corner, puc_id, slot))

    pucs = []
    for puc_id, ((row, col), side, _, _, _, _) in enumerate(puc_geo):
        terminals = tuple(binding[(puc_id, slot)] for slot in range(4))
        pucs.append(Puc(id=puc_id, owner=CellCoord(row, col), side=side, terminals=terminals))

    arms = []
    for puc in pucs:
        for tail_slot, head_slot, kind in _ARM_PLAN:
            arms.append(
                DirectedArm(
                    id=len(arms),
                    puc=puc.id,
                    kind=kind,
                    tail=puc.terminals[tail_slot],
                    head=puc.terminals[head_slot],
                )
            )

    def incident_arms(puc_id: int, ref: str) -> tuple[int, ...]:
        base = puc_id * 8
        return tuple(a.id for a in arms[base : base + 8] if a.tail == ref or a.head == ref)

    vertices = []
    for vid, (corner, cell, (puc_a, _), (puc_b, _)) in enumerate(vertex_meta):
        ref = vertex_ref(vid)
        vertices.append(
            JunctionVertex(
                id=vid,
                side_a=incident_arms(puc_a, ref),
                side_b=incident_arms(puc_b, ref),
                corner=corner,
                cell=cell,
            )
        )

    ports = []
    for pid, (corner, puc_id, _) in enumerate(port_meta):
        ref = port_ref(pid)
        incident = incident_arms(puc_id, ref)
        ports.append(
            Port(
                id=pid,
                in_arms=tuple(a for a in incident if arms[a].head == ref),
                out_arms=tuple(a for a in incident if arms[a].tail == ref),
                corner=corner,
            )
        )

    return MeshTopology.assemble(height, width, pucs, vertices, ports, arms)


def enumerate_ports(topology: MeshTopology) -> list[str]:
    """Boundary ports in canonical order.

    For built meshes the id order already sweeps lattice corners from
    top-left to bottom-right, so this is simply ports by id.
    """
    return [port_ref(p.id) for p in topology.ports]


def validate_topology(topology: MeshTopology) -> None:
    """Check every structural invariant; raise MeshError naming the first violated one."""
    pucs, vertices, ports, arms = topology.pucs, topology.vertices, topology.ports, topology.arms

    for seq, label in ((pucs, "puc"), (vertices, "vertex"), (ports, "port"), (arms, "arm")):
        for i, item in enumerate(seq):
            if item.id != i:
                raise MeshError("dense_ids", f"{label} ids must be dense and ordered, found id {item.id} at position {i}")

    for puc in pucs:
        if len(puc.terminals) != 4:
            raise MeshError("puc_terminals", f"puc {puc.id} must own exactly 4 terminals, has {len(puc.terminals)}")
        if not 0 <= puc.side <= 5:
            raise MeshError("puc_side", f"puc {puc.id} side index {puc.side} out of range 0..5")
        for ref in puc.terminals:
            if not topology.endpoint_exists(ref):
                raise MeshError("terminal_binding", f"puc {puc.id} terminal bound to unknown endpoint {ref!r}")

    if len(arms) != 8 * len(pucs):
        raise MeshError("arm_count", f"expected 8 arms per puc ({8 * len(pucs)}), found {len(arms)}")

    for puc in pucs:
        expected = set()
        for tail_slot, head_slot, kind in _ARM_PLAN:
            tail, head = puc.terminals[tail_slot], puc.terminals[head_slot]
            if tail == head:
                raise MeshError("arm_endpoints", f"puc {puc.id} binds slots {tail_slot} and {head_slot} to the same endpoint {tail!r}")
            expected.add((kind, tail, head))
        actual = set()
        for arm_id in topology.arms_by_puc.get(puc.id, ()):
            arm = arms[arm_id]
            actual.add((arm.kind, arm.tail, arm.head))
        if actual != expected:
            raise MeshError("arm_wiring", f"puc {puc.id} arms do not form the 2 bar + 2 cross reverse pairs over its terminals")

    # Terminal conservation: each vertex consumes exactly two terminals, each
    # port exactly one, so 4*|pucs| = 2*|vertices| + |ports|.
    seen: dict[str, int] = {}
    for puc in pucs:
        for ref in puc.terminals:
            seen[ref] = seen.get(ref, 0) + 1
    for v in vertices:
        if seen.get(vertex_ref(v.id), 0) != 2:
            raise MeshError("vertex_degree", f"vertex {v.id} must terminate exactly 2 puc terminals, has {seen.get(vertex_ref(v.id), 0)}")
    for p in ports:
        if seen.get(port_ref(p.id), 0) != 1:
            raise MeshError("port_degree", f"port {p.id} must terminate exactly 1 puc terminal, has {seen.get(port_ref(p.id), 0)}")
    if 4 * len(pucs) != 2 * len(vertices) + len(ports):
        raise MeshError("terminal_conservation", f"4*{len(pucs)} != 2*{len(vertices)} + {len(ports)}")

    for v in vertices:
        ref = vertex_ref(v.id)
        if len(v.side_a) != 4 or len(v.side_b) != 4:
            raise MeshError("vertex_sides", f"vertex {v.id} sides must hold 4 arms each, got {len(v.side_a)} and {len(v.side_b)}")
        if set(v.side_a) & set(v.side_b):
            raise MeshError("vertex_sides", f"vertex {v.id} sides overlap")
        for side_arms in (v.side_a, v.side_b):
            owners = set()
            for arm_id in side_arms:
                if not 0 <= arm_id < len(arms):
                    raise MeshError("vertex_sides", f"vertex {v.id} references unknown arm {arm_id}")
                arm = arms[arm_id]
                if arm.tail != ref and arm.head != ref:
                    raise MeshError("vertex_sides", f"vertex {v.id} lists arm {arm_id} that does not touch it")
                owners.add(arm.puc)
            if len(owners) != 1:
                raise MeshError("vertex_sides", f"vertex {v.id} side mixes arms of pucs {sorted(owners)}")
        incident = set(topology.arms_by_tail.get(ref, ())) | set(topology.arms_by_head.get(ref, ()))
        if incident != set(v.side_a) | set(v.side_b):
            raise MeshError("vertex_sides", f"vertex {v.id} sides do not cover its incident arms")

    for p in ports:
        ref = port_ref(p.id)
        if len(p.in_arms) != 2 or len(p.out_arms) != 2:
            raise MeshError("port_arms", f"port {p.id} must have 2 in and 2 out arms, got {len(p.in_arms)} and {len(p.out_arms)}")
        if tuple(sorted(p.in_arms)) != tuple(sorted(topology.arms_by_head.get(ref, ()))):
            raise MeshError("port_arms", f"port {p.id} in_arms do not match arms headed at it")
        if tuple(sorted(p.out_arms)) != tuple(sorted(topology.arms_by_tail.get(ref, ()))):
            raise MeshError("port_arms", f"port {p.id} out_arms do not match arms tailed at it")
