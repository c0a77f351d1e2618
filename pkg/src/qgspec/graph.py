"""Metric graph model, slot bookkeeping and the text document format.

A metric graph is a finite set of vertices joined by oriented edges of
positive finite length.  Every edge end is a *slot*: the pair (edge, end
sign).
A self-loop contributes two slots at the same vertex, so slot sets at a
vertex form the disjoint union of incoming and outgoing ends.  All matrix
orderings downstream are fixed by the canonical slot order defined here:
slots at a vertex are sorted by ascending edge id with the (-) end before
the (+) end, and the global enumeration walks vertices in index order.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .errors import GraphFormatError, ValidationError

TAIL = -1
HEAD = +1


@dataclass(frozen=True)
class Edge:
    edge_id: int
    tail: int
    head: int
    length: float


@dataclass(frozen=True)
class VertexSlot:
    """One end of one edge, attached to a vertex."""

    vertex: int
    edge: int
    end: int  # TAIL (-1) or HEAD (+1)


@dataclass(frozen=True)
class SlotIndexing:
    """Canonical flat enumeration of all edge ends.

    ``slots[i]`` is the i-th slot globally; ``by_vertex[v]`` lists global
    indices of the slots at vertex v in canonical order; ``index`` maps
    (edge_id, end) to the global index.  ``sum(degrees) == 2 * |E|``.
    """

    slots: tuple[VertexSlot, ...]
    by_vertex: tuple[tuple[int, ...], ...]
    index: dict[tuple[int, int], int] = field(repr=False)
    degrees: tuple[int, ...]


class MetricGraph:
    """Validated combinatorial graph with edge lengths.

    Edges are stored sorted by strictly increasing edge id.  Lengths must
    be positive and finite and no vertex may be isolated.  Instances are
    immutable after construction and safe to share between threads.
    """

    def __init__(self, vertex_count: int, edges):
        if vertex_count < 1:
            raise ValidationError("vertex_count must be a positive integer")
        edges = sorted((Edge(*e) if not isinstance(e, Edge) else e for e in edges),
                       key=lambda e: e.edge_id)
        if not edges:
            raise ValidationError("graph must contain at least one edge")
        seen = set()
        touched = set()
        for e in edges:
            if e.edge_id in seen:
                raise ValidationError(f"duplicate edge_id {e.edge_id}")
            seen.add(e.edge_id)
            for v in (e.tail, e.head):
                if not 0 <= v < vertex_count:
                    raise ValidationError(
                        f"edge {e.edge_id}: endpoint {v} outside 0..{vertex_count - 1}")
            if not (math.isfinite(e.length) and 0.0 < e.length):
                raise ValidationError(
                    f"edge {e.edge_id}: length {e.length} not a positive number")
            touched.add(e.tail)
            touched.add(e.head)
        isolated = sorted(set(range(vertex_count)) - touched)
        if isolated:
            raise ValidationError(f"isolated vertex/vertices: {isolated}")
        self.vertex_count = vertex_count
        self.edges: tuple[Edge, ...] = tuple(edges)
        self.edge_pos = {e.edge_id: i for i, e in enumerate(self.edges)}
        self.slots = vertex_slots(self)

    @property
    def length_min(self) -> float:
        return min(e.length for e in self.edges)

    def is_equilateral(self) -> bool:
        """True when every edge has unit length (exact comparison)."""
        return all(e.length == 1.0 for e in self.edges)

    def edge(self, edge_id: int) -> Edge:
        return self.edges[self.edge_pos[edge_id]]

    def degree(self, v: int) -> int:
        return self.slots.degrees[v]

    def slot_index(self, edge_id: int, end: int) -> int:
        return self.slots.index[(edge_id, end)]

    def __repr__(self):
        return (f"MetricGraph(vertices={self.vertex_count}, "
                f"edges={len(self.edges)})")


def vertex_slots(g: MetricGraph) -> SlotIndexing:
    """Enumerate all slots in canonical order.

    Deterministic across runs: it depends only on vertex indices, edge
    ids and the orientation tags.
    """
    per_vertex: list[list[VertexSlot]] = [[] for _ in range(g.vertex_count)]
    for e in g.edges:
        per_vertex[e.tail].append(VertexSlot(e.tail, e.edge_id, TAIL))
        per_vertex[e.head].append(VertexSlot(e.head, e.edge_id, HEAD))
    flat: list[VertexSlot] = []
    by_vertex: list[tuple[int, ...]] = []
    index: dict[tuple[int, int], int] = {}
    for v in range(g.vertex_count):
        per_vertex[v].sort(key=lambda s: (s.edge, s.end))
        ids = []
        for s in per_vertex[v]:
            index[(s.edge, s.end)] = len(flat)
            ids.append(len(flat))
            flat.append(s)
        by_vertex.append(tuple(ids))
    return SlotIndexing(
        slots=tuple(flat),
        by_vertex=tuple(by_vertex),
        index=index,
        degrees=tuple(len(ids) for ids in by_vertex),
    )


def opposite_slot(g: MetricGraph, s: VertexSlot) -> VertexSlot:
    """The other end of the same edge; an involution on slots."""
    e = g.edge(s.edge)
    if s.end == TAIL:
        return VertexSlot(e.head, s.edge, HEAD)
    return VertexSlot(e.tail, s.edge, TAIL)


# ---------------------------------------------------------------------------
# document format


_COMPLEX_RE = re.compile(
    r"""^(?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
         (?:(?P<im>[+-](?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)i)?$""",
    re.VERBOSE,
)


def parse_complex_token(tok: str) -> complex:
    """Parse ``<re>``, ``<re>+<im>i`` or ``<re>-<im>i``."""
    m = _COMPLEX_RE.match(tok)
    if not m:
        raise ValueError(f"bad complex token {tok!r}")
    re_part = float(m.group("re"))
    im_part = float(m.group("im")) if m.group("im") else 0.0
    return complex(re_part, im_part)


def format_complex_token(z: complex) -> str:
    re_part, im_part = float(z.real), float(z.imag)
    if im_part == 0.0:
        return repr(re_part)
    sign = "+" if im_part >= 0 else "-"
    return f"{re_part!r}{sign}{abs(im_part)!r}i"


_SPACE_KINDS = ("standard", "dirichlet", "neumann")


@dataclass(frozen=True)
class SpaceDecl:
    """Per-vertex vertex-space declaration.

    ``kind`` is one of standard/dirichlet/neumann/custom; ``rows`` holds
    the raw (not yet orthonormalized) basis rows for custom spaces, each
    of length deg v in canonical slot order.
    """

    kind: str
    rows: tuple[tuple[complex, ...], ...] = ()


@dataclass(frozen=True)
class CouplingDecl:
    """Coupling operator declaration: zero, scalar c, or a dense matrix."""

    kind: str
    scalar: float = 0.0
    rows: tuple[tuple[complex, ...], ...] = ()


@dataclass
class GraphDocument:
    graph: MetricGraph
    spaces: dict[int, SpaceDecl]
    coupling: CouplingDecl
    mass: float

    def space_for(self, v: int) -> SpaceDecl:
        """Declared space at v; vertices without a line default to standard."""
        return self.spaces.get(v, SpaceDecl("standard"))


class _Lines:
    """Token stream over non-comment, non-blank document lines."""

    def __init__(self, text: str):
        self.items = []
        for i, raw in enumerate(text.splitlines(), start=1):
            body = raw.split("#", 1)[0].strip()
            if body:
                self.items.append((i, body.split()))
        self.pos = 0

    def next(self, context: str):
        if self.pos >= len(self.items):
            raise GraphFormatError(f"unexpected end of document while reading {context}")
        item = self.items[self.pos]
        self.pos += 1
        return item

    def __iter__(self):
        return self

    def __next__(self):
        if self.pos >= len(self.items):
            raise StopIteration
        return self.next("document")


def _parse_int(tok, what, line):
    try:
        return int(tok)
    except ValueError:
        raise GraphFormatError(f"{what}: expected integer, got {tok!r}", line) from None


def _parse_float(tok, what, line):
    try:
        return float(tok)
    except ValueError:
        raise GraphFormatError(f"{what}: expected number, got {tok!r}", line) from None


def _parse_row(lines, count, context):
    line, toks = lines.next(context)
    if len(toks) != count:
        raise GraphFormatError(
            f"{context}: expected {count} complex tokens, got {len(toks)}", line)
    try:
        return tuple(parse_complex_token(t) for t in toks)
    except ValueError as exc:
        raise GraphFormatError(f"{context}: {exc}", line) from None


def parse_graph(text: str) -> GraphDocument:
    """Parse a graph description document.

    Layout: a ``vertices`` line, then ``edge`` lines, then optional
    ``space``/``coupling``/``mass`` directives (custom and dense blocks
    consume their following data rows).  ``#`` starts a comment.  Raises
    :class:`GraphFormatError` with the offending line number on syntax
    errors and :class:`ValidationError` on invariant violations.
    """
    lines = _Lines(text)
    line, toks = lines.next("'vertices' directive")
    if toks[0] != "vertices" or len(toks) != 2:
        raise GraphFormatError("document must start with 'vertices <n>'", line)
    nv = _parse_int(toks[1], "vertices", line)

    edges = []
    spaces: dict[int, SpaceDecl] = {}
    coupling = None
    mass = None
    edges_done = False

    for line, toks in lines:
        head = toks[0]
        if head == "edge":
            if edges_done:
                raise GraphFormatError(
                    "edge lines must precede space/coupling/mass directives", line)
            if len(toks) != 5:
                raise GraphFormatError(
                    "expected 'edge <id> <tail> <head> <length>'", line)
            eid = _parse_int(toks[1], "edge id", line)
            tail = _parse_int(toks[2], "edge tail", line)
            hd = _parse_int(toks[3], "edge head", line)
            length = _parse_float(toks[4], "edge length", line)
            edges.append(Edge(eid, tail, hd, length))
        elif head == "space":
            edges_done = True
            if len(toks) < 3:
                raise GraphFormatError("expected 'space <vertex> <kind>'", line)
            v = _parse_int(toks[1], "space vertex", line)
            if v in spaces:
                raise GraphFormatError(f"duplicate space declaration for vertex {v}", line)
            kind = toks[2]
            if kind in _SPACE_KINDS:
                if len(toks) != 3:
                    raise GraphFormatError(f"'space {kind}' takes no extra tokens", line)
                spaces[v] = SpaceDecl(kind)
            elif kind == "custom":
                if len(toks) != 4:
                    raise GraphFormatError("expected 'space <vertex> custom <dim>'", line)
                dim = _parse_int(toks[3], "custom dim", line)
                if dim < 0:
                    raise GraphFormatError("custom dim must be nonnegative", line)
                if not 0 <= v < nv:
                    raise GraphFormatError(f"space declaration for unknown vertex {v}", line)
                deg = MetricGraph(nv, edges).degree(v)
                rows = tuple(_parse_row(lines, deg, f"custom row for vertex {v}")
                             for _ in range(dim))
                spaces[v] = SpaceDecl("custom", rows)
            else:
                raise GraphFormatError(f"unknown space kind {kind!r}", line)
        elif head == "coupling":
            edges_done = True
            if coupling is not None:
                raise GraphFormatError("duplicate coupling declaration", line)
            if len(toks) < 2:
                raise GraphFormatError("expected 'coupling zero|scalar|dense ...'", line)
            kind = toks[1]
            if kind == "zero":
                coupling = CouplingDecl("zero")
            elif kind == "scalar":
                if len(toks) != 3:
                    raise GraphFormatError("expected 'coupling scalar <c>'", line)
                coupling = CouplingDecl("scalar", scalar=_parse_float(toks[2], "coupling scalar", line))
            elif kind == "dense":
                if len(toks) != 3:
                    raise GraphFormatError("expected 'coupling dense <dim>'", line)
                dim = _parse_int(toks[2], "coupling dim", line)
                rows = tuple(_parse_row(lines, dim, "coupling row") for _ in range(dim))
                coupling = CouplingDecl("dense", rows=rows)
            else:
                raise GraphFormatError(f"unknown coupling kind {kind!r}", line)
        elif head == "mass":
            edges_done = True
            if mass is not None:
                raise GraphFormatError("duplicate mass declaration", line)
            if len(toks) != 2:
                raise GraphFormatError("expected 'mass <m>'", line)
            mass = _parse_float(toks[1], "mass", line)
        elif head == "vertices":
            raise GraphFormatError("duplicate 'vertices' directive", line)
        else:
            raise GraphFormatError(f"unknown directive {head!r}", line)

    g = MetricGraph(nv, edges)
    for v, decl in spaces.items():
        if not 0 <= v < nv:
            raise ValidationError(f"space declaration for unknown vertex {v}")
        if decl.kind == "custom":
            for row in decl.rows:
                if len(row) != g.degree(v):
                    raise ValidationError(
                        f"custom row at vertex {v} has {len(row)} entries, "
                        f"deg = {g.degree(v)}")
    return GraphDocument(
        graph=g,
        spaces=spaces,
        coupling=coupling if coupling is not None else CouplingDecl("zero"),
        mass=mass if mass is not None else 0.0,
    )


def serialize_graph(doc: GraphDocument) -> str:
    """Render the canonical form; parse(serialize(doc)) reproduces doc."""
    g = doc.graph
    out = [f"vertices {g.vertex_count}"]
    for e in g.edges:
        out.append(f"edge {e.edge_id} {e.tail} {e.head} {e.length!r}")
    for v in range(g.vertex_count):
        decl = doc.space_for(v)
        if decl.kind == "custom":
            out.append(f"space {v} custom {len(decl.rows)}")
            for row in decl.rows:
                out.append(" ".join(format_complex_token(z) for z in row))
        else:
            out.append(f"space {v} {decl.kind}")
    c = doc.coupling
    if c.kind == "zero":
        out.append("coupling zero")
    elif c.kind == "scalar":
        out.append(f"coupling scalar {c.scalar!r}")
    else:
        out.append(f"coupling dense {len(c.rows)}")
        for row in c.rows:
            out.append(" ".join(format_complex_token(z) for z in row))
    if doc.mass != 0.0:
        out.append(f"mass {doc.mass!r}")
    return "\n".join(out) + "\n"
