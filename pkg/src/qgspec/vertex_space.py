"""Vertex spaces: local subspaces of boundary values at each vertex.

A vertex space assigns to every vertex v a subspace of C^(deg v), stored
as an orthonormal basis whose coordinates follow the canonical slot
order.  The global space is the direct sum over vertices, so the global
basis matrix is block-structured: each basis row is supported on a
single vertex's slots.  Projections, orthogonal complements and the
oriented (sign-twisted) complement are all derived from these bases.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .graph import HEAD, MetricGraph, SpaceDecl
from .linalg import hermitize, max_abs

GRAM_SCHMIDT_DROP_TOL = 1e-10
ORTHONORMALITY_TOL = 1e-12


class VertexSpace:
    """Orthonormal per-vertex bases and the induced global basis.

    ``bases[v]`` is a (dim_v, deg_v) complex array whose rows are the
    orthonormal basis vectors of the space at vertex v, in canonical
    slot coordinates.  ``basis_matrix`` stacks all rows into a
    (dim, n_slots) block matrix; coordinates of a slot vector F are
    ``basis_matrix.conj() @ F`` and reconstruction is
    ``basis_matrix.T @ coords``.
    """

    def __init__(self, graph: MetricGraph, bases):
        self.graph = graph
        clean = []
        for v, b in enumerate(bases):
            b = np.asarray(b, dtype=complex).reshape(-1, graph.degree(v))
            gram = b.conj() @ b.T
            if max_abs(gram - np.eye(b.shape[0])) > ORTHONORMALITY_TOL:
                raise ValidationError(f"basis at vertex {v} is not orthonormal")
            clean.append(b)
        if len(clean) != graph.vertex_count:
            raise ValidationError("one basis block per vertex required")
        self.bases: tuple[np.ndarray, ...] = tuple(clean)
        self.dims: tuple[int, ...] = tuple(b.shape[0] for b in clean)
        self.dim: int = int(sum(self.dims))
        n_slots = len(graph.slots.slots)
        bm = np.zeros((self.dim, n_slots), dtype=complex)
        offsets = []
        k = 0
        for v, b in enumerate(clean):
            offsets.append(k)
            cols = graph.slots.by_vertex[v]
            for i in range(b.shape[0]):
                bm[k, list(cols)] = b[i]
                k += 1
        self.offsets: tuple[int, ...] = tuple(offsets)
        self.basis_matrix: np.ndarray = bm

    @property
    def n_slots(self) -> int:
        return self.basis_matrix.shape[1]

    def coordinates(self, slot_vector) -> np.ndarray:
        """Basis coordinates of a slot-space vector (orthogonal projection)."""
        return self.basis_matrix.conj() @ np.asarray(slot_vector, dtype=complex)

    def to_slots(self, coords) -> np.ndarray:
        """Slot-space vector represented by basis coordinates."""
        return self.basis_matrix.T @ np.asarray(coords, dtype=complex)

    def sandwich(self, slot_operator) -> np.ndarray:
        """Compress an operator on slot space to the basis: B* T B."""
        t = np.asarray(slot_operator, dtype=complex)
        return self.basis_matrix.conj() @ t @ self.basis_matrix.T


def _orthonormalize(rows, drop_tol=GRAM_SCHMIDT_DROP_TOL):
    """Modified Gram-Schmidt; rows below the relative drop tolerance vanish."""
    kept = []
    dropped = 0
    for row in rows:
        w = np.array(row, dtype=complex)
        scale = np.linalg.norm(w)
        if scale == 0.0:
            dropped += 1
            continue
        for u in kept:
            w = w - (u.conj() @ w) * u
        # second pass stabilizes nearly dependent inputs
        for u in kept:
            w = w - (u.conj() @ w) * u
        norm = np.linalg.norm(w)
        if norm <= drop_tol * scale:
            dropped += 1
            continue
        kept.append(w / norm)
    return kept, dropped


def build_space(g: MetricGraph, decls) -> VertexSpace:
    """Build a vertex space from per-vertex declarations.

    ``decls`` maps vertex index to :class:`SpaceDecl`; missing vertices
    default to the standard (continuity) space.  Custom rows are
    orthonormalized by modified Gram-Schmidt; dependent rows are dropped
    so the resulting dimension is the numerical rank of the declaration.
    """
    decls = dict(decls or {})
    bases = []
    for v in range(g.vertex_count):
        deg = g.degree(v)
        decl = decls.get(v, SpaceDecl("standard"))
        if decl.kind == "standard":
            bases.append(np.full((1, deg), 1.0 / np.sqrt(deg), dtype=complex))
        elif decl.kind == "dirichlet":
            bases.append(np.zeros((0, deg), dtype=complex))
        elif decl.kind == "neumann":
            bases.append(np.eye(deg, dtype=complex))
        elif decl.kind == "custom":
            for row in decl.rows:
                if len(row) != deg:
                    raise ValidationError(
                        f"custom row at vertex {v}: {len(row)} entries, deg = {deg}")
            kept, dropped = _orthonormalize(decl.rows)
            if decl.rows and not kept:
                raise ValidationError(
                    f"custom space at vertex {v}: all {len(decl.rows)} rows "
                    "numerically dependent or zero")
            basis = np.array(kept, dtype=complex).reshape(len(kept), deg)
            bases.append(basis)
        else:
            raise ValidationError(f"unknown space kind {decl.kind!r}")
    return VertexSpace(g, bases)


def projection_blocks(vs: VertexSpace) -> list[np.ndarray]:
    """Per-vertex orthogonal projections P_v onto the vertex spaces."""
    out = []
    for b in vs.bases:
        p = b.T @ b.conj()
        out.append(hermitize(p, rtol=1e-10))
    return out


def projection(vs: VertexSpace) -> np.ndarray:
    """Global projection onto the space, block diagonal in slot blocks."""
    g = vs.graph
    n = vs.n_slots
    p = np.zeros((n, n), dtype=complex)
    blocks = projection_blocks(vs)
    for v in range(g.vertex_count):
        cols = np.asarray(g.slots.by_vertex[v])
        p[np.ix_(cols, cols)] = blocks[v]
    return p


def dual_space(vs: VertexSpace) -> VertexSpace:
    """Orthogonal complement inside each maximal vertex space.

    The complement basis is produced deterministically by extending each
    vertex basis with coordinate vectors under Gram-Schmidt, so repeated
    runs give identical matrices.
    """
    bases = []
    for v, b in enumerate(vs.bases):
        deg = vs.graph.degree(v)
        want = deg - b.shape[0]
        kept = [row.copy() for row in b]
        comp = []
        for _ in range(want):
            best = None
            best_norm = -1.0
            for j in range(deg):
                cand = np.zeros(deg, dtype=complex)
                cand[j] = 1.0
                for u in kept:
                    cand = cand - (u.conj() @ cand) * u
                for u in kept:
                    cand = cand - (u.conj() @ cand) * u
                norm = np.linalg.norm(cand)
                if norm > best_norm + 1e-12:  # ties resolve to the lowest index
                    best, best_norm = cand, norm
            if best is None or best_norm <= 1e-12:
                raise ValidationError(
                    f"complement construction failed at vertex {v}")
            best = best / best_norm
            kept.append(best)
            comp.append(best)
        bases.append(np.array(comp, dtype=complex).reshape(want, deg))
    return VertexSpace(vs.graph, bases)


def sign_vector(g: MetricGraph) -> np.ndarray:
    """Diagonal of the orientation operator: +1 on head slots, -1 on tails."""
    return np.array([1.0 if s.end == HEAD else -1.0 for s in g.slots.slots])


def oriented_dual(vs: VertexSpace, signs=None) -> VertexSpace:
    """Space of slot vectors whose sign-twisted image lies in the dual.

    Equals the orientation operator applied to the dual basis; with an
    all-(+1) sign pattern it coincides with the plain dual.
    """
    g = vs.graph
    if signs is None:
        signs = sign_vector(g)
    dual = dual_space(vs)
    bases = []
    for v, b in enumerate(dual.bases):
        cols = np.asarray(g.slots.by_vertex[v])
        bases.append(b * signs[cols])
    return VertexSpace(g, bases)
