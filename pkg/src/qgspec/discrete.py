"""Exterior derivative and generalized discrete Laplacians.

The derivative maps a vertex-space element to one number per edge:
the head value minus the tail value, in edge coordinates rescaled by
sqrt(length) so that the weighted one-form norm becomes Euclidean and
the adjoint is the literal conjugate transpose.  The zero-form Laplacian
is d* d on the vertex space; the one-form Laplacian d d* acts on edges.
Their nonzero spectra coincide, and on unit-length graphs the spectra of
a space and its dual complement are mirror images about 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graph import HEAD, TAIL, MetricGraph
from .linalg import eigenvalues, hermitize, operator_norm
from .vertex_space import VertexSpace, dual_space

SPECTRUM_MATCH_TOL = 1e-8


def incidence_matrix(g: MetricGraph) -> np.ndarray:
    """(|E| x n_slots) signed incidence with 1/sqrt(length) weights."""
    n_e = len(g.edges)
    s = np.zeros((n_e, len(g.slots.slots)))
    for i, e in enumerate(g.edges):
        w = 1.0 / np.sqrt(e.length)
        s[i, g.slot_index(e.edge_id, HEAD)] += w
        s[i, g.slot_index(e.edge_id, TAIL)] -= w
    return s


def assemble_d(g: MetricGraph, vs: VertexSpace) -> np.ndarray:
    """Derivative matrix (|E| x dim) in the vertex-space basis.

    Entry (e, k) is (b_k at the head slot - b_k at the tail slot) divided
    by sqrt(length).  A self-loop reads both of its slots at the same
    vertex, so standard spaces annihilate loops.
    """
    return incidence_matrix(g) @ vs.basis_matrix.T


def assemble_delta0(g: MetricGraph, vs: VertexSpace) -> np.ndarray:
    """Zero-form Laplacian d* d, Hermitian positive semidefinite."""
    d = assemble_d(g, vs)
    return hermitize(d.conj().T @ d)


def assemble_delta1(g: MetricGraph, vs: VertexSpace) -> np.ndarray:
    """One-form Laplacian d d* on edge space."""
    d = assemble_d(g, vs)
    return hermitize(d @ d.conj().T)


def derivative_norm_bound(g: MetricGraph) -> float:
    """Upper bound sqrt(2 / min length) for the derivative operator norm."""
    return float(np.sqrt(2.0 / g.length_min))


def check_norm_bounds(g: MetricGraph, vs: VertexSpace, slack: float = 1e-8):
    """Return (||d||, ||delta0||, ok) against the length-based bounds."""
    d = assemble_d(g, vs)
    nd = operator_norm(d)
    ndelta = operator_norm(assemble_delta0(g, vs))
    bound = derivative_norm_bound(g)
    ok = nd <= bound + slack and ndelta <= bound * bound + slack
    return nd, ndelta, ok


@dataclass(frozen=True)
class SupersymmetryReport:
    passed: bool
    spectrum: tuple[float, ...]
    dual_spectrum: tuple[float, ...]
    paired: tuple[tuple[float, float], ...]
    max_defect: float


def _strip(values, specials, tol):
    return [v for v in values if all(abs(v - s) > tol for s in specials)]


def check_supersymmetry(g: MetricGraph, vs: VertexSpace,
                        tol: float = SPECTRUM_MATCH_TOL) -> SupersymmetryReport:
    """Mirror relation between a space and its dual on a unit graph.

    Both spectra are computed, values within tol of {0, 2} are removed,
    and the remainders must match under v -> 2 - v as sorted multisets.
    Only defined for unit edge lengths.
    """
    if not g.is_equilateral():
        raise ValidationError("supersymmetry check requires unit edge lengths")
    spec = sorted(eigenvalues(assemble_delta0(g, vs)).tolist())
    dual = dual_space(vs)
    spec_dual = sorted(eigenvalues(assemble_delta0(g, dual)).tolist())
    a = sorted(_strip(spec, (0.0, 2.0), tol))
    b = sorted(_strip(spec_dual, (0.0, 2.0), tol), key=lambda v: 2.0 - v)
    if len(a) != len(b):
        return SupersymmetryReport(False, tuple(spec), tuple(spec_dual), (), float("inf"))
    paired = tuple(zip(a, b))
    defect = max((abs((2.0 - y) - x) for x, y in paired), default=0.0)
    return SupersymmetryReport(defect <= tol, tuple(spec), tuple(spec_dual),
                               paired, defect)
