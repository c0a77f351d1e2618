"""Spectral special functions, boundary-to-solution maps and Q matrices.

Everything here is phrased through two entire functions of the spectral
parameter z: ``c(z) = cos(sqrt z)`` and ``s(z) = sin(sqrt z)/sqrt z``
(value 1 at 0).  Both are even in sqrt z, so no branch bookkeeping is
needed for negative or complex z.  The solution map ``beta`` extends
boundary data to edgewise solutions of -f'' = z f by fundamental
solutions, and Q compresses the resulting oriented derivative traces
back onto the vertex space.  Q is the Dirichlet-to-Neumann family whose
kernel at z detects eigenvalues of the metric operator; with the
outward-derivative trace used here, -Q(z) is a Herglotz family: its
eigenvalue branches strictly decrease along real pole-free intervals
and its imaginary part is negative semidefinite in the upper half
plane.  (The sign is pinned by Q(0) equaling the discrete Laplacian.)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discrete import assemble_delta0
from .errors import NumericalError, PoleWindowError, ValidationError
from .graph import HEAD, TAIL, MetricGraph
from .linalg import hermitize, lu_solve, max_abs
from .vertex_space import VertexSpace, projection

POLE_WINDOW = 1e-8
_TAYLOR_CUT = 1e-4
# cos(sqrt z) and sin1(sqrt z) expanded in z, six terms each
_COS_COEF = (1.0, -1.0 / 2, 1.0 / 24, -1.0 / 720, 1.0 / 40320, -1.0 / 3628800)
_SIN1_COEF = (1.0, -1.0 / 6, 1.0 / 120, -1.0 / 5040, 1.0 / 362880, -1.0 / 39916800)


def _horner(coef, t):
    acc = np.zeros_like(t) + coef[-1]
    for c in reversed(coef[:-1]):
        acc = acc * t + c
    return acc


def cs_values(t):
    """Vectorized (c(t), s(t)) for complex array t."""
    t = np.asarray(t, dtype=complex)
    small = np.abs(t) <= _TAYLOR_CUT
    w = np.sqrt(np.where(small, 1.0, t))
    c = np.where(small, _horner(_COS_COEF, t), np.cos(w))
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(small, _horner(_SIN1_COEF, t), np.sin(w) / w)
    return c, s


def eval_cs(z) -> tuple[complex, complex]:
    """(cos sqrt z, sin1 sqrt z) for a single complex argument."""
    c, s = cs_values(np.asarray([complex(z)]))
    return complex(c[0]), complex(s[0])


def pole_flags(g: MetricGraph, z, window: float = POLE_WINDOW) -> np.ndarray:
    """Per-edge flags, true where sin1 vanishes to within the window."""
    lengths = np.array([e.length for e in g.edges])
    _, s = cs_values(complex(z) * lengths**2)
    return np.abs(s) <= window


def _require_off_poles(g: MetricGraph, z, window: float = POLE_WINDOW):
    flags = pole_flags(g, z, window)
    if flags.any():
        bad = [e.edge_id for e, f in zip(g.edges, flags) if f]
        raise PoleWindowError(z, bad)
    return flags


@dataclass(frozen=True)
class QEvaluation:
    """Q matrix at one spectral point, in vertex-space coordinates."""

    z: complex
    matrix: np.ndarray
    pole_flags: tuple[bool, ...]


def q_slot_operator(g: MetricGraph, z) -> np.ndarray:
    """Derivative-trace operator on full slot space, before compression.

    Acting on slot data F, the value at a slot of edge e is
    ``(c(z l^2) F_here - F_opposite) / (l s(z l^2))``.
    """
    n = len(g.slots.slots)
    t = np.zeros((n, n), dtype=complex)
    for e in g.edges:
        ce, se = eval_cs(complex(z) * e.length**2)
        w = 1.0 / (e.length * se)
        i_tail = g.slot_index(e.edge_id, TAIL)
        i_head = g.slot_index(e.edge_id, HEAD)
        t[i_tail, i_tail] += ce * w
        t[i_tail, i_head] -= w
        t[i_head, i_head] += ce * w
        t[i_head, i_tail] -= w
    return t


def q_general(g: MetricGraph, vs: VertexSpace, z) -> QEvaluation:
    """Q(z) for arbitrary edge lengths.

    Raises :class:`PoleWindowError` when z falls in the pole window of
    any edge (such z belong to the decoupled Dirichlet spectrum and are
    handled as exceptional candidates by the spectrum routines).  For
    real z the result is Hermitian and is symmetrized to working
    precision.
    """
    z = complex(z)
    flags = _require_off_poles(g, z)
    q = vs.sandwich(q_slot_operator(g, z))
    if z.imag == 0.0:
        q = hermitize(q, rtol=1e-10)
    return QEvaluation(z, q, tuple(bool(f) for f in flags))


def q_equilateral(g: MetricGraph, vs: VertexSpace, z,
                  delta: np.ndarray | None = None) -> QEvaluation:
    """Closed form (delta - (1 - c) I) / s for unit edge lengths."""
    if not g.is_equilateral():
        raise ValidationError("closed form requires unit edge lengths")
    z = complex(z)
    flags = _require_off_poles(g, z)
    if delta is None:
        delta = assemble_delta0(g, vs)
    c, s = eval_cs(z)
    q = (delta - (1.0 - c) * np.eye(vs.dim)) / s
    if z.imag == 0.0:
        q = hermitize(q, rtol=1e-10)
    return QEvaluation(z, q, tuple(bool(f) for f in flags))


def q_dirac(g: MetricGraph, vs: VertexSpace, w, m: float) -> QEvaluation:
    """Dirac Q at spectral point w with mass m: Q(w^2 - m^2) / (w + m)."""
    w = complex(w)
    if w == -m:
        raise NumericalError("Dirac Q undefined at w = -m")
    base = q_general(g, vs, w * w - m * m)
    return QEvaluation(w, base.matrix / (w + m), base.pole_flags)


# ---------------------------------------------------------------------------
# solution map


@dataclass(frozen=True)
class EigenfunctionSample:
    """Edgewise samples of a function on the graph plus vertex traces.

    ``samples[i]`` holds N+1 equispaced values on edge i (including both
    endpoints).  ``value_trace`` and ``derivative_trace`` are slot
    vectors: the unoriented endpoint values and the oriented (outward)
    endpoint derivatives.
    """

    z: complex
    n: int
    samples: tuple[np.ndarray, ...]
    value_trace: np.ndarray
    derivative_trace: np.ndarray

    def grid(self, g: MetricGraph, i: int) -> np.ndarray:
        return np.linspace(0.0, g.edges[i].length, self.n + 1)


def _edge_solution(z, length, f_tail, f_head, x):
    """Values of the fundamental-solution combination on one edge."""
    _, s_len = eval_cs(z * length**2)
    _, s_rev = cs_values(z * (length - x) ** 2)
    _, s_fwd = cs_values(z * x**2)
    minus = (length - x) * s_rev / (length * s_len)
    plus = x * s_fwd / (length * s_len)
    return f_tail * minus + f_head * plus


def _edge_derivative(z, length, f_tail, f_head, x):
    c_rev, _ = cs_values(z * (length - x) ** 2)
    c_fwd, _ = cs_values(z * x**2)
    _, s_len = eval_cs(z * length**2)
    return (-f_tail * c_rev + f_head * c_fwd) / (length * s_len)


def beta_apply(g: MetricGraph, vs: VertexSpace, z, coords,
               n: int = 400) -> EigenfunctionSample:
    """Extend vertex-space data to the edgewise solution of -f'' = z f.

    ``coords`` are basis coordinates; the slot expansion supplies the
    two endpoint values per edge, and each edge carries the unique
    solution with those values.  The unoriented value trace reproduces
    the input slot data exactly, and the oriented derivative trace
    compressed to the space equals Q(z) applied to ``coords``.
    """
    z = complex(z)
    _require_off_poles(g, z)
    f_slots = vs.to_slots(coords)
    samples = []
    deriv = np.zeros(len(g.slots.slots), dtype=complex)
    for e in g.edges:
        f_tail = f_slots[g.slot_index(e.edge_id, TAIL)]
        f_head = f_slots[g.slot_index(e.edge_id, HEAD)]
        x = np.linspace(0.0, e.length, n + 1)
        samples.append(_edge_solution(z, e.length, f_tail, f_head, x))
        ends = _edge_derivative(z, e.length, f_tail, f_head,
                                np.array([0.0, e.length]))
        deriv[g.slot_index(e.edge_id, TAIL)] = -ends[0]
        deriv[g.slot_index(e.edge_id, HEAD)] = ends[1]
    return EigenfunctionSample(z, n, tuple(samples), f_slots, deriv)


@dataclass(frozen=True)
class DiracSample:
    """Two-component Dirac eigenfunction samples.

    The first component solves -f'' = (w^2 - m^2) f with the prescribed
    vertex data; the second is its derivative scaled by 1/(w + m).
    """

    w: complex
    mass: float
    component0: EigenfunctionSample
    component1: tuple[np.ndarray, ...]


def beta_apply_dirac(g: MetricGraph, vs: VertexSpace, w, m: float, coords,
                     n: int = 400) -> DiracSample:
    w = complex(w)
    if w == -m:
        raise NumericalError("Dirac solution map undefined at w = -m")
    z = w * w - m * m
    comp0 = beta_apply(g, vs, z, coords, n)
    f_slots = comp0.value_trace
    comp1 = []
    for e in g.edges:
        f_tail = f_slots[g.slot_index(e.edge_id, TAIL)]
        f_head = f_slots[g.slot_index(e.edge_id, HEAD)]
        x = np.linspace(0.0, e.length, n + 1)
        comp1.append(_edge_derivative(z, e.length, f_tail, f_head, x) / (w + m))
    return DiracSample(w, m, comp0, tuple(comp1))


def gram_beta(g: MetricGraph, vs: VertexSpace, z2, z1,
              n: int = 2000) -> np.ndarray:
    """Trapezoid Gram matrix of the solution maps at two points.

    Entry (i, j) approximates the graph integral of
    ``conj(beta(conj z2) b_i) * beta(z1) b_j`` over all edges.
    """
    dim = vs.dim
    gram = np.zeros((dim, dim), dtype=complex)
    basis = np.eye(dim)
    left = [beta_apply(g, vs, np.conj(complex(z2)), basis[k], n) for k in range(dim)]
    right = [beta_apply(g, vs, complex(z1), basis[k], n) for k in range(dim)]
    for i in range(dim):
        for j in range(dim):
            acc = 0.0 + 0.0j
            for e_idx, e in enumerate(g.edges):
                prod = np.conj(left[i].samples[e_idx]) * right[j].samples[e_idx]
                acc += np.trapezoid(prod, dx=e.length / n)
            gram[i, j] = acc
    return gram


# ---------------------------------------------------------------------------
# vertex-condition parametrization and scattering


def ab_parameters(vs: VertexSpace, coupling) -> tuple[np.ndarray, np.ndarray]:
    """Slot-coordinate pair (A, B) encoding A f = B f' vertex conditions.

    In the basis adapted to the space and its complement the pair is
    block diagonal, (coupling, identity) against (identity, zero).  The
    construction always satisfies the two self-adjointness criteria:
    [A | B] has full row rank and A B* is Hermitian; both are verified.
    """
    el = hermitize(np.asarray(coupling, dtype=complex).reshape(vs.dim, vs.dim))
    bg = vs.basis_matrix
    p = projection(vs)
    n = vs.n_slots
    a = bg.T @ el @ bg.conj() + (np.eye(n) - p)
    b = p
    stacked = np.hstack([a, b])
    rank = np.linalg.matrix_rank(stacked, tol=1e-10)
    if rank != n:
        raise NumericalError(
            f"condition pair lost surjectivity: rank {rank} of {n}")
    defect = max_abs(a @ b.conj().T - b @ a.conj().T)
    if defect > 1e-10 * (1.0 + max_abs(a)):
        raise NumericalError(f"A B* is not Hermitian: defect {defect:.3e}")
    return a, b


def scattering_matrix(vs: VertexSpace, coupling, mu: float) -> np.ndarray:
    """Unitary vertex scattering matrix -(A + i mu B)^{-1} (A - i mu B).

    Block form in the adapted basis: the space block is the Cayley-type
    transform of the coupling, the complement block is minus identity.
    For zero coupling the matrix is independent of mu.
    """
    if not mu > 0:
        raise ValidationError("scattering parameter mu must be positive")
    a, b = ab_parameters(vs, coupling)
    lhs = a + 1j * mu * b
    rhs = a - 1j * mu * b
    s = -lu_solve(lhs, rhs)
    defect = max_abs(s.conj().T @ s - np.eye(s.shape[0]))
    if defect > 1e-8:
        raise NumericalError(f"scattering matrix lost unitarity: {defect:.3e}")
    return s
