"""Conforming piecewise-linear finite elements on the metric graph.

Independent verification path for every spectral claim.  Each edge is
subdivided into equal intervals carrying hat functions; one extra degree
of freedom per vertex-space basis vector ties the edge endpoint values
to that basis vector's slot coordinates, which enforces boundary values
inside the space conformingly (complement directions simply carry no
degree of freedom).  The coupling operator enters the stiffness matrix
as a subtraction on the vertex block, matching the quadratic form
``integral |f'|^2 - <L fbar, fbar>``.  Nothing in this module consumes
Q matrices or solution maps; comparisons happen only in test harnesses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalError, ValidationError
from .graph import HEAD, TAIL, MetricGraph
from .krein import EigenfunctionSample
from .linalg import eigenvalues, hermitize, lu_solve, max_abs
from .vertex_space import VertexSpace


@dataclass(frozen=True)
class FemSystem:
    """Assembled stiffness and mass matrices with DOF bookkeeping.

    Degrees of freedom: all interior nodes edge by edge, then one DOF
    per vertex-space basis vector.  ``interior_offset[i]`` is the first
    interior DOF of edge i; edge i owns ``subdivisions[i] - 1`` of them.
    """

    graph: MetricGraph
    space: VertexSpace
    subdivisions: tuple[int, ...]
    stiffness: np.ndarray
    mass: np.ndarray
    interior_offset: tuple[int, ...]
    n_interior: int

    @property
    def dim(self) -> int:
        return self.n_interior + self.space.dim

    def edge_widths(self) -> list[float]:
        return [e.length / n for e, n in zip(self.graph.edges, self.subdivisions)]

    def endpoint_coefficients(self, edge_idx: int, end: int):
        """(vertex-DOF index, coefficient) pairs describing an endpoint value."""
        g, vs = self.graph, self.space
        e = g.edges[edge_idx]
        slot = g.slot_index(e.edge_id, end)
        vertex = e.tail if end == TAIL else e.head
        out = []
        base = vs.offsets[vertex]
        for i in range(vs.dims[vertex]):
            coef = vs.basis_matrix[base + i, slot]
            out.append((self.n_interior + base + i, coef))
        return out

    def nodal_values(self, solution, edge_idx: int) -> np.ndarray:
        """Values at all nodes of one edge, endpoints reconstructed."""
        n = self.subdivisions[edge_idx]
        off = self.interior_offset[edge_idx]
        vals = np.zeros(n + 1, dtype=complex)
        vals[1:n] = solution[off:off + n - 1]
        for end, pos in ((TAIL, 0), (HEAD, n)):
            acc = 0.0 + 0.0j
            for dof, coef in self.endpoint_coefficients(edge_idx, end):
                acc += coef * solution[dof]
            vals[pos] = acc
        return vals


def subdivisions_for(g: MetricGraph, h: float) -> tuple[int, ...]:
    if not h > 0:
        raise ValidationError("mesh width h must be positive")
    if h > g.length_min / 4.0:
        raise ValidationError(
            f"mesh width {h} too large; need h <= min length / 4 = "
            f"{g.length_min / 4.0}")
    return tuple(int(math.ceil(e.length / h)) for e in g.edges)


def assemble_fem(g: MetricGraph, vs: VertexSpace, coupling, h: float,
                 subdivisions=None) -> FemSystem:
    """Assemble stiffness and mass for the vertex conditions (space, L).

    ``subdivisions`` overrides the per-edge interval counts (used to
    build exactly nested refinement pairs).  The mass matrix is positive
    definite; stiffness is Hermitian and carries the coupling correction
    on the vertex block.
    """
    if subdivisions is None:
        subdivisions = subdivisions_for(g, h)
    subdivisions = tuple(int(n) for n in subdivisions)
    if any(n < 2 for n in subdivisions):
        raise ValidationError("every edge needs at least two subintervals")
    coupling = hermitize(np.asarray(coupling, dtype=complex)
                         .reshape(vs.dim, vs.dim))
    offsets = []
    n_int = 0
    for n in subdivisions:
        offsets.append(n_int)
        n_int += n - 1
    dim = n_int + vs.dim
    k = np.zeros((dim, dim), dtype=complex)
    m = np.zeros((dim, dim), dtype=complex)
    sys_tmp = FemSystem(g, vs, subdivisions, k, m, tuple(offsets), n_int)

    for idx, (e, n) in enumerate(zip(g.edges, subdivisions)):
        he = e.length / n
        off = offsets[idx]
        ii = np.arange(off, off + n - 1)
        k[ii, ii] += 2.0 / he
        m[ii, ii] += 2.0 * he / 3.0
        k[ii[:-1], ii[1:]] += -1.0 / he
        k[ii[1:], ii[:-1]] += -1.0 / he
        m[ii[:-1], ii[1:]] += he / 6.0
        m[ii[1:], ii[:-1]] += he / 6.0
        for end, neighbor in ((TAIL, off), (HEAD, off + n - 2)):
            coefs = sys_tmp.endpoint_coefficients(idx, end)
            for dof_a, ca in coefs:
                k[dof_a, dof_a] += abs(ca) ** 2 / he
                m[dof_a, dof_a] += abs(ca) ** 2 * he / 3.0
                k[dof_a, neighbor] += -np.conj(ca) / he
                k[neighbor, dof_a] += -ca / he
                m[dof_a, neighbor] += np.conj(ca) * he / 6.0
                m[neighbor, dof_a] += ca * he / 6.0
                for dof_b, cb in coefs:
                    if dof_b != dof_a:
                        k[dof_a, dof_b] += np.conj(ca) * cb / he
                        m[dof_a, dof_b] += np.conj(ca) * cb * he / 3.0

    if vs.dim:
        k[n_int:, n_int:] -= coupling
    return FemSystem(g, vs, subdivisions, hermitize(k, rtol=1e-9),
                     hermitize(m, rtol=1e-9), tuple(offsets), n_int)


def fem_eigenvalues(sys: FemSystem, count: int) -> np.ndarray:
    """Lowest eigenvalues of K x = lam M x via Cholesky reduction."""
    if count > sys.dim // 4:
        raise ValidationError(
            f"count {count} exceeds dimension/4 = {sys.dim // 4}")
    try:
        chol = np.linalg.cholesky(sys.mass)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"mass matrix not positive definite: {exc}") from None
    y = scipy.linalg.solve_triangular(chol, sys.stiffness, lower=True)
    c = scipy.linalg.solve_triangular(chol, y.conj().T, lower=True).conj().T
    w = eigenvalues(hermitize(c, rtol=1e-8))
    return w[:count]


@dataclass(frozen=True)
class ConvergenceReport:
    """Two-level eigenvalue estimates with Richardson extrapolation.

    ``order`` is the observed convergence rate; it is NaN when both
    levels already agree to roundoff (exactly represented eigenvalues
    such as 0 for constant modes).
    """

    index: int
    coarse: float
    fine: float
    extrapolated: float
    order: float


def fem_spectrum(g: MetricGraph, vs: VertexSpace, coupling, h: float,
                 count: int) -> list[ConvergenceReport]:
    """Extrapolated lowest eigenvalues from the nested pair (h, h/2).

    The fine level doubles every edge's subdivision count, so the
    coarse space is contained in the fine one and eigenvalues decrease
    monotonically under refinement.
    """
    subs = subdivisions_for(g, h)
    coarse_sys = assemble_fem(g, vs, coupling, h, subs)
    fine_sys = assemble_fem(g, vs, coupling, h, tuple(2 * n for n in subs))
    coarse = fem_eigenvalues(coarse_sys, count)
    fine = fem_eigenvalues(fine_sys, count)
    out = []
    for i, (lc, lf) in enumerate(zip(coarse, fine)):
        star = (4.0 * lf - lc) / 3.0
        num, den = lc - star, lf - star
        if abs(num) < 1e-12 * (1.0 + abs(star)) or abs(den) < 1e-14 * (1.0 + abs(star)):
            order = float("nan")
        else:
            ratio = num / den
            order = math.log2(ratio) if ratio > 0 else float("nan")
        out.append(ConvergenceReport(i, float(lc), float(lf), float(star), order))
    return out


def _interpolate_to_nodes(sys: FemSystem, samples) -> np.ndarray:
    """Nodal load vector entries from per-edge equispaced samples."""
    g, vs = sys.graph, sys.space
    r = np.zeros(sys.dim, dtype=complex)
    endpoint_slots = np.zeros(vs.n_slots, dtype=complex)
    for idx, e in enumerate(g.edges):
        arr = np.asarray(samples[idx], dtype=complex)
        xs = np.linspace(0.0, e.length, arr.size)
        n = sys.subdivisions[idx]
        nodes = np.linspace(0.0, e.length, n + 1)
        vals = np.interp(nodes, xs, arr.real) + 1j * np.interp(nodes, xs, arr.imag)
        off = sys.interior_offset[idx]
        r[off:off + n - 1] = vals[1:n]
        endpoint_slots[g.slot_index(e.edge_id, TAIL)] = vals[0]
        endpoint_slots[g.slot_index(e.edge_id, HEAD)] = vals[n]
    if vs.dim:
        r[sys.n_interior:] = vs.coordinates(endpoint_slots)
    return r


def fem_resolvent_apply(sys: FemSystem, z, samples, n_out: int = 400) -> EigenfunctionSample:
    """Apply the discrete resolvent (K - z M)^{-1} M to sampled data.

    ``samples`` holds one equispaced array per edge (any resolution);
    values are interpolated to the mesh nodes, the shifted system is
    solved, and the piecewise-linear result is resampled on n_out + 1
    points per edge.  Fails when z is too close to a discrete
    eigenvalue (singular pivot).
    """
    z = complex(z)
    r = _interpolate_to_nodes(sys, samples)
    lhs = sys.stiffness - z * sys.mass
    try:
        x = lu_solve(lhs, sys.mass @ r)
    except NumericalError as exc:
        raise NumericalError(
            f"resolvent solve failed at z = {z}: {exc}") from None
    g = sys.graph
    out_samples = []
    value_trace = np.zeros(g_slot_count(g), dtype=complex)
    deriv_trace = np.zeros(g_slot_count(g), dtype=complex)
    for idx, e in enumerate(g.edges):
        n = sys.subdivisions[idx]
        he = e.length / n
        nodes = np.linspace(0.0, e.length, n + 1)
        vals = sys.nodal_values(x, idx)
        xs = np.linspace(0.0, e.length, n_out + 1)
        res = np.interp(xs, nodes, vals.real) + 1j * np.interp(xs, nodes, vals.imag)
        out_samples.append(res)
        value_trace[g.slot_index(e.edge_id, TAIL)] = vals[0]
        value_trace[g.slot_index(e.edge_id, HEAD)] = vals[n]
        # one-sided first-order derivative estimates, oriented outward
        deriv_trace[g.slot_index(e.edge_id, TAIL)] = -(vals[1] - vals[0]) / he
        deriv_trace[g.slot_index(e.edge_id, HEAD)] = (vals[n] - vals[n - 1]) / he
    return EigenfunctionSample(z, n_out, tuple(out_samples), value_trace,
                               deriv_trace)


def g_slot_count(g: MetricGraph) -> int:
    return len(g.slots.slots)


def sample_function(g: MetricGraph, fns, n: int = 400):
    """Sample per-edge callables on n + 1 equispaced points per edge."""
    out = []
    for e, fn in zip(g.edges, fns):
        xs = np.linspace(0.0, e.length, n + 1)
        out.append(np.asarray([complex(fn(x)) for x in xs]))
    return out


def galerkin_monotone(g: MetricGraph, vs: VertexSpace, coupling, h: float,
                      count: int, slack: float = 1e-12) -> bool:
    """Eigenvalues may not increase under the nested refinement."""
    reports = fem_spectrum(g, vs, coupling, h, count)
    return all(r.fine <= r.coarse + slack * (1.0 + abs(r.coarse))
               for r in reports)


def match_points(reference, candidates, rtol: float) -> bool:
    """Multiset match of two ascending float lists at relative tolerance."""
    if len(reference) != len(candidates):
        return False
    return all(abs(a - b) <= rtol * (1.0 + abs(a))
               for a, b in zip(sorted(reference), sorted(candidates)))
