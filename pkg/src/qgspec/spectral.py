"""Eigenvalue production: transfer maps, spectral-flow scans, Dirac spectra.

On unit-length graphs with scalar coupling the metric spectrum is the
preimage of the discrete Laplacian spectrum under the entire map
``eta(lam) = s(lam) L0 + 1 - c(lam)``, away from the decoupled Dirichlet
set {(pi k)^2}.  For general lengths or non-scalar coupling the scan
tracks the negative-eigenvalue count of Q(lam) - L: the branches of Q
strictly decrease between poles, so each metric eigenvalue raises the
count by its multiplicity as lam crosses it.  Points on or next to the
Dirichlet set are never classified here; they are emitted as exceptional
candidates for the independent finite-element oracle to settle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .discrete import assemble_delta0
from .errors import NotAnEigenvalueError, ValidationError
from .graph import MetricGraph
from .krein import (EigenfunctionSample, beta_apply, eval_cs, q_equilateral,
                    q_general)
from .linalg import eigenvalues, hermitian_eig, hermitize, max_abs
from .vertex_space import VertexSpace

SOURCE_TRANSFER = "transfer"
SOURCE_SCAN = "scan"
SOURCE_ORACLE = "oracle"
SOURCE_DISCRETE = "discrete"
SOURCE_EXCEPTIONAL = "exceptional-candidate"

POLE_HALF_WIDTH = 1e-6
GRID_PER_UNIT = 64
CLUSTER_TOL = 1e-8


@dataclass(frozen=True)
class SpectralPoint:
    """One (candidate) eigenvalue with bookkeeping.

    ``source`` records which route produced the value; exceptional
    candidates carry multiplicity 1 as a placeholder until an oracle
    resolves them.  ``flags`` holds diagnostics such as a vanishing
    transfer-map derivative at the root.
    """

    value: float
    multiplicity: int
    source: str
    residual: float = 0.0
    flags: tuple[str, ...] = field(default=(), compare=False)


def _sorted_points(points) -> list[SpectralPoint]:
    return sorted(points, key=lambda p: (p.value, p.source))


def cluster_values(values, tol: float = CLUSTER_TOL):
    """Group ascending values into (representative, count) clusters."""
    out: list[tuple[float, int]] = []
    for v in sorted(float(x) for x in values):
        if out and v - out[-1][0] <= tol * (1.0 + abs(out[-1][0])):
            rep, count = out[-1]
            out[-1] = (rep, count + 1)
        else:
            out.append((v, 1))
    return out


def discrete_spectrum(delta, cluster_tol: float = CLUSTER_TOL) -> list[SpectralPoint]:
    """Eigenvalues of a discrete Laplacian with clustered multiplicities."""
    w = eigenvalues(hermitize(delta))
    return [SpectralPoint(v, m, SOURCE_DISCRETE) for v, m in
            cluster_values(w, cluster_tol)]


def dirichlet_points(g: MetricGraph, lo: float, hi: float) -> list[float]:
    """Decoupled Dirichlet eigenvalues (pi k / length)^2 inside [lo, hi]."""
    pts: set[float] = set()
    for e in g.edges:
        k = 1
        while True:
            lam = (math.pi * k / e.length) ** 2
            if lam > hi:
                break
            if lam >= lo:
                pts.add(lam)
            k += 1
    merged: list[float] = []
    for lam in sorted(pts):
        if merged and abs(lam - merged[-1]) <= 1e-12 * (1.0 + lam):
            continue
        merged.append(lam)
    return merged


# ---------------------------------------------------------------------------
# scalar transfer map (unit lengths, scalar coupling)


def transfer_forward(lam: float, coupling_scalar: float) -> float:
    """eta(lam) = s(lam) L0 + 1 - c(lam), entire in lam."""
    c, s = eval_cs(lam)
    return float((s * coupling_scalar + 1.0 - c).real)


def _transfer_derivative(lam: float, coupling_scalar: float) -> float:
    c, s = eval_cs(lam)
    if abs(lam) < 1e-6:
        ds = -1.0 / 6.0 + lam / 60.0
    else:
        ds = (c - s) / (2.0 * lam)
    return float((coupling_scalar * ds + s / 2.0).real)


@dataclass(frozen=True)
class TransferRoot:
    value: float
    band: int
    exceptional: bool
    residual: float
    derivative: float


def _band_index(lam: float) -> int:
    return int(math.floor(math.sqrt(max(lam, 0.0)) / math.pi))


def _near_dirichlet(lam: float, window: float = POLE_HALF_WIDTH) -> bool:
    k = round(math.sqrt(max(lam, 0.0)) / math.pi)
    return k >= 1 and abs(lam - (math.pi * k) ** 2) <= window


def transfer_inverse(eta: float, coupling_scalar: float, lam_max: float,
                     grid_per_band: int = GRID_PER_UNIT) -> list[TransferRoot]:
    """All solutions of transfer_forward(lam) = eta in [0, lam_max].

    With zero coupling the map is 1 - cos(sqrt lam) and roots follow the
    closed form sqrt(lam) in {2 pi m +/- arccos(1 - eta)}; eta outside
    [0, 2] then has no real solutions.  Otherwise each band between
    consecutive Dirichlet points is gridded and sign changes are refined
    by bisection.  Roots inside the Dirichlet windows are flagged
    exceptional.
    """
    if not math.isfinite(lam_max):
        raise ValidationError("lam_max must be finite")
    roots: list[TransferRoot] = []

    def emit(lam: float):
        resid = abs(transfer_forward(lam, coupling_scalar) - eta)
        deriv = _transfer_derivative(lam, coupling_scalar)
        roots.append(TransferRoot(lam, _band_index(lam), _near_dirichlet(lam),
                                  resid, deriv))

    if coupling_scalar == 0.0:
        # discrete eigenvalues live in [0, 2] up to roundoff; snap the ends
        if -1e-9 <= eta < 0.0:
            eta = 0.0
        elif 2.0 < eta <= 2.0 + 1e-9:
            eta = 2.0
        if not 0.0 <= eta <= 2.0:
            return []
        theta = math.acos(min(1.0, max(-1.0, 1.0 - eta)))
        m = 0
        while True:
            cands = sorted({abs(2.0 * math.pi * m - theta),
                            2.0 * math.pi * m + theta})
            live = [t for t in cands if t * t <= lam_max]
            for t in live:
                emit(t * t)
            if not live and m >= 1:
                break
            m += 1
        dedup: list[TransferRoot] = []
        for r in sorted(roots, key=lambda r: r.value):
            if dedup and abs(r.value - dedup[-1].value) <= 1e-12 * (1.0 + r.value):
                continue
            dedup.append(r)
        return dedup

    # banded grid search for energy-dependent coupling
    band = 0
    while (math.pi * band) ** 2 <= lam_max:
        lo = (math.pi * band) ** 2
        hi = min((math.pi * (band + 1)) ** 2, lam_max)
        if band >= 1:
            lo += POLE_HALF_WIDTH
        if (band + 1) ** 2 * math.pi**2 <= lam_max:
            hi -= POLE_HALF_WIDTH
        if hi <= lo:
            band += 1
            continue
        grid = np.linspace(lo, hi, grid_per_band + 1)
        vals = np.array([transfer_forward(t, coupling_scalar) - eta for t in grid])
        for i in range(len(grid) - 1):
            a, b = grid[i], grid[i + 1]
            fa, fb = vals[i], vals[i + 1]
            if fa == 0.0:
                emit(float(a))
                continue
            if fa * fb < 0.0:
                while b - a > 1e-12 * (1.0 + abs(a)):
                    mid = 0.5 * (a + b)
                    fm = transfer_forward(mid, coupling_scalar) - eta
                    if fm == 0.0:
                        a = b = mid
                        break
                    if fa * fm < 0.0:
                        b = mid
                    else:
                        a, fa = mid, fm
                emit(0.5 * (a + b))
        if vals[-1] == 0.0 and hi == lam_max:
            emit(float(grid[-1]))
        band += 1
    return sorted(roots, key=lambda r: r.value)


def metric_spectrum_equilateral(g: MetricGraph, vs: VertexSpace,
                                coupling_scalar: float, lam_max: float,
                                cluster_tol: float = CLUSTER_TOL) -> list[SpectralPoint]:
    """Metric Laplace spectrum on [0, lam_max] by the transfer map.

    Each discrete eigenvalue eta contributes the preimages of eta with
    its multiplicity.  Every decoupled Dirichlet point in range, plus
    any transfer root landing inside a Dirichlet window, is emitted as
    an exceptional candidate instead of a classified eigenvalue.
    """
    if not g.is_equilateral():
        raise ValidationError("transfer spectrum requires unit edge lengths; "
                              "use the scan for general lengths")
    delta = assemble_delta0(g, vs)
    points: list[SpectralPoint] = []
    exceptional: list[float] = [*dirichlet_points(g, 0.0, lam_max)]
    for eta, mult in cluster_values(eigenvalues(delta), cluster_tol):
        for root in transfer_inverse(eta, coupling_scalar, lam_max):
            if root.exceptional:
                exceptional.append(root.value)
                continue
            flags = ()
            if abs(root.derivative) <= 1e-8:
                flags = ("transfer-derivative-vanishes",)
            points.append(SpectralPoint(root.value, mult, SOURCE_TRANSFER,
                                        root.residual, flags))
    for lam in sorted(set(round(v, 9) for v in exceptional)):
        points.append(SpectralPoint(lam, 1, SOURCE_EXCEPTIONAL))
    return _sorted_points(points)


# ---------------------------------------------------------------------------
# spectral-flow scan (general lengths, general Hermitian coupling)


class _FlowCounter:
    """Negative-eigenvalue count of Q(lam) - L along the real axis."""

    def __init__(self, g: MetricGraph, vs: VertexSpace, coupling):
        self.g = g
        self.vs = vs
        self.coupling = hermitize(np.asarray(coupling, dtype=complex)
                                  .reshape(vs.dim, vs.dim))
        self.equilateral = g.is_equilateral()
        self.delta = assemble_delta0(g, vs) if self.equilateral else None

    def matrix(self, lam: float) -> np.ndarray:
        if self.equilateral:
            return q_equilateral(self.g, self.vs, lam, self.delta).matrix \
                - self.coupling
        return q_general(self.g, self.vs, lam).matrix - self.coupling

    def count(self, lam: float) -> int:
        if self.vs.dim == 0:
            return 0
        if self.equilateral:
            # inertia of (delta - (1 - c) - s L) / s without the division:
            # dividing by s < 0 swaps the negative and positive counts
            c, s = eval_cs(lam)
            num = self.delta - (1.0 - c.real) * np.eye(self.vs.dim) \
                - s.real * self.coupling
            w = eigenvalues(hermitize(num, rtol=1e-9))
            if s.real > 0.0:
                return int(np.sum(w < 0.0))
            return int(np.sum(w > 0.0))
        w = eigenvalues(self.matrix(lam))
        return int(np.sum(w < 0.0))

    def smallest_abs_eigenvalue(self, lam: float) -> float:
        if self.vs.dim == 0:
            return math.inf
        w = eigenvalues(self.matrix(lam))
        return float(np.abs(w).min())


def _refine_jumps(counter: _FlowCounter, lo, hi, n_lo, n_hi, out):
    """Split [lo, hi] until every count jump is localized to tolerance."""
    stack = [(lo, hi, n_lo, n_hi)]
    while stack:
        a, b, na, nb = stack.pop()
        jump = nb - na
        if jump <= 0:
            continue
        if b - a <= 1e-10 * (1.0 + abs(b)):
            lam = 0.5 * (a + b)
            out.append(SpectralPoint(lam, jump, SOURCE_SCAN,
                                     counter.smallest_abs_eigenvalue(lam)))
            continue
        mid = 0.5 * (a + b)
        nm = counter.count(mid)
        stack.append((a, mid, na, nm))
        stack.append((mid, b, nm, nb))
    return out


def metric_spectrum_scan(g: MetricGraph, vs: VertexSpace, coupling,
                         lo: float, hi: float,
                         grid_per_unit: int = GRID_PER_UNIT) -> list[SpectralPoint]:
    """Eigenvalues of the metric Laplacian in (lo, hi) by spectral flow.

    The interval is split at the decoupled Dirichlet points, each
    pole-free segment is gridded, and each increase of the negative
    count of Q(lam) - L is refined by bisection; the increase is the
    multiplicity.  Dirichlet points inside the interval are reported as
    exceptional candidates since flow across a pole is not attributable.
    """
    if not hi > lo:
        raise ValidationError("scan interval must satisfy lo < hi")
    counter = _FlowCounter(g, vs, coupling)
    poles = dirichlet_points(g, lo - 1.0, hi + 1.0)
    cuts = [lo, hi]
    for p in poles:
        for t in (p - POLE_HALF_WIDTH, p + POLE_HALF_WIDTH):
            if lo < t < hi:
                cuts.append(t)
    cuts = sorted(set(cuts))
    points: list[SpectralPoint] = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (a + b)
        if any(abs(mid - p) <= POLE_HALF_WIDTH for p in poles):
            continue
        n_grid = max(2, int(math.ceil((b - a) * grid_per_unit)) + 1)
        grid = np.linspace(a, b, n_grid)
        counts = [counter.count(t) for t in grid]
        for i in range(len(grid) - 1):
            _refine_jumps(counter, grid[i], grid[i + 1],
                          counts[i], counts[i + 1], points)
    for p in poles:
        if lo < p < hi:
            points.append(SpectralPoint(p, 1, SOURCE_EXCEPTIONAL))
    return _sorted_points(points)


# ---------------------------------------------------------------------------
# Dirac spectra (unit lengths)


def dirac_exceptional_points(m: float, lo: float, hi: float) -> list[float]:
    """Decoupled Dirac spectrum +/- sqrt((pi k)^2 + m^2), k >= 0, in range."""
    pts = []
    k = 0
    while True:
        base = math.sqrt((math.pi * k) ** 2 + m * m)
        if base > max(abs(lo), abs(hi)) + 1.0:
            break
        for mu in (base, -base):
            if lo <= mu <= hi:
                pts.append(mu)
        k += 1
    return sorted(set(pts))


def dirac_transfer_forward(mu: float, m: float, coupling_scalar: float) -> float:
    """s(mu^2 - m^2) (mu + m) M0 + 1 - c(mu^2 - m^2)."""
    z = mu * mu - m * m
    c, s = eval_cs(z)
    return float((s * (mu + m) * coupling_scalar + 1.0 - c).real)


def dirac_spectrum(g: MetricGraph, vs: VertexSpace, coupling_scalar: float,
                   m: float, lo: float, hi: float,
                   grid_per_unit: int = GRID_PER_UNIT,
                   cluster_tol: float = CLUSTER_TOL) -> list[SpectralPoint]:
    """Dirac eigenvalues with scalar coupling on a unit graph.

    For each discrete eigenvalue eta the scalar equation
    ``dirac_transfer_forward(mu) = eta`` is solved on every component of
    (lo, hi) minus the decoupled-Dirac windows; multiplicities are
    inherited from eta.  Decoupled points in range become exceptional
    candidates, as do roots landing inside their windows.
    """
    if not g.is_equilateral():
        raise ValidationError("Dirac transfer requires unit edge lengths")
    if not hi > lo:
        raise ValidationError("mu range must satisfy lo < hi")
    delta = assemble_delta0(g, vs)
    exceptional = dirac_exceptional_points(m, lo, hi)
    cuts = [lo]
    for p in exceptional:
        cuts.extend([p - POLE_HALF_WIDTH, p + POLE_HALF_WIDTH])
    cuts.append(hi)
    cuts = sorted(t for t in set(cuts) if lo <= t <= hi)
    points: list[SpectralPoint] = []
    for eta, mult in cluster_values(eigenvalues(delta), cluster_tol):
        for a, b in zip(cuts[:-1], cuts[1:]):
            mid = 0.5 * (a + b)
            if any(abs(mid - p) <= POLE_HALF_WIDTH for p in exceptional):
                continue
            n_grid = max(2, int(math.ceil((b - a) * grid_per_unit)) + 1)
            grid = np.linspace(a, b, n_grid)
            vals = [dirac_transfer_forward(t, m, coupling_scalar) - eta
                    for t in grid]
            for i in range(len(grid) - 1):
                fa, fb = vals[i], vals[i + 1]
                x0, x1 = grid[i], grid[i + 1]
                if fa == 0.0:
                    points.append(SpectralPoint(float(x0), mult, SOURCE_TRANSFER))
                    continue
                if fa * fb >= 0.0:
                    continue
                while x1 - x0 > 1e-12 * (1.0 + abs(x0)):
                    xm = 0.5 * (x0 + x1)
                    fm = dirac_transfer_forward(xm, m, coupling_scalar) - eta
                    if fm == 0.0:
                        x0 = x1 = xm
                        break
                    if fa * fm < 0.0:
                        x1 = xm
                    else:
                        x0, fa = xm, fm
                mu = 0.5 * (x0 + x1)
                resid = abs(dirac_transfer_forward(mu, m, coupling_scalar) - eta)
                points.append(SpectralPoint(mu, mult, SOURCE_TRANSFER, resid))
            if vals[-1] == 0.0 and b == hi:
                points.append(SpectralPoint(float(grid[-1]), mult, SOURCE_TRANSFER))
    for p in exceptional:
        if lo < p < hi:
            points.append(SpectralPoint(p, 1, SOURCE_EXCEPTIONAL))
    return _sorted_points(points)


# ---------------------------------------------------------------------------
# symmetric-component Dirac pair condition (unit lengths, finite graph)


@dataclass(frozen=True)
class PairRoot:
    point: SpectralPoint
    pairs: tuple[tuple[float, float], ...]


def dirac_sym_pair_function(lam: float, m: float, eta1: float, eta2: float) -> float:
    """(eta1 - 1 + c)(eta2 - 1 + c) - m^2 s^2 evaluated at lam - m^2."""
    c, s = eval_cs(lam - m * m)
    c, s = c.real, s.real
    return float((eta1 - 1.0 + c) * (eta2 - 1.0 + c) - (m * s) ** 2)


def dirac_sym_spectrum(g: MetricGraph, vs: VertexSpace, m: float,
                       lo: float, hi: float,
                       grid_per_unit: int = 512,
                       cluster_tol: float = CLUSTER_TOL) -> list[PairRoot]:
    """Squared symmetric-component Dirac spectrum via the pair condition.

    For every unordered pair of discrete eigenvalues the scalar pair
    function is scanned for sign changes on (lo, hi) minus windows
    around the shifted Dirichlet set {(pi k)^2 + m^2}; roots are
    deduplicated across pairs (1e-9) and each reported root lists the
    pairs that produced it.  At m = 0 the condition factorizes, so the
    roots are exactly the scalar transfer roots of each eta.
    """
    if not g.is_equilateral():
        raise ValidationError("pair condition requires unit edge lengths")
    if not hi > lo:
        raise ValidationError("range must satisfy lo < hi")
    delta = assemble_delta0(g, vs)
    etas = [v for v, _ in cluster_values(eigenvalues(delta), cluster_tol)]
    pairs = [(etas[i], etas[j]) for i in range(len(etas))
             for j in range(i, len(etas))]
    shifted_poles = [p + m * m for p in dirichlet_points_unit(lo - m * m - 1.0,
                                                              hi - m * m + 1.0)]
    shifted_poles = [p for p in shifted_poles if lo - 1.0 <= p <= hi + 1.0]
    roots: list[tuple[float, tuple[float, float], float]] = []

    if m == 0.0:
        for eta in etas:
            for r in transfer_inverse(eta, 0.0, hi):
                if r.exceptional or not lo <= r.value <= hi:
                    continue
                for e1, e2 in pairs:
                    if eta in (e1, e2):
                        roots.append((r.value, (e1, e2), r.residual))
    else:
        cuts = [lo]
        for p in shifted_poles:
            cuts.extend([p - POLE_HALF_WIDTH, p + POLE_HALF_WIDTH])
        cuts.append(hi)
        cuts = sorted(t for t in set(cuts) if lo <= t <= hi)
        for e1, e2 in pairs:
            for a, b in zip(cuts[:-1], cuts[1:]):
                mid = 0.5 * (a + b)
                if any(abs(mid - p) <= POLE_HALF_WIDTH for p in shifted_poles):
                    continue
                n_grid = max(2, int(math.ceil((b - a) * grid_per_unit)) + 1)
                grid = np.linspace(a, b, n_grid)
                vals = [dirac_sym_pair_function(t, m, e1, e2) for t in grid]
                for i in range(len(grid) - 1):
                    fa, fb = vals[i], vals[i + 1]
                    x0, x1 = grid[i], grid[i + 1]
                    if fa == 0.0:
                        roots.append((float(x0), (e1, e2), 0.0))
                        continue
                    if fa * fb >= 0.0:
                        continue
                    while x1 - x0 > 1e-12 * (1.0 + abs(x0)):
                        xm = 0.5 * (x0 + x1)
                        fm = dirac_sym_pair_function(xm, m, e1, e2)
                        if fm == 0.0:
                            x0 = x1 = xm
                            break
                        if fa * fm < 0.0:
                            x1 = xm
                        else:
                            x0, fa = xm, fm
                    lam = 0.5 * (x0 + x1)
                    roots.append((lam, (e1, e2),
                                  abs(dirac_sym_pair_function(lam, m, e1, e2))))

    roots.sort(key=lambda r: r[0])
    merged: list[PairRoot] = []
    for lam, pair, resid in roots:
        if merged and abs(lam - merged[-1].point.value) <= 1e-9:
            prev = merged[-1]
            new_pairs = prev.pairs if pair in prev.pairs else prev.pairs + (pair,)
            merged[-1] = PairRoot(
                SpectralPoint(prev.point.value, 1, SOURCE_SCAN,
                              min(prev.point.residual, resid)),
                new_pairs)
        else:
            merged.append(PairRoot(SpectralPoint(lam, 1, SOURCE_SCAN, resid),
                                   (pair,)))
    return merged


def dirichlet_points_unit(lo: float, hi: float) -> list[float]:
    """Unit-length Dirichlet set {(pi k)^2 : k >= 1} inside [lo, hi]."""
    pts = []
    k = 1
    while (math.pi * k) ** 2 <= hi:
        lam = (math.pi * k) ** 2
        if lam >= lo:
            pts.append(lam)
        k += 1
    return pts


# ---------------------------------------------------------------------------
# eigenfunction reconstruction


def eigenfunction(g: MetricGraph, vs: VertexSpace, coupling, lam: float,
                  n: int = 400,
                  kernel_rtol: float = 1e-8) -> list[EigenfunctionSample]:
    """Basis of the metric eigenspace at an accepted eigenvalue.

    The kernel of Q(lam) - L is extracted (eigenvectors whose eigenvalue
    is at most ``kernel_rtol`` times the matrix norm) and each kernel
    vector is extended to the edges by the solution map.  The returned
    samples satisfy the vertex conditions: values lie in the space by
    construction, and compressed derivative traces match L applied to
    the boundary values.
    """
    coupling = hermitize(np.asarray(coupling, dtype=complex)
                         .reshape(vs.dim, vs.dim))
    q = q_general(g, vs, lam).matrix - coupling
    if q.shape[0] == 0:
        raise NotAnEigenvalueError("empty vertex space has no eigenvalues")
    dec = hermitian_eig(q)
    scale = max(max_abs(dec.eigenvalues), 1e-300)
    idx = [i for i, v in enumerate(dec.eigenvalues) if abs(v) <= kernel_rtol * scale]
    if not idx:
        raise NotAnEigenvalueError(
            f"lam = {lam} is not an eigenvalue at tolerance: smallest "
            f"|eigenvalue| of Q - L is {np.abs(dec.eigenvalues).min():.3e}")
    out = []
    for i in idx:
        coords = dec.eigenvectors[:, i]
        sample = beta_apply(g, vs, lam, coords, n)
        defect = np.linalg.norm(vs.coordinates(sample.derivative_trace)
                                - coupling @ coords)
        if defect > 1e-6:
            raise NotAnEigenvalueError(
                f"vertex-condition defect {defect:.3e} exceeds 1e-6 at lam = {lam}")
        out.append(sample)
    return out
