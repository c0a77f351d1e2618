"""Dense complex Hermitian linear algebra used by every other module.

Thin, contract-enforcing layer over LAPACK (through numpy/scipy):
Hermitian eigendecomposition with validated reconstruction and
orthonormality, shifted linear solves by LU with partial pivoting and
pivot-magnitude detection of singularity, and inertia counting with a
relative zero band.  All tolerances are relative to the matrix magnitude
with an absolute floor of 1e-14.  Zero-dimensional matrices are legal
everywhere (empty vertex spaces produce 0 x 0 operators).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalError, ValidationError

HERMITICITY_RTOL = 1e-12
EIG_RTOL = 1e-10
PIVOT_RTOL = 1e-13
INERTIA_RTOL = 1e-10


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValidationError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.abs(a).max()) if a.size else 0.0


def hermitize(a, rtol: float = HERMITICITY_RTOL) -> np.ndarray:
    """Validate near-Hermiticity and return the symmetrized matrix."""
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ValidationError(f"matrix is {m.shape}, not square")
    if not np.all(np.isfinite(m.view(float))):
        raise ValidationError("matrix has non-finite entries")
    defect = max_abs(m - m.conj().T)
    if defect > rtol * (1.0 + max_abs(m)):
        raise ValidationError(
            f"matrix is not Hermitian: max |A - A*| = {defect:.3e}")
    return (m + m.conj().T) / 2.0


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues and a unitary matrix of column eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitian_eig(a, validated: bool = True) -> EigenDecomposition:
    """Full eigendecomposition of a Hermitian matrix.

    Eigenvalues are returned ascending.  The reconstruction residual
    ``max|A V - V diag|`` and the orthonormality defect ``max|V*V - I|``
    are checked against 1e-10 relative bounds; failure raises
    :class:`NumericalError`.  Real symmetric input takes the real LAPACK
    path for speed and determinism; the result is cast back to complex.
    """
    m = hermitize(a)
    n = m.shape[0]
    if n == 0:
        return EigenDecomposition(np.zeros(0), np.zeros((0, 0), dtype=complex))
    try:
        if max_abs(m.imag) == 0.0:
            w, v = np.linalg.eigh(m.real)
            v = v.astype(complex)
        else:
            w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from None
    if validated:
        scale = 1.0 + max_abs(m)
        recon = max_abs(m @ v - v * w)
        ortho = max_abs(v.conj().T @ v - np.eye(n))
        if recon > EIG_RTOL * scale or ortho > EIG_RTOL:
            raise NumericalError(
                f"eigendecomposition lost accuracy: residual {recon:.3e}, "
                f"orthonormality defect {ortho:.3e}")
    return EigenDecomposition(np.asarray(w, dtype=float), v)


def eigenvalues(a) -> np.ndarray:
    """Ascending eigenvalues only (no vector validation overhead)."""
    m = hermitize(a)
    if m.shape[0] == 0:
        return np.zeros(0)
    if max_abs(m.imag) == 0.0:
        return np.linalg.eigvalsh(m.real)
    return np.linalg.eigvalsh(m)


def lu_solve(a, b) -> np.ndarray:
    """Solve a general square system by LU with partial pivoting.

    Singularity is detected on the pivot magnitudes: the smallest pivot
    must exceed 1e-13 times the largest matrix entry.
    """
    m = as_matrix(a)
    n = m.shape[0]
    b = np.asarray(b, dtype=complex)
    if n == 0:
        return np.zeros_like(b)
    with warnings.catch_warnings():
        # singularity is reported through the pivot check below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(m, check_finite=True)
    pivots = np.abs(np.diag(lu))
    floor = PIVOT_RTOL * max(max_abs(m), 1e-14)
    if pivots.min() <= floor:
        raise NumericalError(
            f"singular to tolerance: pivot {pivots.min():.3e} <= {floor:.3e}")
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)


def solve_hermitian(a, shift: complex, rhs) -> np.ndarray:
    """Solve (A - shift I) x = rhs for Hermitian A.

    The residual ``|(A - shift I) x - rhs|`` is checked against
    1e-10 (1 + |rhs|); violation raises :class:`NumericalError`.
    """
    m = hermitize(a)
    rhs = np.asarray(rhs, dtype=complex)
    shifted = m - complex(shift) * np.eye(m.shape[0])
    x = lu_solve(shifted, rhs)
    resid = max_abs(shifted @ x - rhs)
    if resid > 1e-10 * (1.0 + max_abs(rhs)):
        raise NumericalError(f"solve residual too large: {resid:.3e}")
    return x


def inertia(a, rtol: float = INERTIA_RTOL) -> tuple[int, int, int]:
    """Counts (n_neg, n_zero, n_pos) with zero band rtol * (1 + max|A|)."""
    m = hermitize(a)
    w = eigenvalues(m)
    tol = rtol * (1.0 + max_abs(m))
    n_neg = int(np.sum(w < -tol))
    n_zero = int(np.sum(np.abs(w) <= tol))
    n_pos = int(np.sum(w > tol))
    return (n_neg, n_zero, n_pos)


def negative_count(a) -> int:
    """Number of strictly negative eigenvalues (spectral-flow counter)."""
    w = eigenvalues(a)
    return int(np.sum(w < 0.0))


def operator_norm(a) -> float:
    """Largest singular value of a (possibly rectangular) matrix."""
    m = np.asarray(a, dtype=complex)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))
