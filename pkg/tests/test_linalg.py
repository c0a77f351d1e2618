import numpy as np
import pytest

from qgspec import (NumericalError, ValidationError, hermitian_eig, hermitize,
                    inertia, solve_hermitian)
from qgspec.linalg import eigenvalues, lu_solve, max_abs, operator_norm
from qgspec.random_data import random_hermitian, random_unitary


def charpoly_coefficients(a):
    """Faddeev-LeVerrier coefficients of det(xI - A), independent oracle."""
    n = a.shape[0]
    coeffs = [1.0 + 0.0j]
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ (m + coeffs[-1] * np.eye(n))
        coeffs.append(-np.trace(m) / k)
    return np.array(coeffs)


def test_identity_eigenvalues():
    dec = hermitian_eig(np.eye(3))
    assert np.allclose(dec.eigenvalues, [1.0, 1.0, 1.0])


def test_pauli_x_eigenvalues():
    dec = hermitian_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(dec.eigenvalues, [-1.0, 1.0])


def test_eigenvalues_match_charpoly_roots():
    rng = np.random.default_rng(5)
    a = random_hermitian(rng, 5)
    dec = hermitian_eig(a)
    roots = np.sort(np.roots(charpoly_coefficients(a)).real)
    assert np.abs(np.sort(dec.eigenvalues) - roots).max() <= 1e-8


def test_eig_invariants_random():
    rng = np.random.default_rng(11)
    for n in (1, 2, 7, 20, 50):
        a = random_hermitian(rng, n, scale=3.0)
        dec = hermitian_eig(a)
        scale = 1.0 + max_abs(a)
        assert max_abs(a @ dec.eigenvectors
                       - dec.eigenvectors * dec.eigenvalues) <= 1e-10 * scale
        assert max_abs(dec.eigenvectors.conj().T @ dec.eigenvectors
                       - np.eye(n)) <= 1e-10
        assert np.all(np.diff(dec.eigenvalues) >= -1e-14)


def test_empty_matrix_is_legal():
    dec = hermitian_eig(np.zeros((0, 0)))
    assert dec.eigenvalues.size == 0
    assert inertia(np.zeros((0, 0))) == (0, 0, 0)


def test_non_hermitian_rejected():
    with pytest.raises(ValidationError, match="not Hermitian"):
        hermitize(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_solve_identity():
    b = np.array([1.0, 2.0, 3.0], dtype=complex)
    assert np.allclose(solve_hermitian(np.eye(3), 0.0, b), b)


def test_solve_diagonal():
    x = solve_hermitian(np.diag([1.0, 2.0]), 0.0, np.array([1.0, 1.0]))
    assert np.allclose(x, [1.0, 0.5])


def test_solve_shifted_2x2():
    a = np.array([[1.0, -1.0], [-1.0, 1.0]])
    x = solve_hermitian(a, -1.0, np.array([1.0, 0.0]))
    assert np.allclose(x, [2.0 / 3.0, 1.0 / 3.0])


def test_solve_residual_large_system():
    rng = np.random.default_rng(3)
    a = random_hermitian(rng, 500)
    b = rng.normal(size=500) + 1j * rng.normal(size=500)
    x = solve_hermitian(a, 0.25 + 0.1j, b)
    shifted = a - (0.25 + 0.1j) * np.eye(500)
    assert max_abs(shifted @ x - b) <= 1e-10 * (1.0 + max_abs(b))


def test_singular_solve_detected():
    a = np.array([[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(NumericalError, match="singular"):
        lu_solve(a, np.array([1.0, 0.0]))


def test_inertia_examples():
    assert inertia(np.diag([-1.0, 0.0, 2.0])) == (1, 1, 1)
    assert inertia(np.array([[1.0, -1.0], [-1.0, 1.0]])) == (0, 1, 1)


def test_inertia_matches_eigenvalues():
    rng = np.random.default_rng(9)
    a = random_hermitian(rng, 12)
    w = eigenvalues(a)
    tol = 1e-10 * (1.0 + max_abs(a))
    n_neg, n_zero, n_pos = inertia(a)
    assert n_neg == int(np.sum(w < -tol))
    assert n_pos == int(np.sum(w > tol))
    assert n_neg + n_zero + n_pos == 12


def test_inertia_invariant_under_unitary_congruence():
    rng = np.random.default_rng(13)
    for _ in range(6):
        a = random_hermitian(rng, 8)
        u = random_unitary(rng, 8)
        assert inertia(u.conj().T @ a @ u) == inertia(a)


def test_operator_norm_empty():
    assert operator_norm(np.zeros((0, 3))) == 0.0
