import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from curvlab.spaces import (
    EigenConvergenceError,
    dim_lambda2,
    dim_sym,
    dim_traceless,
    eigen_sym,
    pair_index,
    pairs,
    sym_basis,
    traceless_basis,
)


@pytest.mark.parametrize("n", range(2, 8))
def test_dimensions(n):
    assert dim_lambda2(n) == len(pairs(n)) == n * (n - 1) // 2
    assert dim_sym(n) == sym_basis(n).shape[0] == n * (n + 1) // 2
    assert dim_traceless(n) == traceless_basis(n).shape[0] == dim_sym(n) - 1


def test_bases_need_two_dimensions():
    with pytest.raises(ValueError):
        traceless_basis(1)
    assert pairs(1) == ()


@pytest.mark.parametrize("n", range(2, 7))
def test_pair_order_is_lexicographic(n):
    p = pairs(n)
    assert list(p) == sorted(p)
    for a, (i, j) in enumerate(p):
        assert pair_index(i, j, n) == a
    with pytest.raises(ValueError):
        pair_index(1, 0, n)


@pytest.mark.parametrize("n", range(2, 7))
def test_bases_orthonormal(n):
    for basis in (sym_basis(n), traceless_basis(n)):
        gram = np.einsum("aij,bij->ab", basis, basis)
        assert np.allclose(gram, np.eye(len(basis)), atol=1e-14)
        assert np.allclose(basis, basis.transpose(0, 2, 1))
    assert np.allclose(np.trace(traceless_basis(n), axis1=1, axis2=2), 0.0, atol=1e-14)


def test_traceless_basis_frozen_order():
    # Off-diagonal elements first, then the diagonal ladder.
    b = traceless_basis(3)
    r2 = np.sqrt(0.5)
    assert np.allclose(b[0], [[0, r2, 0], [r2, 0, 0], [0, 0, 0]])
    assert np.allclose(b[3], np.diag([1, -1, 0]) / np.sqrt(2))
    assert np.allclose(b[4], np.diag([1, 1, -2]) / np.sqrt(6))


def test_bases_read_only():
    with pytest.raises(ValueError):
        sym_basis(3)[0, 0, 0] = 1.0


_sym = st.integers(1, 9).flatmap(
    lambda n: arrays(np.float64, (n, n), elements=st.floats(-1e3, 1e3, allow_nan=False))
).map(lambda a: a + a.T)


@settings(max_examples=150, deadline=None)
@given(_sym)
def test_jacobi_matches_eigh(m):
    spec = eigen_sym(m)
    ref = np.linalg.eigvalsh(m)
    scale = 1.0 + np.abs(m).max()
    assert np.allclose(spec.eigenvalues, ref, atol=1e-10 * scale)
    v = spec.eigenvectors
    assert np.allclose(v.T @ v, np.eye(len(m)), atol=1e-12)
    assert np.allclose(m @ v, v * spec.eigenvalues, atol=1e-9 * scale)
    assert np.all(np.diff(spec.eigenvalues) >= 0)


def test_eigenvector_sign_convention():
    m = np.array([[2.0, 1.0], [1.0, 2.0]])
    v = eigen_sym(m).eigenvectors
    lead = np.argmax(np.abs(v), axis=0)
    assert np.all(v[lead, [0, 1]] > 0)


def test_eigen_is_deterministic():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((12, 12))
    a = a + a.T
    s1, s2 = eigen_sym(a), eigen_sym(a)
    assert s1.eigenvalues.tobytes() == s2.eigenvalues.tobytes()
    assert s1.eigenvectors.tobytes() == s2.eigenvectors.tobytes()


def test_eigen_rejects_bad_input():
    with pytest.raises(ValueError):
        eigen_sym(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        eigen_sym(np.array([[np.nan]]))
    with pytest.raises(ValueError):
        eigen_sym(np.eye(2), tol=0.0)
    with pytest.raises(ValueError):
        eigen_sym(np.ones(3))


def test_eigen_convergence_error():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((10, 10))
    with pytest.raises(EigenConvergenceError) as info:
        eigen_sym(a + a.T, max_sweeps=1)
    assert info.value.sweeps == 1
    assert info.value.residual > 0


def test_empty_and_scalar():
    assert eigen_sym(np.zeros((0, 0))).eigenvalues.size == 0
    assert eigen_sym([[3.0]]).eigenvalues[0] == 3.0


def test_spectrum_helpers():
    spec = eigen_sym(np.diag([4.0, -2.0, 4.0 + 1e-9, -2.0]))
    assert spec.smallest_sum(2) == -4.0
    assert spec.clusters() == [(-2.0, 2), (pytest.approx(4.0), 2)]
    with pytest.raises(ValueError):
        spec.smallest_sum(5)
