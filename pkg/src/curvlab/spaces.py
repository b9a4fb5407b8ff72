"""Ordered bases for two-forms and symmetric two-tensors, plus the eigensolver.

Every symmetric two-tensor is stored as a dense symmetric ``n x n`` matrix.
The unit element for ``e_i . e_j`` (``i < j``) has ``1/sqrt(2)`` at ``(i, j)``
and ``(j, i)``, the element for ``e_i . e_i`` has ``1`` at ``(i, i)``, and the
inner product is the plain Frobenius sum.  Indices are zero-based throughout
the Python API.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit

__all__ = [
    "Spectrum",
    "EigenConvergenceError",
    "dim_lambda2",
    "dim_sym",
    "dim_traceless",
    "pair_index",
    "pairs",
    "sym_basis",
    "traceless_basis",
    "eigen_sym",
]


def _check_dim(n: int) -> None:
    if int(n) != n or n < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {n!r}")


def dim_lambda2(n: int) -> int:
    return n * (n - 1) // 2


def dim_sym(n: int) -> int:
    return n * (n + 1) // 2


def dim_traceless(n: int) -> int:
    return (n - 1) * (n + 2) // 2


@lru_cache(maxsize=None)
def pairs(n: int) -> tuple[tuple[int, int], ...]:
    """All ``(i, j)`` with ``i < j`` in lexicographic order."""
    return tuple((i, j) for i in range(n) for j in range(i + 1, n))


@lru_cache(maxsize=None)
def _pair_table(n: int) -> np.ndarray:
    table = -np.ones((n, n), dtype=np.int64)
    for flat, (i, j) in enumerate(pairs(n)):
        table[i, j] = flat
    return table


def pair_index(i: int, j: int, n: int) -> int:
    """Lexicographic rank of the pair ``(i, j)``, ``i < j``, among all pairs."""
    if not 0 <= i < j < n:
        raise ValueError(f"need 0 <= i < j < n, got ({i}, {j}) with n={n}")
    return int(_pair_table(n)[i, j])


@lru_cache(maxsize=None)
def _sym_basis(n: int) -> np.ndarray:
    out = np.zeros((dim_sym(n), n, n))
    r = 1.0 / np.sqrt(2.0)
    for a, (i, j) in enumerate(pairs(n)):
        out[a, i, j] = out[a, j, i] = r
    off = dim_lambda2(n)
    for i in range(n):
        out[off + i, i, i] = 1.0
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def _traceless_basis(n: int) -> np.ndarray:
    off = dim_lambda2(n)
    out = np.zeros((dim_traceless(n), n, n))
    out[:off] = _sym_basis(n)[:off]
    for k in range(1, n):
        d = out[off + k - 1]
        d[np.arange(k), np.arange(k)] = 1.0
        d[k, k] = -float(k)
        d /= np.sqrt(k * (k + 1.0))
    out.flags.writeable = False
    return out


def sym_basis(n: int) -> np.ndarray:
    """Orthonormal basis of S^2(V) as a read-only ``(n(n+1)/2, n, n)`` stack.

    Off-diagonal elements come first in lexicographic pair order, followed by
    the diagonal units ``E_00, ..., E_{n-1,n-1}``.
    """
    _check_dim(n)
    return _sym_basis(n)


def traceless_basis(n: int) -> np.ndarray:
    """Orthonormal basis of the traceless symmetric two-tensors.

    The off-diagonal elements of :func:`sym_basis` come first, then the
    diagonal elements ``d_k = (E_00 + ... + E_{k-1,k-1} - k E_kk) / sqrt(k(k+1))``
    for ``k = 1, ..., n-1``.
    """
    _check_dim(n)
    return _traceless_basis(n)


class EigenConvergenceError(RuntimeError):
    """Jacobi iteration exhausted its sweep budget."""

    def __init__(self, residual: float, sweeps: int):
        self.residual = residual
        self.sweeps = sweeps
        super().__init__(
            f"Jacobi eigensolver did not converge after {sweeps} sweeps; "
            f"off-diagonal residual {residual:.3e}"
        )


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with orthonormal eigenvectors as columns.

    ``basis_tag`` names the ordered basis the eigenvectors are expressed in
    (``"lambda2"``, ``"sym"``, ``"traceless"`` or ``"raw"``).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    basis_tag: str = "raw"
    tol: float = 1e-12

    def smallest_sum(self, k: int) -> float:
        if not 1 <= k <= len(self.eigenvalues):
            raise ValueError(f"k must lie in [1, {len(self.eigenvalues)}], got {k}")
        return float(np.sum(self.eigenvalues[:k]))

    def clusters(self, tol: float = 1e-6) -> list[tuple[float, int]]:
        """Group nearly equal eigenvalues into ``(mean value, multiplicity)``."""
        out: list[list[float]] = []
        for lam in self.eigenvalues:
            if out and lam - out[-1][-1] <= tol:
                out[-1].append(float(lam))
            else:
                out.append([float(lam)])
        return [(float(np.mean(c)), len(c)) for c in out]


@njit(cache=True)
def _jacobi(a, tol, max_sweeps):
    n = a.shape[0]
    v = np.eye(n)
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += a[i, j] * a[i, j]
    scale = np.sqrt(scale)
    off = 0.0
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        off = np.sqrt(off)
        if off <= tol * scale:
            return v, off, sweep, True
        if sweep == max_sweeps:
            break
        thresh = 0.2 * off / (n * n) if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0 or abs(apq) <= thresh:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    if k != p and k != q:
                        akp = a[k, p]
                        akq = a[k, q]
                        a[k, p] = c * akp - s * akq
                        a[p, k] = a[k, p]
                        a[k, q] = s * akp + c * akq
                        a[q, k] = a[k, q]
                a[p, p] -= t * apq
                a[q, q] += t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    return v, off, max_sweeps, False


def eigen_sym(
    matrix: np.ndarray,
    tol: float = 1e-12,
    basis_tag: str = "raw",
    max_sweeps: int = 100,
) -> Spectrum:
    """Cyclic Jacobi eigendecomposition of a dense symmetric matrix.

    The result is bit-reproducible for identical input. Eigenvalues are sorted
    ascending and each eigenvector is signed so that its largest-magnitude
    component is positive.

    Raises
    ------
    ValueError
        If the input is not square, symmetric or finite, or ``tol <= 0``.
    EigenConvergenceError
        If the off-diagonal mass does not fall below ``tol * ||M||_F`` within
        ``max_sweeps`` sweeps.
    """
    m = np.array(matrix, dtype=np.float64, copy=True)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if tol <= 0:
        raise ValueError("tol must be positive")
    asym = np.max(np.abs(m - m.T)) if m.size else 0.0
    if asym > 0 and asym > 1e-12 * (1.0 + np.max(np.abs(m))):
        raise ValueError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    m = 0.5 * (m + m.T)
    n = m.shape[0]
    if n == 0:
        return Spectrum(np.zeros(0), np.zeros((0, 0)), basis_tag, tol)

    vecs, off, sweeps, ok = _jacobi(m, tol, max_sweeps)
    if not ok:
        raise EigenConvergenceError(float(off), int(sweeps))
    vals = np.diag(m).copy()
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    lead = np.argmax(np.abs(vecs), axis=0)
    signs = np.where(vecs[lead, np.arange(n)] < 0, -1.0, 1.0)
    vecs = vecs * signs
    vals.flags.writeable = False
    vecs.flags.writeable = False
    return Spectrum(vals, vecs, basis_tag, tol)
