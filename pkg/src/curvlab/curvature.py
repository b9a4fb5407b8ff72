"""Algebraic curvature tensors and the operators they induce.

A :class:`CurvatureTensor` stores only the symmetric matrix of components over
the lexicographic basis of two-forms, ``M[(i,j),(k,l)] = R_ijkl`` for
``i < j`` and ``k < l``.  Antisymmetry in each pair and pair exchange are
therefore built in; the first Bianchi identity is the only symmetry that has
to be checked at runtime.  The sign convention makes the unit sphere satisfy
``R_ijkl = g_ik g_jl - g_il g_jk``, so ``K(e_i, e_j) = R_ijij``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Any

import numpy as np

from .spaces import (
    Spectrum,
    dim_lambda2,
    eigen_sym,
    pairs,
    sym_basis,
    traceless_basis,
)

__all__ = [
    "CurvatureTensor",
    "SymmetryReport",
    "validate",
    "bianchi_project",
    "first_kind_matrix",
    "second_kind_bilinear",
    "second_kind_matrix",
    "first_kind_spectrum",
    "second_kind_spectrum",
    "ricci",
    "scalar",
    "sectional",
    "kulkarni_nomizu",
    "to_components",
    "from_components",
]

DEFAULT_TOL = 1e-10


@lru_cache(maxsize=None)
def _sign_maps(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Flat pair index and sign for every ordered ``(i, j)``; sign 0 on the diagonal."""
    idx = np.zeros((n, n), dtype=np.int64)
    sgn = np.zeros((n, n))
    for flat, (i, j) in enumerate(pairs(n)):
        idx[i, j] = idx[j, i] = flat
        sgn[i, j] = 1.0
        sgn[j, i] = -1.0
    return idx, sgn


def to_components(n: int, lambda2: np.ndarray) -> np.ndarray:
    """Expand a pair-basis matrix to the full ``(n, n, n, n)`` component array."""
    if n < 2:
        return np.zeros((n, n, n, n))
    idx, sgn = _sign_maps(n)
    vals = lambda2[idx[:, :, None, None], idx[None, None, :, :]]
    return vals * sgn[:, :, None, None] * sgn[None, None, :, :]


def _lambda2_block(comps: np.ndarray) -> np.ndarray:
    n = comps.shape[0]
    if n < 2:
        return np.zeros((0, 0))
    iu, ju = np.triu_indices(n, 1)
    return comps[iu[:, None], ju[:, None], iu[None, :], ju[None, :]]


@dataclass(frozen=True, eq=False)
class CurvatureTensor:
    """A four-index algebraic curvature tensor on ``R^n``.

    Parameters
    ----------
    n : int
        Ambient dimension.  ``n = 1`` is allowed (the only tensor is zero) so
        that one-dimensional flat factors can enter products.
    lambda2 : ndarray of shape (n(n-1)/2, n(n-1)/2)
        Symmetric matrix of components over the lexicographic pair basis.
    origin : dict, optional
        Model description (``{"kind": ..., "params": ...}``) that rebuilds the
        tensor; carried for reports and never used in arithmetic.
    """

    n: int
    lambda2: np.ndarray
    origin: dict[str, Any] | None = field(default=None, repr=False)

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")
        m = np.array(self.lambda2, dtype=np.float64)
        if n == 1 and m.size == 0:
            m = np.zeros((0, 0))
        big = dim_lambda2(n)
        if m.shape != (big, big):
            raise ValueError(f"lambda2 matrix must be {big}x{big} for n={n}, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("curvature components must be finite")
        if m.size:
            asym = np.max(np.abs(m - m.T))
            if asym > 1e-12 * (1.0 + np.max(np.abs(m))):
                raise ValueError(f"lambda2 matrix is not symmetric (max asymmetry {asym:.3e})")
        m = 0.5 * (m + m.T)
        m.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "lambda2", m)

    @cached_property
    def components(self) -> np.ndarray:
        """Read-only full component array ``R[i, j, k, l]``."""
        out = to_components(self.n, self.lambda2)
        out.flags.writeable = False
        return out

    def component(self, i: int, j: int, k: int, l: int) -> float:
        return float(self.components[i, j, k, l])

    def __call__(self, x, y, z, w) -> float:
        """Multilinear evaluation ``R(X, Y, Z, W)``."""
        return float(np.einsum("ijkl,i,j,k,l->", self.components, x, y, z, w))

    @property
    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.lambda2))) if self.lambda2.size else 0.0

    def rotated(self, q: np.ndarray) -> "CurvatureTensor":
        """Push the tensor forward by an orthogonal ``q`` in all four slots."""
        q = np.asarray(q, dtype=np.float64)
        comps = np.einsum("ijkl,ai,bj,ck,dl->abcd", self.components, q, q, q, q, optimize=True)
        return CurvatureTensor(self.n, _lambda2_block(comps))

    def __add__(self, other: "CurvatureTensor") -> "CurvatureTensor":
        if not isinstance(other, CurvatureTensor):
            return NotImplemented
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")
        return CurvatureTensor(self.n, self.lambda2 + other.lambda2)

    def __sub__(self, other: "CurvatureTensor") -> "CurvatureTensor":
        return self + (-1.0) * other

    def __mul__(self, c: float) -> "CurvatureTensor":
        return CurvatureTensor(self.n, float(c) * self.lambda2)

    __rmul__ = __mul__

    def __neg__(self) -> "CurvatureTensor":
        return (-1.0) * self

    def with_origin(self, origin: dict[str, Any] | None) -> "CurvatureTensor":
        return CurvatureTensor(self.n, self.lambda2, origin)

    def equals(self, other: "CurvatureTensor", atol: float = 0.0) -> bool:
        return (
            self.n == other.n
            and self.lambda2.shape == other.lambda2.shape
            and bool(np.all(np.abs(self.lambda2 - other.lambda2) <= atol))
        )


def from_components(comps: np.ndarray, origin: dict | None = None) -> CurvatureTensor:
    """Build a tensor from a full component array, keeping its pair block.

    No symmetry is imposed beyond reading ``R_ijkl`` for ``i < j``, ``k < l``;
    the pair block is symmetrized.
    """
    comps = np.asarray(comps, dtype=np.float64)
    n = comps.shape[0]
    if comps.shape != (n, n, n, n):
        raise ValueError(f"expected a (n, n, n, n) array, got {comps.shape}")
    block = _lambda2_block(comps)
    return CurvatureTensor(n, 0.5 * (block + block.T), origin)


@dataclass(frozen=True)
class SymmetryReport:
    bianchi: float
    pair_symmetry: float
    scale: float
    tol: float

    @property
    def passed(self) -> bool:
        bound = self.tol * (1.0 + self.scale)
        return self.bianchi <= bound and self.pair_symmetry <= bound


def _bianchi_sum(comps: np.ndarray) -> np.ndarray:
    return comps + np.einsum("iklj->ijkl", comps) + np.einsum("iljk->ijkl", comps)


def validate(R: CurvatureTensor | np.ndarray, tol: float = DEFAULT_TOL) -> SymmetryReport:
    """Measure Bianchi and pair-exchange violations.

    Accepts a tensor or a raw pair-basis matrix (which may be asymmetric).
    """
    if isinstance(R, CurvatureTensor):
        m, n = R.lambda2, R.n
    else:
        m = np.asarray(R, dtype=np.float64)
        n = _n_from_lambda2(m.shape[0])
    pair = float(np.max(np.abs(m - m.T))) if m.size else 0.0
    comps = to_components(n, m)
    bianchi = float(np.max(np.abs(_bianchi_sum(comps)))) if comps.size else 0.0
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    return SymmetryReport(bianchi, pair, scale, tol)


def _n_from_lambda2(size: int) -> int:
    n = int(round((1 + np.sqrt(1 + 8 * size)) / 2))
    if dim_lambda2(n) != size:
        raise ValueError(f"{size} is not n(n-1)/2 for any n")
    return n


def bianchi_project(T: np.ndarray | CurvatureTensor) -> CurvatureTensor:
    """Orthogonal projection of a pair-symmetric tensor onto the Bianchi subspace.

    ``P(T)_ijkl = (2 T_ijkl - T_iklj - T_iljk) / 3`` removes the totally
    antisymmetric part and fixes tensors that already satisfy Bianchi.
    """
    if isinstance(T, CurvatureTensor):
        m, n = T.lambda2, T.n
    else:
        m = np.asarray(T, dtype=np.float64)
        n = _n_from_lambda2(m.shape[0])
        m = 0.5 * (m + m.T)
    comps = to_components(n, m)
    proj = (2.0 * comps - np.einsum("iklj->ijkl", comps) - np.einsum("iljk->ijkl", comps)) / 3.0
    return CurvatureTensor(n, _lambda2_block(proj))


def first_kind_matrix(R: CurvatureTensor) -> np.ndarray:
    """Matrix of the curvature operator on two-forms (lexicographic pair basis)."""
    return np.array(R.lambda2)


def second_kind_bilinear(R: CurvatureTensor, phi: np.ndarray, psi: np.ndarray) -> float:
    """``sum_ijkl R_ijkl phi_il psi_jk`` for symmetric ``n x n`` matrices."""
    return float(np.einsum("ijkl,il,jk->", R.components, phi, psi))


def _gram(R: CurvatureTensor, basis: np.ndarray) -> np.ndarray:
    half = np.einsum("ijkl,ail->ajk", R.components, basis, optimize=True)
    g = np.einsum("ajk,bjk->ab", half, basis, optimize=True)
    return 0.5 * (g + g.T)


def second_kind_matrix(R: CurvatureTensor, restricted: bool = True) -> np.ndarray:
    """Gram matrix of the second-kind bilinear form.

    With ``restricted=True`` the basis is :func:`traceless_basis`; otherwise
    :func:`sym_basis`.  The restricted matrix is built from the bilinear form
    directly, since the full operator need not preserve the traceless
    subspace.
    """
    basis = traceless_basis(R.n) if restricted else sym_basis(R.n)
    return _gram(R, basis)


def first_kind_spectrum(R: CurvatureTensor, tol: float = 1e-12) -> Spectrum:
    return eigen_sym(first_kind_matrix(R), tol=tol, basis_tag="lambda2")


def second_kind_spectrum(R: CurvatureTensor, restricted: bool = True, tol: float = 1e-12) -> Spectrum:
    tag = "traceless" if restricted else "sym"
    return eigen_sym(second_kind_matrix(R, restricted), tol=tol, basis_tag=tag)


def ricci(R: CurvatureTensor) -> np.ndarray:
    """``Ric_jk = sum_i R_jiki``."""
    ric = np.einsum("jiki->jk", R.components)
    return 0.5 * (ric + ric.T)


def scalar(R: CurvatureTensor) -> float:
    return float(np.trace(ricci(R)))


def sectional(R: CurvatureTensor, i: int, j: int) -> float:
    """Sectional curvature of the coordinate plane ``span(e_i, e_j)``."""
    if i == j:
        raise ValueError("sectional curvature needs two distinct indices")
    if not (0 <= i < R.n and 0 <= j < R.n):
        raise ValueError(f"indices ({i}, {j}) out of range for n={R.n}")
    return R.component(i, j, i, j)


def kulkarni_nomizu(h: np.ndarray, k: np.ndarray) -> CurvatureTensor:
    """Kulkarni-Nomizu product ``h_ik k_jl + h_jl k_ik - h_il k_jk - h_jk k_il``.

    Normalized so that ``kulkarni_nomizu(g, g) / 2`` is the unit sphere.
    """
    h = np.asarray(h, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    if h.shape != k.shape or h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("h and k must be square matrices of the same size")
    comps = (
        np.einsum("ik,jl->ijkl", h, k)
        + np.einsum("jl,ik->ijkl", h, k)
        - np.einsum("il,jk->ijkl", h, k)
        - np.einsum("jk,il->ijkl", h, k)
    )
    return from_components(comps)
