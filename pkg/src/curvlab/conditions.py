"""Curvature conditions: k-positivity, isotropic-curvature family, Kähler checks.

Frame-quantified conditions are evaluated on orthonormal four-frames
``e_1..e_4`` (stored as the columns of an ``n x 4`` matrix).  Every expression
has the shape

    R_1313 + l^2 R_1414 + m^2 R_2323 + l^2 m^2 R_2424 - c l m R_1234

with the tag fixing which of ``l``, ``m`` are free and the coefficient ``c``.
:func:`certify_min` searches frames for the smallest value; a negative result
is a witness, a nonnegative one is only evidence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ._rng import derive_seed, gaussians
from .curvature import CurvatureTensor, first_kind_spectrum, ricci, scalar, second_kind_spectrum
from .models import ComplexStructure
from .spaces import eigen_sym

__all__ = [
    "TAGS",
    "LAMBDA_BOUND",
    "ConditionExpr",
    "Frame4",
    "FrameError",
    "FrameCertificate",
    "KPositivity",
    "RicciBound",
    "band",
    "k_positivity",
    "condition_value",
    "certify_min",
    "min_sectional",
    "ricci_bound_check",
    "orthogonal_bisectional",
    "kahler_symmetry_residual",
]

TAGS = ("pic", "pic1", "pic2", "lemma43", "lemma44", "beta")

# Stand-in for "lambda in R": beyond this the quadratic is dominated by its leading term.
LAMBDA_BOUND = 1e3

GRID_POINTS = 41
REFINE_TOP = 10
VIOLATION_TOL = 1e-8


def band(R: CurvatureTensor, tol: float = VIOLATION_TOL) -> float:
    """Half-width of the boundary band, ``tol * (1 + ||R||_inf)``."""
    return tol * (1.0 + R.norm_inf)


@dataclass(frozen=True)
class ConditionExpr:
    """A frame-quantified curvature expression.

    ``lam`` and ``mu`` are only consulted by :func:`condition_value`;
    :func:`certify_min` minimizes over whichever of them the tag leaves free
    (``pic1``: lam in [-1, 1]; ``pic2``: lam, mu in [-1, 1]; ``lemma43``: lam
    in R; ``lemma44``: lam in R, mu in [-1, 1]).  Reordering the frame maps
    ``(lam, mu)`` to ``(1/mu, 1/lam)`` up to a positive factor, so the
    ``lemma44`` search loses nothing by taking ``|mu| <= 1``.  "All of R" is
    realized as ``|lam| <= LAMBDA_BOUND``.
    """

    tag: str
    lam: float = 1.0
    mu: float = 1.0
    beta: float | None = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown condition {self.tag!r}; expected one of {TAGS}")
        if self.tag in ("pic1", "pic2") and abs(self.lam) > 1.0:
            raise ValueError(f"{self.tag} needs lam in [-1, 1], got {self.lam}")
        if self.tag == "pic2" and abs(self.mu) > 1.0:
            raise ValueError(f"pic2 needs mu in [-1, 1], got {self.mu}")
        if self.tag == "beta":
            if self.beta is None or not self.beta > 1.0:
                raise ValueError(f"beta condition needs beta > 1, got {self.beta}")

    @property
    def coefficient(self) -> float:
        return {"pic": 2.0, "pic1": 2.0, "pic2": 2.0, "lemma43": 4.0, "lemma44": 6.0}.get(
            self.tag, 2.0 * (self.beta or 0.0)
        )

    def effective_params(self) -> tuple[float, float]:
        if self.tag in ("pic", "beta"):
            return 1.0, 1.0
        if self.tag in ("pic1", "lemma43"):
            return float(self.lam), 1.0
        return float(self.lam), float(self.mu)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"tag": self.tag}
        if self.tag == "beta":
            out["beta"] = float(self.beta)
        return out


class FrameError(ValueError):
    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"frame is not orthonormal (Gram residual {residual:.3e})")


@dataclass(frozen=True, eq=False)
class Frame4:
    """Four orthonormal vectors in ``R^n``, stored as the columns of ``vectors``."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.array(self.vectors, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != 4 or v.shape[0] < 4:
            raise ValueError(f"a four-frame is an (n, 4) array with n >= 4, got {v.shape}")
        residual = float(np.max(np.abs(v.T @ v - np.eye(4))))
        if residual > 1e-12:
            raise FrameError(residual)
        v.flags.writeable = False
        object.__setattr__(self, "vectors", v)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]


def _wedge(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    iu, ju = np.triu_indices(n, 1)
    return x[..., iu] * y[..., ju] - x[..., ju] * y[..., iu]


def _frame_components(R: CurvatureTensor, frames: np.ndarray) -> tuple[np.ndarray, ...]:
    """``R_1313, R_1414, R_2323, R_2424, R_1234`` for a stack of frames."""
    e = [frames[..., k] for k in range(4)]
    m = R.lambda2
    w13, w14 = _wedge(e[0], e[2]), _wedge(e[0], e[3])
    w23, w24 = _wedge(e[1], e[2]), _wedge(e[1], e[3])
    w12, w34 = _wedge(e[0], e[1]), _wedge(e[2], e[3])

    def quad(a, b):
        return np.einsum("sa,ab,sb->s", a, m, b)

    return quad(w13, w13), quad(w14, w14), quad(w23, w23), quad(w24, w24), quad(w12, w34)


def _expression(coeffs, lam, mu, c):
    a, b, cc, d, e = coeffs
    return a + lam**2 * b + mu**2 * cc + lam**2 * mu**2 * d - c * lam * mu * e


def condition_value(R: CurvatureTensor, expr: ConditionExpr, frame: Frame4 | np.ndarray) -> float:
    """Value of ``expr`` at the given frame and the expression's own ``lam``/``mu``."""
    if not isinstance(frame, Frame4):
        frame = Frame4(frame)
    if frame.n != R.n:
        raise ValueError(f"frame lives in R^{frame.n}, tensor in R^{R.n}")
    lam, mu = expr.effective_params()
    coeffs = _frame_components(R, frame.vectors[None])
    return float(_expression(coeffs, lam, mu, expr.coefficient)[0])


def _quad_min(a2, a1, a0, lo, hi):
    """Minimize ``a2 x^2 + a1 x + a0`` over ``[lo, hi]`` elementwise."""
    x_lo = np.full_like(a2, lo)
    x_hi = np.full_like(a2, hi)
    v_lo = a2 * lo * lo + a1 * lo + a0
    v_hi = a2 * hi * hi + a1 * hi + a0
    best_x = np.where(v_lo <= v_hi, x_lo, x_hi)
    best_v = np.minimum(v_lo, v_hi)
    # Near-zero a2 pushes the vertex to +-inf, which then fails the range test.
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        vert = np.where(a2 > 0, -a1 / (2.0 * a2), 0.0)
        inside = (a2 > 0) & (vert >= lo) & (vert <= hi)
        v_vert = a0 - np.where(inside, a1 * a1 / (4.0 * np.where(a2 > 0, a2, 1.0)), 0.0)
    take = inside & (v_vert < best_v)
    return np.where(take, v_vert, best_v), np.where(take, vert, best_x)


def _lam_range(tag: str) -> float:
    return LAMBDA_BOUND if tag in ("lemma43", "lemma44") else 1.0


def _min_over_lam(coeffs, mu, c, bound):
    a, b, cc, d, e = coeffs
    return _quad_min(b + mu * mu * d, -c * mu * e, a + mu * mu * cc, -bound, bound)


_INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


def _inner_min(coeffs, expr: ConditionExpr):
    """Per-frame minimum over the free parameters: ``(value, lam, mu)`` arrays."""
    tag, c = expr.tag, expr.coefficient
    size = coeffs[0].shape[0]
    ones = np.ones(size)
    if tag in ("pic", "beta"):
        return _expression(coeffs, 1.0, 1.0, c), ones, ones
    if tag in ("pic1", "lemma43"):
        val, lam = _min_over_lam(coeffs, ones, c, _lam_range(tag))
        return val, lam, ones

    # mu in [-1, 1]: grid, then golden section in the bracket around the best node.
    bound = _lam_range(tag)
    grid = np.linspace(-1.0, 1.0, GRID_POINTS)
    vals = np.empty((size, GRID_POINTS))
    for g, mu in enumerate(grid):
        vals[:, g] = _min_over_lam(coeffs, np.full(size, mu), c, bound)[0]
    best = np.argmin(vals, axis=1)
    lo = grid[np.maximum(best - 1, 0)]
    hi = grid[np.minimum(best + 1, GRID_POINTS - 1)]
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1 = _min_over_lam(coeffs, x1, c, bound)[0]
    f2 = _min_over_lam(coeffs, x2, c, bound)[0]
    for _ in range(40):
        left = f1 <= f2
        lo, hi = np.where(left, lo, x1), np.where(left, x2, hi)
        x1n = np.where(left, hi - _INV_PHI * (hi - lo), x2)
        x2n = np.where(left, x1, lo + _INV_PHI * (hi - lo))
        fe = _min_over_lam(coeffs, np.where(left, x1n, x2n), c, bound)[0]
        f1, f2 = np.where(left, fe, f2), np.where(left, f1, fe)
        x1, x2 = x1n, x2n
    mu_gold = np.where(f1 <= f2, x1, x2)
    mu_grid = grid[best]
    v_gold, l_gold = _min_over_lam(coeffs, mu_gold, c, bound)
    v_grid, l_grid = _min_over_lam(coeffs, mu_grid, c, bound)
    use_gold = v_gold < v_grid
    return (
        np.where(use_gold, v_gold, v_grid),
        np.where(use_gold, l_gold, l_grid),
        np.where(use_gold, mu_gold, mu_grid),
    )


def _evaluate(R, frames, expr):
    return _inner_min(_frame_components(R, frames), expr)


def _random_frames(n: int, count: int, seed: int) -> np.ndarray:
    """Gram-Schmidt of i.i.d. Gaussian ``n x 4`` blocks; row ``i`` is sample ``i``."""
    g = gaussians(seed, (count, n, 4))
    q, r = np.linalg.qr(g)
    signs = np.sign(np.diagonal(r, axis1=1, axis2=2))
    signs[signs == 0] = 1.0
    return q * signs[:, None, :]


def _complete_basis(frame: np.ndarray) -> np.ndarray:
    n = frame.shape[0]
    q, _ = np.linalg.qr(frame, mode="complete")
    q = q.copy()
    q[:, :4] = frame
    if n > 4:
        # Re-orthogonalize the complement against the exact frame.
        comp = q[:, 4:] - frame @ (frame.T @ q[:, 4:])
        comp, _ = np.linalg.qr(comp)
        q[:, 4:] = comp
    return q


def _generators(n: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(4) for b in range(a + 1, n)]


def _has_mu(tag: str) -> bool:
    return tag in ("pic2", "lemma44")


def _fixed_mu_value(R, frames, expr, mu):
    """Per-frame value with ``mu`` held fixed and ``lam`` minimized in closed form."""
    coeffs = _frame_components(R, frames)
    if not _has_mu(expr.tag):
        return _inner_min(coeffs, expr)[0]
    return _min_over_lam(coeffs, mu, expr.coefficient, _lam_range(expr.tag))[0]


def _refine(R, expr, basis, mu, value, max_rounds=400, h0=0.25, h_min=1e-10, min_gain=1e-12):
    """Pattern search over Givens rotations of a full orthonormal basis.

    Only planes touching the frame (its first four columns) are used:
    6 within the frame and 4 (n - 4) against the complement.  For tags with
    a free ``mu`` it is one more coordinate of the search, clamped to [-1, 1].
    """
    gens = _generators(R.n)
    with_mu = _has_mu(expr.tag)
    h = h0
    steps = 0
    for _ in range(max_rounds):
        if h < h_min:
            break
        moves, mus = [], []
        for a, b in gens:
            for sgn in (1.0, -1.0):
                c, s = np.cos(sgn * h), np.sin(sgn * h)
                nb = basis.copy()
                nb[:, a] = c * basis[:, a] + s * basis[:, b]
                nb[:, b] = -s * basis[:, a] + c * basis[:, b]
                moves.append(nb)
                mus.append(mu)
        if with_mu:
            for sgn in (1.0, -1.0):
                moves.append(basis)
                mus.append(float(np.clip(mu + sgn * h, -1.0, 1.0)))
        stack = np.stack(moves)
        vals = _fixed_mu_value(R, stack[:, :, :4], expr, np.asarray(mus))
        k = int(np.argmin(vals))
        gain = value - vals[k]
        if gain > 0:
            basis, mu, value = stack[k], mus[k], float(vals[k])
            steps += 1
        if gain < min_gain:
            h *= 0.5
    return basis, mu, value, steps


@dataclass(frozen=True, eq=False)
class FrameCertificate:
    """Best frame found for an expression; an upper bound on its infimum."""

    expr: ConditionExpr
    best_value: float
    frame: np.ndarray
    params: dict[str, float]
    samples: int
    refinement_steps: int
    seed: int
    tol: float = field(default=0.0)

    @property
    def status(self) -> str:
        if self.best_value < -self.tol:
            return "violation"
        if self.best_value <= self.tol:
            return "boundary"
        return "no-violation-found"

    def to_dict(self) -> dict[str, Any]:
        return {
            "expr": self.expr.to_dict(),
            "best_value": float(self.best_value),
            "frame": self.frame.tolist(),
            "params": {k: float(v) for k, v in self.params.items()},
            "samples": int(self.samples),
            "refinement_steps": int(self.refinement_steps),
            "seed": int(self.seed),
            "status": self.status,
        }


def _free_params(expr: ConditionExpr, lam: float, mu: float) -> dict[str, float]:
    if expr.tag in ("pic", "beta"):
        return {}
    if expr.tag in ("pic1", "lemma43"):
        return {"lam": lam}
    return {"lam": lam, "mu": mu}


def certify_min(
    R: CurvatureTensor,
    expr: ConditionExpr,
    budget: int = 5000,
    seed: int = 0,
    refine_top: int = REFINE_TOP,
    tol: float = VIOLATION_TOL,
) -> FrameCertificate:
    """Search orthonormal four-frames for the minimum of ``expr``.

    ``budget`` random frames are scored with the free parameters minimized
    per frame (closed form in ``lam``, grid plus golden section in ``mu``);
    the best ``refine_top`` (ties broken by sample index) are then refined by
    Givens-rotation pattern search.  Deterministic in ``seed``.
    """
    if R.n < 4:
        raise ValueError("four-frame conditions need n >= 4")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    frames = _random_frames(R.n, budget, derive_seed(seed, 0))
    vals, lams, mus = _evaluate(R, frames, expr)
    order = np.lexsort((np.arange(budget), vals))

    best_frame = frames[order[0]]
    best_value = float(vals[order[0]])
    steps = 0
    for idx in order[:refine_top]:
        basis = _complete_basis(frames[idx])
        basis, _, value, k = _refine(R, expr, basis, float(mus[idx]), float(vals[idx]))
        steps += k
        if value < best_value:
            best_value, best_frame = value, basis[:, :4]

    # Re-derive the parameters at the final frame so the certificate is exact.
    v, lam, mu = _evaluate(R, best_frame[None], expr)
    lam, mu = float(lam[0]), float(mu[0])
    exact = ConditionExpr(expr.tag, lam if expr.tag not in ("pic", "beta") else 1.0,
                          mu if expr.tag in ("pic2", "lemma44") else 1.0, expr.beta)
    frame = Frame4(_orthonormalize(best_frame))
    value = condition_value(R, exact, frame)
    return FrameCertificate(
        expr=expr,
        best_value=value,
        frame=frame.vectors,
        params=_free_params(expr, lam, mu),
        samples=budget,
        refinement_steps=steps,
        seed=int(seed),
        tol=band(R, tol),
    )


def _orthonormalize(f: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(f)
    return q * np.sign(np.where(np.diag(r) == 0, 1.0, np.diag(r)))


def min_sectional(R: CurvatureTensor, budget: int = 2000, seed: int = 0) -> float:
    """Smallest sectional curvature over coordinate planes and random planes."""
    n = R.n
    if n < 2:
        return 0.0
    comps = R.components
    coord = min(comps[i, j, i, j] for i in range(n) for j in range(i + 1, n))
    g = gaussians(derive_seed(seed, 1), (budget, n, 2))
    q, _ = np.linalg.qr(g)
    w = _wedge(q[..., 0], q[..., 1])
    rand = np.einsum("sa,ab,sb->s", w, R.lambda2, w)
    return float(min(coord, rand.min()))


@dataclass(frozen=True)
class KPositivity:
    status: str
    smallest_sum: float
    k: int
    kind: str
    tol: float


def k_positivity(R: CurvatureTensor, kind: str, k: int, tol: float | None = None) -> KPositivity:
    """Classify the sum of the ``k`` smallest eigenvalues of either operator.

    ``kind`` is ``"first"`` (two-forms) or ``"second"`` (traceless symmetric
    two-tensors).  Sums inside ``[-tol, tol]`` count as nonnegative; the
    default ``tol`` is ``1e-10 (1 + ||R||_inf)``.
    """
    if kind == "first":
        spec = first_kind_spectrum(R)
    elif kind == "second":
        spec = second_kind_spectrum(R)
    else:
        raise ValueError(f"kind must be 'first' or 'second', got {kind!r}")
    dim = len(spec.eigenvalues)
    if not 1 <= k <= dim:
        raise ValueError(f"k must lie in [1, {dim}] for the {kind}-kind operator, got {k}")
    tol = 1e-10 * (1.0 + R.norm_inf) if tol is None else tol
    total = spec.smallest_sum(k)
    if total > tol:
        status = "positive"
    elif total >= -tol:
        status = "nonnegative"
    else:
        status = "indefinite"
    return KPositivity(status, total, k, kind, tol)


@dataclass(frozen=True)
class RicciBound:
    min_ricci: float
    bound: float
    margin: float
    strict: bool
    passed: bool


def ricci_bound_check(R: CurvatureTensor, strict: bool = False, tol: float = 1e-10) -> RicciBound:
    """Compare the smallest Ricci eigenvalue with ``S / (n (n + 1))``."""
    n = R.n
    s = scalar(R)
    bound = s / (n * (n + 1))
    low = float(eigen_sym(ricci(R)).eigenvalues[0])
    margin = low - bound
    passed = (margin > tol and bound > tol) if strict else (margin >= -tol and bound >= -tol)
    return RicciBound(low, bound, margin, strict, bool(passed))


def orthogonal_bisectional(
    R: CurvatureTensor, J: ComplexStructure, x: np.ndarray, y: np.ndarray, tol: float = 1e-10
) -> float:
    """``R(X, JX, Y, JY)`` for unit ``X, Y`` with ``g(X, Y) = g(X, JY) = 0``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    jx, jy = J.J @ x, J.J @ y
    worst = max(abs(x @ x - 1.0), abs(y @ y - 1.0), abs(x @ y), abs(x @ jy))
    if worst > tol:
        raise ValueError(f"X, Y must be unit with g(X,Y) = g(X,JY) = 0 (violation {worst:.3e})")
    return R(x, jx, y, jy)


def kahler_symmetry_residual(R: CurvatureTensor, J: ComplexStructure) -> float:
    """``max |R(e_i, e_j, e_k, e_l) - R(e_i, e_j, J e_k, J e_l)|``."""
    if R.n != J.n:
        raise ValueError(f"J acts on R^{J.n}, tensor lives in R^{R.n}")
    j = J.J
    turned = np.einsum("ijab,ak,bl->ijkl", R.components, j, j, optimize=True)
    return float(np.max(np.abs(R.components - turned)))
