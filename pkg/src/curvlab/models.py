"""Model curvature tensors: space forms, products, complex projective space
and seeded random tensors."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from ._rng import derive_seed, gaussians, uniforms
from .curvature import CurvatureTensor, bianchi_project, from_components
from .spaces import dim_lambda2

__all__ = [
    "ComplexStructure",
    "ModelSpec",
    "sphere",
    "flat",
    "product",
    "cylinder",
    "standard_complex_structure",
    "cpn",
    "random_curvature",
    "random_candidate",
    "random_filtered",
]


@dataclass(frozen=True, eq=False)
class ComplexStructure:
    """Orthogonal complex structure ``J`` on ``R^(2m)``; ``J @ x`` applies it."""

    J: np.ndarray

    def __post_init__(self):
        j = np.array(self.J, dtype=np.float64)
        n = j.shape[0]
        if j.shape != (n, n) or n % 2:
            raise ValueError(f"J must be a square matrix of even size, got {j.shape}")
        eye = np.eye(n)
        if np.max(np.abs(j @ j + eye)) > 1e-12:
            raise ValueError("J does not square to -I")
        if np.max(np.abs(j.T @ j - eye)) > 1e-12:
            raise ValueError("J is not orthogonal")
        j.flags.writeable = False
        object.__setattr__(self, "J", j)

    @property
    def n(self) -> int:
        return self.J.shape[0]

    @property
    def m(self) -> int:
        return self.n // 2


def sphere(n: int, kappa: float = 1.0) -> CurvatureTensor:
    """Constant sectional curvature ``kappa``: ``R = kappa (g_ik g_jl - g_il g_jk)``."""
    if n < 1:
        raise ValueError("sphere dimension must be >= 1")
    kappa = float(kappa)
    origin = {"kind": "sphere", "params": {"dim": int(n), "kappa": kappa}}
    return CurvatureTensor(n, kappa * np.eye(dim_lambda2(n)), origin)


def flat(n: int) -> CurvatureTensor:
    if n < 1:
        raise ValueError("flat dimension must be >= 1")
    big = dim_lambda2(n)
    return CurvatureTensor(n, np.zeros((big, big)), {"kind": "flat", "params": {"dim": int(n)}})


def product(R1: CurvatureTensor, R2: CurvatureTensor) -> CurvatureTensor:
    """Direct sum: each factor's components in its own block, mixed ones zero."""
    n1, n2 = R1.n, R2.n
    n = n1 + n2
    comps = np.zeros((n, n, n, n))
    comps[:n1, :n1, :n1, :n1] = R1.components
    comps[n1:, n1:, n1:, n1:] = R2.components
    origin = None
    if R1.origin is not None and R2.origin is not None:
        origin = {"kind": "product", "params": {"left": R1.origin, "right": R2.origin}}
    return from_components(comps, origin)


def cylinder(n: int) -> CurvatureTensor:
    """``S^(n-1) x R`` with the unit round sphere."""
    if n < 3:
        raise ValueError("cylinder needs n >= 3")
    R = product(sphere(n - 1, 1.0), flat(1))
    return R.with_origin({"kind": "cylinder", "params": {"dim": int(n)}})


def standard_complex_structure(m: int) -> ComplexStructure:
    """``J e_(2a) = e_(2a+1)``, ``J e_(2a+1) = -e_(2a)`` (zero-based)."""
    if m < 1:
        raise ValueError("complex dimension must be >= 1")
    j = np.zeros((2 * m, 2 * m))
    for a in range(m):
        j[2 * a + 1, 2 * a] = 1.0
        j[2 * a, 2 * a + 1] = -1.0
    return ComplexStructure(j)


def cpn(m: int) -> tuple[CurvatureTensor, ComplexStructure]:
    """Fubini-Study curvature of ``CP^m`` at a point, holomorphic sectional curvature 4.

    ``R_ijkl = g_ik g_jl - g_il g_jk + J_ik J_jl - J_il J_jk + 2 J_ij J_kl``.
    """
    cs = standard_complex_structure(m)
    g = np.eye(2 * m)
    j = cs.J
    comps = (
        np.einsum("ik,jl->ijkl", g, g)
        - np.einsum("il,jk->ijkl", g, g)
        + np.einsum("ik,jl->ijkl", j, j)
        - np.einsum("il,jk->ijkl", j, j)
        + 2.0 * np.einsum("ij,kl->ijkl", j, j)
    )
    return from_components(comps, {"kind": "cpn", "params": {"m": int(m)}}), cs


def random_curvature(n: int, seed: int, scale: float = 1.0) -> CurvatureTensor:
    """Bianchi projection of a seeded Gaussian symmetric pair-basis matrix.

    The raw matrix is ``(A + A^T) / sqrt(2)`` with ``A`` i.i.d. standard normal,
    so off-diagonal entries are N(0, 1) before projection.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    big = dim_lambda2(n)
    a = gaussians(seed, (big, big))
    R = bianchi_project((a + a.T) / np.sqrt(2.0)) * scale
    return R.with_origin(
        {"kind": "random", "params": {"dim": int(n), "seed": int(seed), "scale": float(scale)}}
    )


def random_candidate(n: int, seed: int, attempt: int, scale: float = 1.0) -> CurvatureTensor:
    """Proposal ``attempt`` of :func:`random_filtered`.

    Even attempts are pure projected Gaussians; odd attempts are convex
    combinations ``t * sphere(n, scale) + (1 - t) * gaussian`` with ``t`` uniform
    in ``[0, 1)``.  Both draw from the sub-stream ``(seed, attempt)``.
    """
    child = derive_seed(seed, attempt)
    weight = 0.0 if attempt % 2 == 0 else float(uniforms(derive_seed(seed, attempt, 1), 1)[0])
    return mixed(n, child, weight, scale)


def mixed(n: int, seed: int, sphere_weight: float, scale: float = 1.0) -> CurvatureTensor:
    """``w * sphere(n, scale) + (1 - w) * random_curvature(n, seed, scale)``."""
    w = float(sphere_weight)
    base = random_curvature(n, seed, scale)
    R = base if w == 0.0 else w * sphere(n, scale) + (1.0 - w) * base
    params = {"dim": int(n), "seed": int(seed), "scale": float(scale)}
    if w != 0.0:
        params["sphere_weight"] = w
    return R.with_origin({"kind": "random", "params": params})


def random_filtered(
    n: int,
    seed: int,
    predicate: Callable[[CurvatureTensor], bool],
    max_attempts: int = 1000,
    scale: float = 1.0,
    start: int = 0,
) -> CurvatureTensor | None:
    """First proposal (from attempt ``start`` on) that satisfies ``predicate``.

    Returns ``None`` when ``max_attempts`` proposals are exhausted.  The
    accepted tensor's ``origin`` rebuilds it exactly.
    """
    for attempt in range(start, start + max_attempts):
        R = random_candidate(n, seed, attempt, scale)
        if predicate(R):
            return R
    return None


_KINDS = ("sphere", "flat", "product", "cylinder", "cpn", "random")


@dataclass(frozen=True)
class ModelSpec:
    """JSON-expressible description of a model tensor: ``{"kind", "params"}``."""

    kind: str
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}; expected one of {_KINDS}")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ModelSpec":
        if not isinstance(data, dict) or "kind" not in data:
            raise ValueError("model spec must be an object with a 'kind' field")
        return cls(data["kind"], dict(data.get("params", {})))

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "params": dict(self.params)}

    def build(self) -> CurvatureTensor:
        p = self.params
        try:
            if self.kind == "sphere":
                return sphere(_as_int(p["dim"], 1), float(p.get("kappa", 1.0)))
            if self.kind == "flat":
                return flat(_as_int(p["dim"], 1))
            if self.kind == "cylinder":
                return cylinder(_as_int(p["dim"], 3))
            if self.kind == "cpn":
                return cpn(_as_int(p["m"], 1))[0]
            if self.kind == "product":
                left = ModelSpec.from_dict(p["left"]).build()
                right = ModelSpec.from_dict(p["right"]).build()
                return product(left, right)
            return mixed(
                _as_int(p["dim"], 1),
                int(p["seed"]),
                float(p.get("sphere_weight", 0.0)),
                float(p.get("scale", 1.0)),
            )
        except KeyError as exc:
            raise ValueError(f"model {self.kind!r} is missing parameter {exc.args[0]!r}") from None


def _as_int(value, lo: int) -> int:
    if isinstance(value, bool) or int(value) != value:
        raise ValueError(f"expected an integer, got {value!r}")
    if value < lo:
        raise ValueError(f"expected an integer >= {lo}, got {value}")
    return int(value)
