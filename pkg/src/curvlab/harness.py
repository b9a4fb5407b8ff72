"""Verification suites over model spaces and seeded random tensors.

Each suite is a list of checks.  A check evaluates one tensor and returns
``passed`` (``True``/``False``, or ``None`` when the tensor falls outside the
check's hypothesis or inside the tolerance band), the measured values and a
signed margin.  Failures keep the model spec and check parameters, so
:func:`rerun_failure` reproduces them bit for bit.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import __version__
from ._rng import derive_seed, gaussians
from .conditions import (
    ConditionExpr,
    band,
    certify_min,
    k_positivity,
    min_sectional,
    orthogonal_bisectional,
    kahler_symmetry_residual,
)
from .curvature import (
    CurvatureTensor,
    ricci,
    scalar,
    second_kind_bilinear,
    second_kind_matrix,
    second_kind_spectrum,
)
from .models import (
    ModelSpec,
    cpn,
    cylinder,
    flat,
    mixed,
    product,
    random_candidate,
    random_curvature,
    sphere,
    standard_complex_structure,
)
from .spaces import dim_traceless, eigen_sym

SUITES = ("lemma31", "prop32", "prop42", "lemmas4x", "prop51", "kahler")

# Distinct stream labels per suite so their samples never coincide.
_STREAM = {name: 101 + i for i, name in enumerate(SUITES)}

HYPOTHESIS_TOL = 1e-8
IDENTITY_TOL = 1e-12


@dataclass
class Config:
    """Harness configuration; every field is JSON-serializable."""

    suites: list[str] = field(default_factory=lambda: list(SUITES))
    seed: int = 42
    trials: int = 200
    dims: list[int] = field(default_factory=lambda: [4, 5, 6])
    frame_dims: list[int] = field(default_factory=lambda: [4, 5])
    frame_samples: int = 24
    budget: int = 5000
    min_yield: int = 20
    max_attempts: int = 4000
    inject: list[dict[str, Any]] = field(default_factory=list)
    threads: int = 1

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Config":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**data)
        bad = [s for s in cfg.suites if s not in SUITES]
        if bad:
            raise ValueError(f"unknown suite ids {bad}; expected a subset of {SUITES}")
        return cfg

    def to_dict(self) -> dict[str, Any]:
        return {
            "suites": list(self.suites),
            "seed": int(self.seed),
            "trials": int(self.trials),
            "dims": [int(d) for d in self.dims],
            "frame_dims": [int(d) for d in self.frame_dims],
            "frame_samples": int(self.frame_samples),
            "budget": int(self.budget),
            "min_yield": int(self.min_yield),
            "max_attempts": int(self.max_attempts),
            "inject": list(self.inject),
        }


@dataclass
class SuiteResult:
    id: str
    trials: int = 0
    passes: int = 0
    exempt: int = 0
    failures: list[dict[str, Any]] = field(default_factory=list)
    yields: dict[str, int] = field(default_factory=dict)
    insufficient: list[str] = field(default_factory=list)
    highlights: list[dict[str, Any]] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def status(self) -> str:
        if self.failures:
            return "fail"
        if self.insufficient:
            return "insufficient-yield"
        return "pass"

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def record(self, check: str, R: CurvatureTensor, params: dict[str, Any], highlight: str | None = None):
        passed, measured, margin = CHECKS[check](R, params)
        if highlight is not None:
            self.highlights.append({"label": highlight, "measured": measured, "passed": passed})
        if passed is None:
            self.exempt += 1
            return None
        self.trials += 1
        if passed:
            self.passes += 1
        else:
            self.failures.append(
                {
                    "check": check,
                    "input": {"model": R.origin, "params": params},
                    "measured": measured,
                    "margin": margin,
                }
            )
        return passed

    def require_yield(self, label: str, accepted: int, needed: int):
        self.yields[label] = accepted
        if accepted < needed:
            self.insufficient.append(label)

    def to_dict(self, timing: bool = False) -> dict[str, Any]:
        out = {
            "id": self.id,
            "status": self.status,
            "trials": self.trials,
            "passes": self.passes,
            "exempt": self.exempt,
            "failures": self.failures,
            "yields": self.yields,
            "highlights": self.highlights,
        }
        if timing:
            out["wall_time"] = self.wall_time
        return out


# ---------------------------------------------------------------------------
# checks: (R, params) -> (passed | None, measured, margin)


def _sum_smallest(R: CurvatureTensor, k: int) -> float:
    return second_kind_spectrum(R).smallest_sum(k)


def _hypothesis(R: CurvatureTensor, k: int) -> bool | None:
    """k-nonnegativity of the second kind with the boundary band excluded."""
    s = _sum_smallest(R, k)
    tol = band(R, HYPOTHESIS_TOL)
    if s >= tol:
        return True
    if s <= -tol:
        return False
    return None


def _conclusion_tensor(R: CurvatureTensor, params: dict[str, Any]) -> CurvatureTensor:
    # Fault injection: evaluate the conclusion on a sign-flipped copy.
    return -R if params.get("fault") == "sign_flip" else R


def _tetra_phis():
    r2, r6 = np.sqrt(2.0), np.sqrt(6.0)
    e = np.eye(3)

    def sym(i, j):
        return np.outer(e[i], e[j]) + np.outer(e[j], e[i])

    return [
        sym(0, 1) / r2,
        sym(0, 2) / r2,
        sym(1, 2) / r2,
        (sym(0, 0) - sym(1, 1)) / (2 * r2),
        (sym(0, 0) + sym(1, 1) - 2 * sym(2, 2)) / (2 * r6),
    ]


def check_lemma31(R, params):
    c = R.components
    r12, r13, r23 = c[0, 1, 0, 1], c[0, 2, 0, 2], c[1, 2, 1, 2]
    expected = [r12, r13, r23, r12, (2.0 / 3.0) * (r13 + r23) - r12 / 3.0]
    got = [second_kind_bilinear(R, p, p) for p in _tetra_phis()]
    resid = max(abs(a - b) for a, b in zip(got, expected))
    tol = IDENTITY_TOL * (1.0 + R.norm_inf)
    return resid <= tol, {"values": got, "expected": expected, "residual": resid}, tol - resid


def check_ricci_bound(R, params):
    """k-nonnegative second kind implies Ric >= S / (n (n + 1))."""
    k = int(params["k"])
    hyp = _hypothesis(R, k)
    if not hyp:
        return None, {"hypothesis": hyp, "smallest_sum": _sum_smallest(R, k)}, 0.0
    T = _conclusion_tensor(R, params)
    n = R.n
    s = scalar(T)
    low = float(eigen_sym(ricci(T)).eigenvalues[0])
    bound = s / (n * (n + 1))
    margin = low - bound + HYPOTHESIS_TOL
    measured = {"min_ricci": low, "bound": bound, "scalar": s, "smallest_sum": _sum_smallest(R, k)}
    return margin >= 0 and s >= -band(R, HYPOTHESIS_TOL), measured, margin


def check_zero_ricci_degenerate(R, params):
    """Three-nonnegative in dimension three plus a zero Ricci eigenvalue forces R = 0."""
    low = float(np.min(np.abs(eigen_sym(ricci(R)).eigenvalues)))
    hyp = _hypothesis(R, 3)
    flat_enough = R.norm_inf <= 1e-12
    ok = (low > 1e-10) or (hyp is not True) or flat_enough
    return bool(ok), {"min_abs_ricci": low, "hypothesis": hyp, "norm": R.norm_inf}, 0.0


def check_scalar_classification(R, params):
    n = R.n
    k = dim_traceless(n)
    cls = k_positivity(R, "second", k, tol=band(R, 1e-10)).status
    s = scalar(R)
    tol = band(R, 1e-10) * 2 * n / (n + 2)
    expected = "positive" if s > tol else ("indefinite" if s < -tol else "nonnegative")
    return cls == expected, {"classification": cls, "scalar": s, "expected": expected}, 0.0


def check_trace_identity(R, params):
    n = R.n
    s = scalar(R)
    restricted = float(np.trace(second_kind_matrix(R, True)))
    full = float(np.trace(second_kind_matrix(R, False)))
    g = np.eye(n) / np.sqrt(n)
    g_dir = second_kind_bilinear(R, g, g)
    scale = 1.0 + abs(s)
    errs = [
        abs(restricted - (n + 2) / (2 * n) * s),
        abs(full - s / 2),
        abs(g_dir + s / n),
    ]
    worst = max(errs) / scale
    measured = {"restricted_trace": restricted, "full_trace": full, "g_direction": g_dir, "scalar": s}
    return worst <= 1e-10, measured, 1e-10 - worst


def check_sectional(R, params):
    """Two-nonnegative second kind implies nonnegative sectional curvature."""
    hyp = _hypothesis(R, 2)
    if not hyp:
        return None, {"hypothesis": hyp}, 0.0
    T = _conclusion_tensor(R, params)
    low = min_sectional(T, int(params.get("budget", 2000)), int(params.get("seed", 0)))
    # The proof's identity on a random orthonormal pair.
    q, _ = np.linalg.qr(gaussians(derive_seed(int(params.get("seed", 0)), 7), (R.n, 2)))
    e1, e2 = q[:, 0], q[:, 1]
    phi1 = (np.outer(e1, e2) + np.outer(e2, e1)) / np.sqrt(2.0)
    phi2 = (np.outer(e1, e1) - np.outer(e2, e2)) / np.sqrt(2.0)
    ident = abs(2 * T(e1, e2, e1, e2) - second_kind_bilinear(T, phi1, phi1) - second_kind_bilinear(T, phi2, phi2))
    tol = band(R, 1e-10)
    margin = low + tol
    ok = margin >= 0 and ident <= IDENTITY_TOL * (1.0 + R.norm_inf)
    return ok, {"min_sectional": low, "identity_residual": ident}, margin


def check_frame_implication(R, params):
    """Hypothesis k-nonnegative second kind implies a frame condition is nonnegative."""
    k = int(params["k"])
    hyp = _hypothesis(R, k)
    if not hyp:
        return None, {"hypothesis": hyp}, 0.0
    T = _conclusion_tensor(R, params)
    expr = ConditionExpr(params["expr"], beta=params.get("beta"))
    cert = certify_min(T, expr, int(params["budget"]), int(params["seed"]))
    tol = band(R, 1e-8)
    margin = cert.best_value + tol
    return margin >= 0, {"best_value": cert.best_value, "params": cert.params, "status": cert.status}, margin


def check_split(R, params):
    """Non-flat products are not (k (n - k) + 1)-nonnegative."""
    k, n = int(params["k"]), R.n
    q = k * (n - k) + 1
    s = _sum_smallest(R, q)
    need = float(params.get("max_sum", -1e-6))
    return s <= need, {"k": k, "count": q, "smallest_sum": s}, need - s


def check_sum_equals(R, params):
    q = int(params["count"])
    s = _sum_smallest(R, q)
    err = abs(s - float(params["expected"]))
    return err <= 1e-10, {"count": q, "smallest_sum": s, "expected": float(params["expected"])}, 1e-10 - err


def check_split_identities(R, params):
    """Product-structure identities used in the splitting argument."""
    k, n = int(params["k"]), R.n
    e = np.eye(n)
    worst = 0.0
    for i in range(k):
        for p in range(k, n):
            phi = (np.outer(e[i], e[p]) + np.outer(e[p], e[i])) / np.sqrt(2.0)
            worst = max(worst, abs(second_kind_bilinear(R, phi, phi)))
    c = R.components
    s1 = float(sum(c[i, j, i, j] for i in range(k) for j in range(k)))
    s2 = float(sum(c[p, q, p, q] for p in range(k, n) for q in range(k, n)))
    diag = np.r_[np.full(k, n - k), np.full(n - k, -k)].astype(float)
    psi = np.diag(diag) / np.sqrt(n * k * (n - k))
    lhs = n * k * (n - k) * second_kind_bilinear(R, psi, psi)
    rhs = -((n - k) ** 2) * s1 - k**2 * s2
    worst = max(worst, abs(lhs - rhs))
    tol = IDENTITY_TOL * (1.0 + n * n * R.norm_inf)
    return worst <= tol, {"residual": worst, "psi_value": lhs, "factor_scalars": [s1, s2]}, tol - worst


def _complex_structure_for(R: CurvatureTensor):
    return standard_complex_structure(R.n // 2)


def check_beta(R, params):
    """Search for a frame violating the beta inequality (or isotropic curvature at beta = 1)."""
    beta = float(params["beta"])
    expect = params["expect"]
    expr = ConditionExpr("pic") if beta == 1.0 else ConditionExpr("beta", beta=beta)
    cert = certify_min(R, expr, int(params["budget"]), int(params["seed"]))
    measured = {"best_value": cert.best_value, "status": cert.status}
    if expect == "violation":
        limit = float(params.get("limit", -band(R, 1e-8)))
        return cert.best_value < limit, measured, limit - cert.best_value
    if expect == "zero":
        tol = float(params.get("limit", 1e-6))
        return abs(cert.best_value) <= tol, measured, tol - abs(cert.best_value)
    tol = float(params.get("limit", 1e-6))
    return cert.best_value >= -tol, measured, cert.best_value + tol


def _admissible_pair(J: np.ndarray, seed: int, index: int):
    n = J.shape[0]
    g = gaussians(derive_seed(seed, index), (2, n))
    x = g[0] / np.linalg.norm(g[0])
    y = g[1] - (g[1] @ x) * x
    jx = J @ x
    y = y - (y @ jx) * jx
    return x, y / np.linalg.norm(y)


def check_kahler_identities(R, params):
    """Kähler symmetry, and the polarization identities behind the flatness argument."""
    cs = _complex_structure_for(R)
    J = cs.J
    resid = kahler_symmetry_residual(R, cs)
    worst = 0.0
    obc = []
    for t in range(int(params.get("pairs", 20))):
        x, y = _admissible_pair(J, int(params["seed"]), t)
        jx, jy = J @ x, J @ y
        sec4 = R(x, y, x, y) + R(jx, y, jx, y) + R(x, jy, x, jy) + R(jx, jy, jx, jy)
        worst = max(worst, abs(2 * R(x, jx, y, jy) - sec4))
        z, w = x, y
        jz, jw = jx, jy
        base = R(z, jz, z, jz) + R(w, jw, w, jw) + 2 * R(z, jz, w, jw)
        worst = max(worst, abs(R(z + w, jz + jw, z - w, jz - jw) - (base - 4 * R(z, jw, z, jw))))
        worst = max(worst, abs(R(z + jw, jz - w, z - jw, jz + w) - (base - 4 * R(z, w, z, w))))
        worst = max(worst, abs(R(z, jz, w, jw) - R(z, jw, z, jw) - R(z, w, z, w)))
        obc.append(orthogonal_bisectional(R, cs, x, y))
    tol = 1e-12 * (1.0 + R.norm_inf)
    ok = resid <= tol and worst <= 1e3 * tol
    measured = {
        "kahler_residual": resid,
        "identity_residual": worst,
        "orthogonal_bisectional_min": float(min(obc)),
        "orthogonal_bisectional_max": float(max(obc)),
    }
    if params.get("expect_flat"):
        combo = max(abs(v) for v in obc)
        ok = ok and combo <= tol
    return ok, measured, 0.0


def check_not_kahler(R, params):
    cs = _complex_structure_for(R)
    resid = kahler_symmetry_residual(R, cs)
    return resid > 1e-6, {"kahler_residual": resid}, resid - 1e-6


CHECKS: dict[str, Callable] = {
    "lemma31_identities": check_lemma31,
    "ricci_bound": check_ricci_bound,
    "zero_ricci_degenerate": check_zero_ricci_degenerate,
    "scalar_classification": check_scalar_classification,
    "trace_identity": check_trace_identity,
    "sectional_from_two_nonneg": check_sectional,
    "frame_implication": check_frame_implication,
    "split_violation": check_split,
    "smallest_sum_equals": check_sum_equals,
    "split_identities": check_split_identities,
    "beta_inequality": check_beta,
    "kahler_identities": check_kahler_identities,
    "not_kahler": check_not_kahler,
}


def rerun_failure(failure: dict[str, Any]) -> tuple[bool | None, dict[str, Any], float]:
    """Re-evaluate a recorded failure from its payload alone."""
    R = ModelSpec.from_dict(failure["input"]["model"]).build()
    return CHECKS[failure["check"]](R, failure["input"]["params"])


# ---------------------------------------------------------------------------
# sampling


def tight_sample(n: int, seed: int, k: int, margin: float = 1e-3) -> CurvatureTensor:
    """Random tensor pushed onto the k-nonnegative side with a small margin.

    Adding ``s * sphere`` shifts every second-kind eigenvalue by ``s``; the
    result is rescaled into the convex form ``w * sphere + (1 - w) * G``.
    """
    G = random_curvature(n, seed)
    total = _sum_smallest(G, k)
    shift = max(0.0, (margin - total) / k)
    return mixed(n, seed, shift / (1.0 + shift))


def hypothesis_samples(
    n: int, k: int, seed: int, count: int, max_attempts: int
) -> list[CurvatureTensor]:
    """``count`` tensors satisfying k-nonnegativity of the second kind.

    Half come from the rejection sampler's proposal stream, the rest are
    tight samples sitting just inside the hypothesis.
    """
    want_filtered = count - count // 2
    out = []
    for attempt in range(max_attempts):
        if len(out) >= want_filtered:
            break
        R = random_candidate(n, seed, attempt)
        if _hypothesis(R, k):
            out.append(R)
    i = 0
    while len(out) < count and i < max_attempts:
        R = tight_sample(n, derive_seed(seed, 1_000_000 + i), k)
        i += 1
        if _hypothesis(R, k):
            out.append(R)
    return out


# ---------------------------------------------------------------------------
# suites


def suite_lemma31(seed: int, trials: int = 200) -> SuiteResult:
    res = SuiteResult("lemma31")
    res.record("lemma31_identities", sphere(3), {}, highlight="sphere(3,1)")
    res.record("lemma31_identities", flat(3), {}, highlight="flat(3)")
    res.record("lemma31_identities", sphere(3, -0.7), {})
    res.record("lemma31_identities", cylinder(3), {})
    base = derive_seed(seed, _STREAM["lemma31"])
    for i in range(trials):
        res.record("lemma31_identities", random_curvature(3, derive_seed(base, i)), {})
    return res


def suite_prop32(seed: int, trials: int = 200, min_yield: int = 20, max_attempts: int = 4000) -> SuiteResult:
    res = SuiteResult("prop32")
    res.record("ricci_bound", sphere(3), {"k": 3}, highlight="sphere(3,1)")
    res.record("ricci_bound", sphere(3, 2.5), {"k": 3})
    res.record("zero_ricci_degenerate", flat(3), {}, highlight="flat(3)")
    res.record("ricci_bound", cylinder(3), {"k": 3}, highlight="cylinder(3) exempt")
    base = derive_seed(seed, _STREAM["prop32"])
    samples = hypothesis_samples(3, 3, base, trials, max_attempts)
    res.require_yield("n=3,k=3", len(samples), min_yield)
    for R in samples:
        res.record("ricci_bound", R, {"k": 3})
    # Products N^2 x R have a zero Ricci eigenvalue, so they must fail the hypothesis.
    for i in range(min(trials, 50)):
        R2 = random_curvature(2, derive_seed(base, 2, i))
        res.record("zero_ricci_degenerate", product(R2, flat(1)), {})
        res.record("zero_ricci_degenerate", product(sphere(2, 1.0 + i / 10), flat(1)), {})
    return res


def _models(n: int) -> list[CurvatureTensor]:
    out = [sphere(n), sphere(n, 0.3), flat(n), cylinder(n), sphere(n, -1.0)]
    if n >= 4:
        out.append(product(sphere(2), sphere(n - 2)))
    if n % 2 == 0:
        out.append(cpn(n // 2)[0])
    return out


def suite_prop42(
    seed: int,
    trials: int = 200,
    dims=(4, 5, 6),
    min_yield: int = 20,
    max_attempts: int = 4000,
    budget: int = 1000,
    frame_samples: int = 6,
    inject: list[dict[str, Any]] | None = None,
) -> SuiteResult:
    res = SuiteResult("prop42")
    base = derive_seed(seed, _STREAM["prop42"])
    for n in dims:
        models = _models(n)
        randoms = [random_curvature(n, derive_seed(base, n, 0, i)) for i in range(trials)]
        # (1) full-trace positivity is the sign of the scalar curvature
        for R in models + randoms:
            res.record("scalar_classification", R, {})
            res.record("trace_identity", R, {})
        # (2) n-nonnegative => Ric >= S / (n (n + 1))
        for R in models:
            res.record("ricci_bound", R, {"k": n}, highlight=f"n={n} {R.origin['kind']}" if R is models[0] else None)
        samples = hypothesis_samples(n, n, derive_seed(base, n, 2), trials, max_attempts)
        res.require_yield(f"n={n},k={n}", len(samples), min_yield)
        for R in samples:
            res.record("ricci_bound", R, {"k": n})
        # (3) two-nonnegative => nonnegative sectional curvature
        samples = hypothesis_samples(n, 2, derive_seed(base, n, 3), max(min_yield, trials // 4), max_attempts)
        res.require_yield(f"n={n},k=2", len(samples), min_yield)
        for i, R in enumerate(models + samples):
            res.record("sectional_from_two_nonneg", R, {"budget": 500, "seed": derive_seed(base, n, 3, i)})
        # (4), (5) frame conditions, light budget; the lemmas4x suite runs the heavy search
        for part, k, expr in ((4, 3, "pic1"), (5, 1, "pic2")):
            samples = hypothesis_samples(n, k, derive_seed(base, n, part), frame_samples, max_attempts)
            for i, R in enumerate(models + samples):
                res.record(
                    "frame_implication",
                    R,
                    {"k": k, "expr": expr, "budget": budget, "seed": derive_seed(base, n, part, i)},
                )
    for fault in inject or []:
        R = ModelSpec.from_dict(fault["model"]).build()
        k = int(fault.get("k", R.n))
        res.record("ricci_bound", R, {"k": k, "fault": fault.get("fault", "sign_flip")}, highlight="injected fault")
    return res


def suite_lemmas_4x(
    seed: int,
    trials: int = 24,
    budget: int = 5000,
    dims=(4, 5),
    min_yield: int = 20,
    max_attempts: int = 4000,
) -> SuiteResult:
    res = SuiteResult("lemmas4x")
    base = derive_seed(seed, _STREAM["lemmas4x"])
    plans = ((3, ("lemma43", "pic1")), (1, ("lemma44", "pic2")))
    for n in dims:
        models = _models(n)
        for k, exprs in plans:
            samples = hypothesis_samples(n, k, derive_seed(base, n, k), trials, max_attempts)
            res.require_yield(f"n={n},k={k}", len(samples), min_yield)
            for i, R in enumerate(models + samples):
                for expr in exprs:
                    label = None
                    if i < len(models):
                        label = f"n={n} {R.origin['kind']} {expr}"
                    res.record(
                        "frame_implication",
                        R,
                        {"k": k, "expr": expr, "budget": budget, "seed": derive_seed(base, n, k, i)},
                        highlight=label,
                    )
    return res


def suite_prop51(seed: int, trials: int = 20) -> SuiteResult:
    res = SuiteResult("prop51")
    # sharpness lines
    res.record("smallest_sum_equals", cylinder(4), {"count": 4, "expected": -0.5}, highlight="cylinder(4) k=1: smallest 4")
    res.record("smallest_sum_equals", cylinder(4), {"count": 5, "expected": 0.5}, highlight="cylinder(4) k=1: smallest 5")
    s2s2 = product(sphere(2), sphere(2))
    res.record("smallest_sum_equals", s2s2, {"count": 5, "expected": -1.0}, highlight="S2xS2 k=2: smallest 5")
    res.record("smallest_sum_equals", s2s2, {"count": 6, "expected": 0.0}, highlight="S2xS2 k=2: smallest 6")
    res.record("smallest_sum_equals", product(flat(2), flat(2)), {"count": 5, "expected": 0.0}, highlight="flat(2)xflat(2) vacuous")
    # sphere products with dims 1..4 and several curvatures
    for a in range(1, 5):
        for b in range(a, 5):
            if a < 2 and b < 2:
                continue
            for ka, kb in ((1.0, 1.0), (0.5, 2.0), (3.0, 1.0)):
                R = product(sphere(a, ka), sphere(b, kb))
                res.record("split_violation", R, {"k": a})
                res.record("split_identities", R, {"k": a})
    # random factors: a spot check, not a proof
    base = derive_seed(seed, _STREAM["prop51"])
    for i in range(trials):
        for a, b in ((2, 2), (2, 3), (1, 3), (3, 3)):
            R = product(random_curvature(a, derive_seed(base, a, b, i, 0)), random_curvature(b, derive_seed(base, a, b, i, 1)))
            res.record("split_violation", R, {"k": a, "max_sum": -1e-8})
            res.record("split_identities", R, {"k": a})
    return res


def suite_kahler(seed: int, budget: int = 5000) -> SuiteResult:
    res = SuiteResult("kahler")
    base = derive_seed(seed, _STREAM["kahler"])
    for m in (2, 3):
        F = flat(2 * m)
        res.record("beta_inequality", F, {"beta": 2.0, "expect": "zero", "budget": budget, "seed": derive_seed(base, m, 0)},
                   highlight=f"flat({2 * m}) beta=2")
        res.record("kahler_identities", F, {"seed": derive_seed(base, m, 1), "expect_flat": True})
    for m in (2, 3):
        R = cpn(m)[0]
        for j, beta in enumerate((1.1, 1.5, 2.0)):
            res.record("beta_inequality", R, {"beta": beta, "expect": "violation", "budget": budget, "seed": derive_seed(base, m, 2, j)},
                       highlight=f"cpn({m}) beta={beta}")
        res.record("beta_inequality", R, {"beta": 1.0, "expect": "nonnegative", "budget": budget, "seed": derive_seed(base, m, 3)},
                   highlight=f"cpn({m}) beta=1")
        res.record("kahler_identities", R, {"seed": derive_seed(base, m, 4)}, highlight=f"cpn({m}) identities")
    cp1 = cpn(1)[0]
    res.record("kahler_identities", product(cp1, cp1), {"seed": derive_seed(base, 5)})
    res.record("not_kahler", random_curvature(4, derive_seed(base, 6)), {}, highlight="random(4) not Kähler")
    return res


def run_suite(suite_id: str, cfg: Config) -> SuiteResult:
    start = time.perf_counter()
    if suite_id == "lemma31":
        res = suite_lemma31(cfg.seed, cfg.trials)
    elif suite_id == "prop32":
        res = suite_prop32(cfg.seed, cfg.trials, cfg.min_yield, cfg.max_attempts)
    elif suite_id == "prop42":
        res = suite_prop42(cfg.seed, cfg.trials, cfg.dims, cfg.min_yield, cfg.max_attempts, inject=[
            f for f in cfg.inject if f.get("suite", "prop42") == "prop42"
        ])
    elif suite_id == "lemmas4x":
        res = suite_lemmas_4x(cfg.seed, cfg.frame_samples, cfg.budget, cfg.frame_dims, cfg.min_yield, cfg.max_attempts)
    elif suite_id == "prop51":
        res = suite_prop51(cfg.seed)
    elif suite_id == "kahler":
        res = suite_kahler(cfg.seed, cfg.budget)
    else:
        raise ValueError(f"unknown suite {suite_id!r}; expected one of {SUITES}")
    res.wall_time = time.perf_counter() - start
    return res


@dataclass
class VerificationReport:
    config: Config
    suites: list[SuiteResult]

    @property
    def status(self) -> str:
        if not self.suites:
            return "nothing-run"
        return "pass" if all(s.passed for s in self.suites) else "fail"

    @property
    def failure_count(self) -> int:
        return sum(len(s.failures) for s in self.suites)

    def to_dict(self, timing: bool = False) -> dict[str, Any]:
        return {
            "version": __version__,
            "status": self.status,
            "config": self.config.to_dict(),
            "suites": [s.to_dict(timing) for s in self.suites],
        }


def run_all(cfg: Config | dict | None = None) -> VerificationReport:
    """Run the configured suites; the report order follows :data:`SUITES`."""
    if cfg is None:
        cfg = Config()
    elif isinstance(cfg, dict):
        cfg = Config.from_dict(cfg)
    ids = [s for s in SUITES if s in cfg.suites]
    if cfg.threads > 1 and len(ids) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(lambda s: run_suite(s, cfg), ids))
    else:
        results = [run_suite(s, cfg) for s in ids]
    return VerificationReport(cfg, results)
