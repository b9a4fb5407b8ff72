"""Acceptance criteria 1-13, one test each, with a PASS/FAIL line per criterion."""

import time

import numpy as np
import pytest

import oracles
from curvlab.cli import main
from curvlab.conditions import ConditionExpr, certify_min
from curvlab.curvature import (
    bianchi_project,
    from_components,
    scalar,
    second_kind_bilinear,
    second_kind_matrix,
    second_kind_spectrum,
)
from curvlab.harness import Config, run_all, suite_lemma31
from curvlab.io import dumps
from curvlab.models import cpn, cylinder, product, random_curvature, sphere
from curvlab.spaces import eigen_sym, traceless_basis


def _coords(n, mats):
    """Coordinates of symmetric matrices in the frozen traceless basis."""
    return np.einsum("aij,bij->ba", traceless_basis(n), np.array(mats))


def _projector(cols):
    q, _ = np.linalg.qr(np.atleast_2d(cols).T if np.ndim(cols) == 1 else cols.T)
    return q @ q.T


@pytest.fixture(scope="module")
def verify_runs(tmp_path_factory):
    """Full default verification twice: in process (timed), then through the CLI."""
    start = time.perf_counter()
    report = run_all(Config(seed=42))
    first = time.perf_counter() - start
    out = tmp_path_factory.mktemp("verify") / "report.json"
    start = time.perf_counter()
    code = main(["verify", "--suite", "all", "--seed", "42", "--out", str(out), "--json"])
    second = time.perf_counter() - start
    return {
        "report": report,
        "suites": {s.id: s for s in report.suites},
        "bytes_in_process": (dumps(report.to_dict()) + "\n").encode(),
        "bytes_cli": out.read_bytes(),
        "cli_code": code,
        "times": (first, second),
    }


def test_criterion_01_sphere_spectrum(criterion):
    eigen_sym(np.eye(2))  # load the compiled eigensolver outside the timed region
    start = time.perf_counter()
    worst = max(np.abs(second_kind_spectrum(sphere(n)).eigenvalues - 1).max() for n in (3, 4, 5, 6))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 1.0
    assert criterion(1, "sphere(n) restricted spectrum is identity", ok, f"max err {worst:.1e}, {elapsed:.3f}s")


def test_criterion_02_cpn_spectrum(criterion):
    start = time.perf_counter()
    ok, worst = True, 0.0
    for m, neg, pos in ((2, 3, 6), (3, 8, 12)):
        spec = second_kind_spectrum(cpn(m)[0])
        expected = np.r_[np.full(neg, -2.0), np.full(pos, 4.0)]
        worst = max(worst, np.abs(spec.eigenvalues - expected).max())
        mults = [k for _, k in spec.clusters(1e-6)]
        ok &= mults == [neg, pos]
    elapsed = time.perf_counter() - start
    ok = ok and worst <= 1e-8 and elapsed < 5.0
    assert criterion(2, "cpn(2), cpn(3) spectra and multiplicities", ok, f"max err {worst:.1e}, {elapsed:.3f}s")


def test_criterion_03_cylinder_spectrum(criterion):
    ok, worst, align = True, 0.0, 1.0
    for n in (3, 4, 5, 6):
        spec = second_kind_spectrum(cylinder(n))
        expected = np.r_[-(n - 2) / n, np.zeros(n - 1), np.ones((n - 2) * (n + 1) // 2)]
        worst = max(worst, np.abs(spec.eigenvalues - expected).max())
        target = _coords(n, [np.diag(np.r_[np.ones(n - 1), -(n - 1.0)])])[0]
        cos = abs(spec.eigenvectors[:, 0] @ target) / np.linalg.norm(target)
        align = min(align, cos)
    ok = worst <= 1e-10 and align >= 1 - 1e-8
    assert criterion(3, "cylinder(n) spectrum and lambda_1 eigenvector", ok, f"max err {worst:.1e}, |cos| {align:.12f}")


def test_criterion_04_s2xs2(criterion):
    R = product(sphere(2), sphere(2))
    spec = second_kind_spectrum(R)
    expected = np.r_[-1.0, np.zeros(4), np.ones(4)]
    err = np.abs(spec.eigenvalues - expected).max()
    s6, s5 = spec.smallest_sum(6), spec.smallest_sum(5)
    e = np.eye(4)
    sp = oracles.sym_product
    spans = [
        [sp(e[0], e[0]) + sp(e[1], e[1]) - sp(e[2], e[2]) - sp(e[3], e[3])],
        [sp(e[0], e[2]), sp(e[0], e[3]), sp(e[1], e[2]), sp(e[1], e[3])],
        [sp(e[0], e[1]), sp(e[2], e[3]), sp(e[0], e[0]) - sp(e[1], e[1]), sp(e[2], e[2]) - sp(e[3], e[3])],
    ]
    blocks = [slice(0, 1), slice(1, 5), slice(5, 9)]
    gap = 0.0
    for span, block in zip(spans, blocks):
        listed = _projector(_coords(4, span))
        found = _projector(spec.eigenvectors[:, block].T)
        gap = max(gap, np.abs(listed - found).max())
    ok = err <= 1e-10 and abs(s6) <= 1e-10 and abs(s5 + 1) <= 1e-10 and gap <= 1e-10
    assert criterion(4, "S2xS2 spectrum, sums and eigenspaces", ok, f"k=6 {s6:.1e}, k=5 {s5:.12f}, span gap {gap:.1e}")


def test_criterion_05_trace_identities(criterion):
    worst = 0.0
    for n in (3, 4, 5, 6):
        for i in range(200):
            R = random_curvature(n, 5000 + 1000 * n + i)
            s = scalar(R)
            restricted = np.trace(second_kind_matrix(R, True))
            full = np.trace(second_kind_matrix(R, False))
            scale = max(abs(s), 1.0)
            worst = max(worst, abs(restricted - (n + 2) / (2 * n) * s) / scale, abs(full - s / 2) / scale)
    assert criterion(5, "trace identities on 800 random tensors", worst <= 1e-10, f"max rel err {worst:.1e}")


def test_criterion_06_five_identities(criterion):
    res = suite_lemma31(seed=31, trials=500)
    worst = 0.0
    for i in range(500):
        R = random_curvature(3, 90_000 + i)
        c = R.components
        e = np.eye(3)
        sp = oracles.sym_product
        r2, r6 = np.sqrt(2), np.sqrt(6)
        phis = [sp(e[0], e[1]) / r2, sp(e[0], e[2]) / r2, sp(e[1], e[2]) / r2,
                (sp(e[0], e[0]) - sp(e[1], e[1])) / (2 * r2),
                (sp(e[0], e[0]) + sp(e[1], e[1]) - 2 * sp(e[2], e[2])) / (2 * r6)]
        r12, r13, r23 = c[0, 1, 0, 1], c[0, 2, 0, 2], c[1, 2, 1, 2]
        want = [r12, r13, r23, r12, 2 / 3 * (r13 + r23) - r12 / 3]
        got = [second_kind_bilinear(R, p, p) for p in phis]
        worst = max(worst, max(abs(a - b) for a, b in zip(got, want)) / (1 + R.norm_inf))
    ok = res.passed and res.trials >= 500 and worst <= 1e-12
    assert criterion(6, "five identities on 500 random 3-dim tensors", ok, f"max rel err {worst:.1e}")


def test_criterion_07_ricci_bound(criterion, verify_runs):
    s = verify_runs["suites"]
    y32, y42 = s["prop32"].yields, s["prop42"].yields
    yields = [y32["n=3,k=3"]] + [y42[f"n={n},k={n}"] for n in (4, 5, 6)]
    bad = [f for suite in (s["prop32"], s["prop42"]) for f in suite.failures if f["check"] == "ricci_bound"]
    ok = not bad and min(yields) >= 20
    assert criterion(7, "Ric >= S/(n(n+1)) under k-nonnegativity", ok, f"yields {yields}, failures {len(bad)}")


def _frame_criterion(verify_runs, k, exprs):
    res = verify_runs["suites"]["lemmas4x"]
    cfg = verify_runs["report"].config
    yields = [res.yields[f"n={n},k={k}"] for n in (4, 5)]
    bad = [f for f in res.failures if f["input"]["params"]["expr"] in exprs]
    lows = [h["measured"]["best_value"] for h in res.highlights if h["passed"] and h["label"].split()[-1] in exprs]
    ok = not bad and min(yields) >= 20 and cfg.budget >= 5000 and res.wall_time < 120
    return ok, f"yields {yields}, budget {cfg.budget}, model min {min(lows):.3g}, suite {res.wall_time:.0f}s"


def test_criterion_08_three_nonneg_frames(criterion, verify_runs):
    ok, detail = _frame_criterion(verify_runs, 3, ("lemma43", "pic1"))
    assert criterion(8, "3-nonneg => lemma43, PIC1 frame values >= -1e-8", ok, detail)


def test_criterion_09_nonneg_frames(criterion, verify_runs):
    ok, detail = _frame_criterion(verify_runs, 1, ("lemma44", "pic2"))
    assert criterion(9, "nonneg => lemma44, PIC2 frame values >= -1e-8", ok, detail)


def test_criterion_10_product_sharpness(criterion, verify_runs):
    worst = -np.inf
    for a in range(1, 5):
        for b in range(max(a, 2), 5):
            n = a + b
            for ka, kb in ((1.0, 1.0), (0.5, 2.0), (2.0, 0.25)):
                R = product(sphere(a, ka), sphere(b, kb))
                worst = max(worst, second_kind_spectrum(R).smallest_sum(a * (n - a) + 1))
    cyl = second_kind_spectrum(cylinder(4)).smallest_sum(5)
    s2s2 = second_kind_spectrum(product(sphere(2), sphere(2))).smallest_sum(6)
    ok = worst <= -1e-6 and abs(cyl - 0.5) <= 1e-10 and abs(s2s2) <= 1e-10 and verify_runs["suites"]["prop51"].passed
    assert criterion(10, "products violate (k(n-k)+1)-nonnegativity; sharpness", ok,
                     f"worst sum {worst:.3g}, cylinder {cyl:.12f}, S2xS2 {s2s2:.1e}")


def test_criterion_11_kahler(criterion):
    R = cpn(2)[0]
    beta = certify_min(R, ConditionExpr("beta", beta=1.5), budget=5000, seed=11)
    iso = certify_min(R, ConditionExpr("pic"), budget=5000, seed=11)
    frame = np.array(beta.frame)
    ok = beta.best_value < -0.05 and iso.best_value >= -1e-6 and np.allclose(frame.T @ frame, np.eye(4), atol=1e-12)
    assert criterion(11, "cpn(2) violates beta=1.5, satisfies beta=1", ok,
                     f"beta=1.5 {beta.best_value:.6g}, beta=1 {iso.best_value:.1e}")


def test_criterion_12_bianchi_projection(criterion):
    idem = orth = agree = 0.0
    rng = np.random.default_rng(12)
    for n in (3, 4, 5):
        for _ in range(200):
            raw = oracles.random_components(n, rng)
            P = bianchi_project(from_components(raw))
            scale = np.sum(raw * raw)
            idem = max(idem, np.abs(bianchi_project(P).lambda2 - P.lambda2).max() / (1 + P.norm_inf))
            orth = max(orth, abs(np.sum((raw - P.components) * P.components)) / scale)
            agree = max(agree, np.abs(P.components - oracles.lstsq_project(raw)).max())
    ok = idem <= 1e-12 and orth <= 1e-12 and agree <= 1e-10
    assert criterion(12, "Bianchi projection idempotent, orthogonal, matches lstsq", ok,
                     f"idem {idem:.1e}, orth {orth:.1e}, lstsq {agree:.1e}")


def test_criterion_13_determinism(criterion, verify_runs):
    same = verify_runs["bytes_in_process"] == verify_runs["bytes_cli"]
    first, second = verify_runs["times"]
    ok = same and verify_runs["report"].status == "pass" and verify_runs["cli_code"] == 0 and max(first, second) < 300
    assert criterion(13, "verify --suite all --seed 42 is byte-identical and passes", ok,
                     f"identical={same}, runs {first:.0f}s / {second:.0f}s")
