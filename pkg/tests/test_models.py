import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvlab._rng import derive_seed, gaussians, uniforms
from curvlab.conditions import kahler_symmetry_residual
from curvlab.curvature import ricci, scalar, second_kind_spectrum
from curvlab.models import (
    ComplexStructure,
    ModelSpec,
    cpn,
    cylinder,
    flat,
    mixed,
    product,
    random_candidate,
    random_curvature,
    random_filtered,
    sphere,
    standard_complex_structure,
)


def _clusters(R):
    return [(round(v, 8), k) for v, k in second_kind_spectrum(R).clusters()]


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_cylinder_spectrum(n):
    expected = [(round(-(n - 2) / n, 8), 1), (0.0, n - 1), (1.0, (n - 2) * (n + 1) // 2)]
    assert _clusters(cylinder(n)) == expected


def test_cylinder_is_sphere_times_line():
    assert cylinder(4).equals(product(sphere(3), flat(1)))
    with pytest.raises(ValueError):
        cylinder(2)


@pytest.mark.parametrize("m,neg,pos", [(2, 3, 6), (3, 8, 12)])
def test_cpn_spectrum(m, neg, pos):
    R, J = cpn(m)
    assert _clusters(R) == [(-2.0, neg), (4.0, pos)]
    assert np.allclose(ricci(R), 2 * (m + 1) * np.eye(2 * m))
    assert kahler_symmetry_residual(R, J) <= 1e-15


def test_cpn_holomorphic_sectional_curvature():
    R, J = cpn(2)
    x = np.random.default_rng(1).standard_normal(4)
    x /= np.linalg.norm(x)
    assert R(x, J.J @ x, x, J.J @ x) == pytest.approx(4.0)


def test_product_spectrum_s2xs2():
    assert _clusters(product(sphere(2), sphere(2))) == [(-1.0, 1), (0.0, 4), (1.0, 4)]


def test_product_blocks():
    R = product(sphere(2, 3.0), sphere(3, -1.0))
    c = R.components
    assert c[0, 1, 0, 1] == 3.0
    assert c[2, 3, 2, 3] == -1.0
    assert c[0, 2, 0, 2] == 0.0
    assert scalar(R) == pytest.approx(2 * 3.0 - 6.0)


def test_complex_structure_validation():
    with pytest.raises(ValueError):
        ComplexStructure(np.eye(2))
    with pytest.raises(ValueError):
        ComplexStructure(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        ComplexStructure(2.0 * standard_complex_structure(1).J)
    assert standard_complex_structure(3).m == 3


def test_rng_streams():
    assert derive_seed(5, 1) == derive_seed(5, 1)
    assert derive_seed(5, 1) != derive_seed(5, 2)
    assert 0 <= derive_seed(1, 2, 3) < 2**32
    assert np.array_equal(uniforms(9, 4), uniforms(9, 8)[:4])
    g = gaussians(3, (4000,))
    assert abs(g.mean()) < 0.1 and abs(g.std() - 1.0) < 0.1


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_random_rebuilds_from_origin(n, seed):
    R = random_curvature(n, seed)
    rebuilt = ModelSpec.from_dict(R.origin).build()
    assert rebuilt.lambda2.tobytes() == R.lambda2.tobytes()


def test_random_is_seeded():
    a, b = random_curvature(5, 7), random_curvature(5, 7)
    assert a.lambda2.tobytes() == b.lambda2.tobytes()
    assert not random_curvature(5, 8).equals(a)


def test_candidates_alternate():
    pure = random_candidate(4, 1, 0)
    assert "sphere_weight" not in pure.origin["params"]
    blended = random_candidate(4, 1, 1)
    w = blended.origin["params"]["sphere_weight"]
    assert 0.0 <= w < 1.0
    assert ModelSpec.from_dict(blended.origin).build().equals(blended)


def test_mixed_shifts_spectrum():
    base = second_kind_spectrum(random_curvature(4, 3)).eigenvalues
    shifted = second_kind_spectrum(mixed(4, 3, 0.5)).eigenvalues
    assert np.allclose(shifted, 0.5 * base + 0.5, atol=1e-12)


def test_random_filtered():
    hit = random_filtered(4, 2, lambda R: second_kind_spectrum(R).eigenvalues[0] > 0, max_attempts=400)
    assert hit is not None
    assert second_kind_spectrum(hit).eigenvalues[0] > 0
    assert random_filtered(4, 2, lambda R: False, max_attempts=5) is None


def test_model_spec_round_trip():
    spec = {"kind": "product", "params": {"left": {"kind": "sphere", "params": {"dim": 2, "kappa": 1.0}},
                                          "right": {"kind": "cpn", "params": {"m": 1}}}}
    R = ModelSpec.from_dict(spec).build()
    assert R.n == 4
    assert R.origin == spec


@pytest.mark.parametrize(
    "bad",
    [
        {"kind": "torus", "params": {}},
        {"kind": "sphere", "params": {}},
        {"kind": "sphere", "params": {"dim": 2.5}},
        {"kind": "cylinder", "params": {"dim": 2}},
        {"kind": "cpn", "params": {"m": 0}},
        {"params": {}},
    ],
)
def test_model_spec_errors(bad):
    with pytest.raises(ValueError):
        ModelSpec.from_dict(bad).build()
