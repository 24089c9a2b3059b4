import numpy as np
import pytest

from metallic_geo.ambient import (
    adapted_frame,
    ambient_curvature_metallic,
    ambient_curvature_product,
    check_point,
    curvature_tensor,
    make_space,
    metallic_structure_at,
    project_to_manifold_tangent,
    random_point,
)
from metallic_geo.errors import ArgumentError, DomainError, OffManifoldError, RealizationError

SPACES = [
    dict(m1=2, m2=2, c1=0, c2=0),
    dict(m1=2, m2=1, c1=1, c2=0),
    dict(m1=1, m2=2, c1=0, c2=0.25, p=2, q=3),
    dict(m1=2, m2=2, c1=1, c2=1),
    dict(m1=2, m2=3, c1=0.5, c2=2, p=3, q=1),
]


def test_flat_product_is_flat():
    s = make_space(2, 1)
    assert s.is_flat and s.dim == 3 and s.embed_dim == 3
    frame = adapted_frame(s, np.zeros(3))
    assert np.max(np.abs(curvature_tensor(s, frame))) == 0.0


def test_sphere_factor_realization():
    s = make_space(2, 1, c1=0.25)
    assert s.realization[0].radius == pytest.approx(2.0)
    assert s.embed_dim == 4
    with pytest.raises(OffManifoldError):
        check_point(s, [1.0, 0.0, 0.0, 0.0])


@pytest.mark.parametrize("kw", [dict(m1=0, m2=1), dict(m1=1, m2=1, c1=-1.0)])
def test_invalid_spaces(kw):
    with pytest.raises((DomainError, RealizationError)):
        make_space(**kw)


def test_realization_mismatch():
    with pytest.raises(RealizationError):
        make_space(2, 1, c1=1.0, realization=("flat", None))


@pytest.mark.parametrize("kw", SPACES)
@pytest.mark.parametrize("branch", ["first", "second"])
def test_metallic_structure_on_tangent_space(kw, branch):
    s = make_space(**kw, branch=branch)
    x = random_point(s, np.random.default_rng(1))
    phi = metallic_structure_at(s, x)
    p, q = s.params.p, s.params.q
    assert np.max(np.abs(phi @ phi - p * phi - q * np.eye(s.dim))) <= 1e-10
    assert np.max(np.abs(phi - phi.T)) <= 1e-12


@pytest.mark.parametrize("kw", SPACES)
@pytest.mark.parametrize("branch", ["first", "second"])
def test_curvature_forms_agree(kw, branch):
    s = make_space(**kw, branch=branch)
    rng = np.random.default_rng(7)
    x = random_point(s, rng)
    B = adapted_frame(s, x)
    for _ in range(20):
        X, Y, Z = (project_to_manifold_tangent(s, x, B @ rng.standard_normal(s.dim)) for _ in range(3))
        a = ambient_curvature_product(s, X, Y, Z).vec
        b = ambient_curvature_metallic(s, X, Y, Z).vec
        assert np.max(np.abs(a - b)) <= 1e-9


def test_sign_matches_branch_and_wrong_sign_disagrees():
    for branch, expected in (("first", 1), ("second", -1)):
        s = make_space(2, 1, c1=1.0, branch=branch)
        assert s.matched_sign == expected and s.sign_source == "empirical"
        x = random_point(s, np.random.default_rng(3))
        B = adapted_frame(s, x)
        good = curvature_tensor(s, B)
        bad = curvature_tensor(s, B, sign=-expected)
        assert np.allclose(good, curvature_tensor(s, B, form="product"), atol=1e-12)
        assert np.max(np.abs(bad - good)) > 1e-3


def test_degenerate_sign_source():
    s = make_space(2, 2, c1=1, c2=1, branch="second")
    assert s.sign_source.startswith("degenerate")
    assert s.matched_sign == -1


def test_space_form_sectional_curvature():
    s = make_space(3, 1, c1=4.0)
    x = random_point(s, np.random.default_rng(0))
    B = adapted_frame(s, x)
    R = curvature_tensor(s, B)
    # both vectors in factor 1 of radius 1/2: K = 4; mixed planes are flat
    assert R[0, 1, 1, 0] == pytest.approx(4.0, abs=1e-12)
    assert R[0, 3, 3, 0] == pytest.approx(0.0, abs=1e-12)


def test_curvature_symmetries():
    s = make_space(2, 2, c1=0.5, c2=2.0, p=2, q=1)
    x = random_point(s, np.random.default_rng(4))
    V = adapted_frame(s, x) @ np.random.default_rng(5).standard_normal((s.dim, s.dim))
    R = curvature_tensor(s, V)
    assert np.allclose(R, -np.swapaxes(R, 0, 1), atol=1e-12)
    assert np.allclose(R, -np.swapaxes(R, 2, 3), atol=1e-12)
    assert np.allclose(R, np.transpose(R, (2, 3, 0, 1)), atol=1e-12)
    bianchi = R + np.transpose(R, (1, 2, 0, 3)) + np.transpose(R, (2, 0, 1, 3))
    assert np.max(np.abs(bianchi)) <= 1e-12


def test_mismatched_base_points():
    s = make_space(2, 1, c1=1.0)
    rng = np.random.default_rng(2)
    x, y = random_point(s, rng), random_point(s, rng)
    X = project_to_manifold_tangent(s, x, rng.standard_normal(4))
    Y = project_to_manifold_tangent(s, y, rng.standard_normal(4))
    with pytest.raises(ArgumentError):
        ambient_curvature_metallic(s, X, Y, X)
