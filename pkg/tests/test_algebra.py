import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metallic_geo.algebra import (
    InnerProduct,
    check_metallic,
    metallic_constants,
    metallic_from_product,
    orthonormalize,
    product_from_metallic,
)
from metallic_geo.errors import DegenerateBasisError, DomainError, InvalidStructureError


def random_product_structure(rng, dim):
    """A g-symmetric F with F^2 = I for a random SPD g."""
    L = rng.standard_normal((dim, dim))
    g = L @ L.T + dim * np.eye(dim)
    B = orthonormalize(list(np.eye(dim)), InnerProduct(g))
    signs = rng.choice([-1.0, 1.0], size=dim)
    F = B @ np.diag(signs) @ B.T @ g  # B^{-1} = B^T g
    return F, InnerProduct(g)


def test_golden_and_silver_means():
    gold = metallic_constants(1, 1)
    assert gold.sigma == pytest.approx((1 + np.sqrt(5)) / 2, abs=1e-15)
    silver = metallic_constants(2, 1)
    assert silver.sigma == pytest.approx(1 + np.sqrt(2), abs=1e-15)
    assert metallic_constants(3, 2).alpha == pytest.approx(np.sqrt(17), abs=1e-15)


@pytest.mark.parametrize("p,q", [(0, 1), (1, 0), (-1, 2), (1.5, 1), (True, 1)])
def test_constants_reject_bad_domain(p, q):
    with pytest.raises(DomainError):
        metallic_constants(p, q)


@given(st.integers(1, 50), st.integers(1, 50))
def test_constants_residuals(p, q):
    prm = metallic_constants(p, q)
    r1, r2 = prm.residuals()
    assert r1 <= 1e-14 and r2 <= 1e-14
    assert prm.sigma * prm.conjugate == pytest.approx(-q, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(1, 8), st.integers(0, 2**31 - 1))
def test_both_branches_are_metallic_and_round_trip(p, q, dim, seed):
    rng = np.random.default_rng(seed)
    prm = metallic_constants(p, q)
    F, g = random_product_structure(rng, dim)
    for branch, sign in (("first", "+"), ("second", "-")):
        phi = metallic_from_product(F, prm, branch, g)
        chk = check_metallic(phi, g, prm, tol=1e-10)
        assert chk.ok, chk
        back = product_from_metallic(phi, prm, sign)
        assert np.max(np.abs(back - F)) <= 1e-10


def test_non_involution_rejected():
    prm = metallic_constants(1, 1)
    with pytest.raises(InvalidStructureError):
        metallic_from_product(np.diag([1.0, 0.5]), prm, "first")
    with pytest.raises(InvalidStructureError):
        metallic_from_product(np.array([[0.0, 2.0], [0.5, 0.0]]), prm, "first")


def test_non_metallic_rejected():
    with pytest.raises(InvalidStructureError):
        product_from_metallic(np.eye(2), metallic_constants(1, 1))


def test_check_metallic_reports_residuals():
    prm = metallic_constants(1, 1)
    res = check_metallic(np.eye(2), None, prm)
    assert not res.ok
    assert res.polynomial_residual == pytest.approx(1.0)


def test_orthonormalize_in_custom_metric():
    g = InnerProduct(np.array([[2.0, 0.5], [0.5, 1.0]]))
    B = orthonormalize([[1.0, 0.0], [1.0, 1.0]], g)
    assert np.allclose(B.T @ g.gram @ B, np.eye(2), atol=1e-14)


def test_orthonormalize_degenerate():
    with pytest.raises(DegenerateBasisError):
        orthonormalize([[1.0, 0.0], [2.0, 0.0]])


def test_inner_product_validation():
    with pytest.raises(DomainError):
        InnerProduct(np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(DomainError):
        InnerProduct(np.array([[1.0, 0.1], [0.0, 1.0]]))
