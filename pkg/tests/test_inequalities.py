import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import example_bundle
from metallic_geo.ambient import make_space
from metallic_geo.errors import ArgumentError, ClassificationError
from metallic_geo.immersion import make_immersion, phi_decompose, point_data
from metallic_geo.inequalities import (
    AmbientConstants,
    THEOREMS,
    Traces,
    casorati_pattern,
    chen_pattern,
    classify,
    derivation_check,
    make_bundle,
    omega_constants,
    rhs_wintgen,
    shape_ricci_pattern,
    specialize,
    umbilical_pattern,
    verify_all,
    verify_casorati,
    verify_chen_delta,
    verify_mean_scalar,
    verify_shape_ricci,
    verify_wintgen,
    wintgen_pattern,
)
from metallic_geo.oracles import ddvv_component_check

KINDS = ("semi-slant", "hemi-slant", "semi-invariant", "slant")
ANGLES = {"semi-slant": lambda th: (0.0, th), "hemi-slant": lambda th: (th, math.pi / 2),
          "semi-invariant": lambda th: (0.0, math.pi / 2), "slant": lambda th: (th, th)}


def random_data(rng, kind):
    n = int(rng.integers(2, 7))
    d1 = int(rng.integers(1, n)) if kind != "slant" else int(rng.integers(0, n + 1))
    p, q = (int(v) for v in rng.integers(1, 6, size=2))
    k = AmbientConstants(n, p, q, math.sqrt(p * p + 4 * q), *rng.normal(size=2), sign=int(rng.choice([1, -1])))
    th = float(rng.uniform(0.05, 1.5))
    t1, t2 = ANGLES[kind](th)
    a, b = rng.normal(size=2) * 3
    a, b = (a if d1 else 0.0), (b if n - d1 else 0.0)
    t = Traces(a + b, (a + b) ** 2, abs(rng.normal()) * 5, a, b, d1, n - d1,
               math.cos(t1) ** 2, math.cos(t2) ** 2)
    tup = (2,) if n < 4 else (2, 2)
    inv = {"rho": rng.normal(), "rho_perp": abs(rng.normal()), "b": rng.normal(), "c": rng.normal(),
           "d": rng.normal(), "tuple": tup, "H_sq": abs(rng.normal()), "Omega_k": rng.normal(),
           "tau": rng.normal(), "delta_C": rng.normal()}
    return k, t, inv


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("theorem", THEOREMS)
@pytest.mark.parametrize("reading", ("outer", "square"))
def test_specialization_matches_table_rows(kind, theorem, reading):
    rng = np.random.default_rng([KINDS.index(kind), THEOREMS.index(theorem), len(reading)])
    for _ in range(50):
        k, t, inv = random_data(rng, kind)
        s = specialize(theorem, kind, k, t, reading, **inv)
        assert s.difference <= 1e-10 * max(1.0, abs(s.table_rhs))


def test_slant_block_reduces():
    rng = np.random.default_rng(0)
    k, t, inv = random_data(rng, "slant")
    th = math.acos(math.sqrt(t.cos2_1))
    assert sum(t.vartheta(k.p, k.q)) == pytest.approx(math.cos(th) ** 2 * (k.p * t.tr_T + k.n * k.q))


def test_specialize_rejects_wrong_type():
    rng = np.random.default_rng(1)
    k, t, inv = random_data(rng, "slant")
    t = Traces(t.tr_T, t.tr_T_outer, t.tr_T2, t.tr_TP1, t.tr_TP2, 1, 1, 0.3, 0.7)
    with pytest.raises(ClassificationError, match="theta1"):
        specialize("wintgen", "semi-invariant", k, t, **inv)
    with pytest.raises(ClassificationError):
        specialize("wintgen", "slant", k, t, **inv)
    with pytest.raises(ArgumentError):
        specialize("nonsense", "slant", k, Traces(0, 0, 0, 0, 0, 2, 0, 1.0, 1.0), **inv)


def test_omega_constants_recomputed():
    rng = np.random.default_rng(2)
    for _ in range(20):
        k, t, _ = random_data(rng, "slant")
        n, p, q, a, c1, c2, s = k.n, k.p, k.q, k.alpha, k.c1, k.c2, k.sign
        dm, dp = s * (c1 - c2), c1 + c2
        w1 = p * (n - 1) * dm / (2 * a) - (n - 1) * dp * (p * p + 2 * q) / (2 * a * a)
        w2 = (n - 1) / (2 * a * a) * (p * dp + a * dm)
        w3 = (p * dp - a * dm) / (2 * a * a)
        for reading, X in (("outer", t.tr_T**2), ("square", t.tr_T2)):
            w = n * w1 + ((n - 1) * w3 - w2) * t.tr_T - n * (n - 1) * dp / a**2 * X
            got = omega_constants(k, t, reading)
            assert got["omega"] == pytest.approx(w, rel=1e-12, abs=1e-12)
            assert (got["omega1"], got["omega2"], got["omega3"]) == pytest.approx((w1, w2, w3))


def test_rhs_is_pure():
    rng = np.random.default_rng(3)
    k, t, inv = random_data(rng, "slant")
    a = rhs_wintgen(k, t, "outer", inv["rho"], inv["rho_perp"])
    assert a == rhs_wintgen(k, t, "outer", inv["rho"], inv["rho_perp"])


# --- fixtures ----------------------------------------------------------------

def test_flat_plane_equality_everywhere():
    b = example_bundle("flat-invariant-plane")
    res = verify_all(b, k_values=[2], u_values=[1.0, 3.0])
    assert {r.theorem for r in res} == {"wintgen", "shape_ricci", "mean_scalar", "casorati"}
    for r in res:
        assert r.equality and r.holds
        assert r.equality_case.matches and r.equality_case.residual <= 1e-8


def test_flat_three_space_chen_equality():
    b = example_bundle("flat-invariant-3space")
    r = verify_chen_delta(b, (2,))
    assert r.equality and r.equality_case.residual <= 1e-8
    assert r.equality_case.params["nu"] == 0.0


def test_unit_sphere_values():
    b = example_bundle("sphere-in-flat")
    w = verify_wintgen(b)
    assert (w.lhs, w.rhs) == pytest.approx((1.0, 1.0)) and w.equality
    m = verify_mean_scalar(b)
    assert m.lhs == pytest.approx(2.0) and m.equality and m.equality_case.residual <= 1e-8
    c = verify_casorati(b, 1.0)
    assert c.slack == pytest.approx(0.5, abs=1e-9) and not c.equality
    assert verify_casorati(b, 3.0).slack == pytest.approx(1 / 6, abs=1e-9)
    s = verify_shape_ricci(b, 2)
    assert (s.lhs, s.rhs) == pytest.approx((4.0, 2.0))


def test_unit_three_sphere_values():
    b = example_bundle("sphere3-in-flat")
    c = verify_chen_delta(b, (2,))
    assert c.lhs == pytest.approx(2.0) and c.details["c"] == 2.25
    assert c.slack == pytest.approx(0.25, abs=1e-9)
    s = verify_shape_ricci(b, 2)
    assert (s.lhs, s.rhs, s.slack) == pytest.approx((9.0, 6.0, 3.0))


def test_both_signs_reported_when_curvatures_differ():
    b = example_bundle("slant-sphere-product")
    assert set(verify_mean_scalar(b).variants) == {"outer/+", "outer/-", "square/+", "square/-"}
    b = example_bundle("sphere-times-sphere")
    assert set(verify_mean_scalar(b).variants) == {"outer/+", "square/+"}


def test_derivation_check_single_match():
    for name in ("sphere-factor", "sphere-second-factor", "slant-sphere-product"):
        d = derivation_check(example_bundle(name))
        assert d["matched"] == ["square/+"], name
        assert d["direct_ambient_residual"] <= 1e-9
    d = derivation_check(example_bundle("sphere-times-sphere"))
    assert d["matched"] == [] and d["direct_ambient_residual"] <= 1e-9
    assert d["combinations"]["outer/+"]["residual"] == pytest.approx(0.4, abs=1e-9)


def test_documented_falsifications():
    r = verify_shape_ricci(example_bundle("sphere-second-factor", reading="square"), 2)
    assert not r.holds
    assert r.slack == pytest.approx((1 - math.sqrt(5)) / 5, abs=1e-9)
    assert r.variants["outer/+"] > 0
    w = verify_wintgen(example_bundle("slant-sphere-product", reading="square"))
    assert not w.holds and w.slack == pytest.approx(-0.8, abs=1e-9)


# --- equality patterns ---------------------------------------------------------

def test_zero_shape_operators_match_every_pattern():
    h = np.zeros((2, 3, 3))
    for pat in (umbilical_pattern(h), casorati_pattern(h, 1.0), wintgen_pattern(h),
                chen_pattern(h, (2,), np.eye(3)), shape_ricci_pattern(h)):
        assert pat.matches and pat.residual == 0.0


def test_casorati_pattern_construction():
    a = 0.7
    h = np.array([np.diag([a, 2 * a]), np.zeros((2, 2))])
    pat = casorati_pattern(h, 1.0)
    assert pat.residual <= 1e-12 and pat.params["a"] == pytest.approx(a)
    assert not casorati_pattern(np.array([np.eye(2)]), 1.0).matches


def test_wintgen_pattern_pair_and_ddvv():
    h = np.array([[[0.0, 1.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, -1.0]]])
    pat = wintgen_pattern(h)
    assert pat.residual <= 1e-12 and pat.params["beta"] == pytest.approx(1.0)
    assert ddvv_component_check(h).slack == pytest.approx(0.0, abs=1e-12)
    rot = np.linalg.qr(np.random.default_rng(0).normal(size=(2, 2)))[0]
    h2 = np.einsum("ia,sij,jb->sab", rot, h, rot) + 0.3 * np.eye(2)
    assert wintgen_pattern(h2).residual <= 1e-12
    assert not wintgen_pattern(np.array([np.diag([1.0, 2.0, 4.0])])).matches


def test_chen_pattern_block_structure():
    h = np.zeros((1, 3, 3))
    h[0] = np.diag([1.0, 1.0, 2.0])
    assert chen_pattern(h, (2,), np.eye(3)).matches
    h[0, 0, 2] = h[0, 2, 0] = 0.5
    assert not chen_pattern(h, (2,), np.eye(3)).matches


def test_shape_ricci_pattern_normals_orthogonal_to_H():
    h = np.array([np.eye(2), np.zeros((2, 2))])
    assert shape_ricci_pattern(h).matches
    h[1] = [[0.0, 1.0], [1.0, 0.0]]
    assert not shape_ricci_pattern(h).matches


# --- property suites on flat ambients ------------------------------------------

FLAT = make_space(m1=2, m2=2, p=1, q=1)
BISLANT = make_immersion(FLAT, 2, ["u1 + 0.2*u2^2", "0.5*u2 + 0.1*u1^2", "0.6*u1 + 0.3*u1*u2", "1.2*u2 - 0.2*u1^2"])


def bislant_bundle(u):
    """Split along the eigenlines of T, so each line is preserved by T."""
    pd = point_data(BISLANT, u)
    V = np.linalg.eigh(phi_decompose(pd).T)[1]
    return make_bundle(pd, [V[:, 0]], [V[:, 1]], coords="frame")


def test_random_bislant_surface_wintgen():
    rng = np.random.default_rng(4)
    for u in rng.uniform(-0.6, 0.6, size=(100, 2)):
        b = bislant_bundle(u)
        assert b.slant.is_bislant
        assert verify_wintgen(b).slack >= -1e-8


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0, 3.5])
def test_umbilical_family(r):
    sp = make_space(m1=3, m2=1)
    spec = make_immersion(sp, 2, ["r*sin(u1)*cos(u2)", "r*sin(u1)*sin(u2)", "r*cos(u1)", "0"], {"r": r})
    b = make_bundle(point_data(spec, [0.9, 0.2]))
    m = verify_mean_scalar(b)
    assert m.equality and m.equality_case.residual <= 1e-6


@pytest.mark.parametrize("axes", [(1.0, 2.0, 1.0), (0.5, 1.0, 3.0)])
def test_non_umbilical_strict(axes):
    sp = make_space(m1=3, m2=1)
    coords = [f"{axes[0]}*sin(u1)*cos(u2)", f"{axes[1]}*sin(u1)*sin(u2)", f"{axes[2]}*cos(u1)", "0"]
    b = make_bundle(point_data(make_immersion(sp, 2, coords), [0.9, 0.4]))
    m = verify_mean_scalar(b)
    assert m.slack > 1e-6 and m.equality_case.residual > 1e-6


def test_equality_implies_pattern_on_fixtures():
    for name in ("flat-invariant-plane", "flat-invariant-3space", "mixed-slant-plane", "sphere-in-flat",
                 "sphere-factor", "sphere-times-sphere", "torus-in-flat"):
        b = example_bundle(name, reading="square")
        n = b.pd.n
        for r in verify_all(b, tuples=[(2,)] if n == 3 else [], k_values=range(2, n + 1), u_values=[1.0]):
            if r.equality:
                assert r.equality_case.residual <= 1e-6, (name, r.theorem)


def test_classify_types():
    assert classify(example_bundle("torus-in-flat").slant) == "slant"
    assert classify(example_bundle("mixed-slant-plane").slant) == "slant"
    assert classify(bislant_bundle([0.0, 0.0]).slant) == "bi-slant"


@settings(max_examples=30, deadline=None)
@given(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
def test_flat_mean_scalar_property(u1, u2):
    b = bislant_bundle([u1, u2])
    assert verify_mean_scalar(b).slack >= -1e-9
