import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metallic_geo.errors import ArgumentError
from metallic_geo.oracles import (
    chen_lemma_check,
    chen_lemma_suite,
    ddvv_component_check,
    ddvv_suite,
    lemma_epsilon,
)

reals = st.floats(-50, 50, allow_nan=False)


def test_ddvv_equality_configuration():
    r = ddvv_component_check([[[1.0, 0.0], [0.0, -1.0]], [[0.0, 1.0], [1.0, 0.0]]])
    assert r.slack == pytest.approx(0.0, abs=1e-12)
    assert r.lhs == pytest.approx(1.0) and r.commutator_term == pytest.approx(2.0)


def test_ddvv_single_normal_has_no_commutator():
    r = ddvv_component_check(np.diag([1.0, 2.0, 5.0]))
    assert r.commutator_term == 0.0
    assert r.slack >= 0


def test_ddvv_rejects_nonsymmetric():
    with pytest.raises(ArgumentError):
        ddvv_component_check([[[0.0, 1.0], [0.0, 0.0]]])


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.integers(1, 3))
def test_ddvv_random(seed, n, r):
    Z = np.random.default_rng(seed).standard_normal((r, n, n))
    assert ddvv_component_check(Z + Z.transpose(0, 2, 1)).slack >= -1e-9


@settings(max_examples=300, deadline=None)
@given(st.lists(reals, min_size=2, max_size=8))
def test_chen_lemma_random(a):
    a = np.array(a)
    res = chen_lemma_check(a, float(lemma_epsilon(a)))
    assert res.holds
    if res.equality and len(a) > 2:
        assert res.equality_criterion or abs(res.slack) > 0


def test_chen_lemma_equality_family():
    a = np.array([0.3, 1.7, 2.0, 2.0])
    res = chen_lemma_check(a, float(lemma_epsilon(a)))
    assert res.equality and res.equality_criterion


def test_chen_lemma_constraint_enforced():
    with pytest.raises(ArgumentError):
        chen_lemma_check([1.0, 2.0, 3.0], 0.0)


def test_suites_small():
    d = ddvv_suite(samples=5000, seed=1)
    assert d.samples == 5000 and d.violations == 0
    assert d.extra["equality_configuration_slack"] == pytest.approx(0.0, abs=1e-12)
    c = chen_lemma_suite(samples=20000, seed=1, equality_samples=200)
    assert c.violations == 0 and c.equality_criterion_failures == 0
    assert c.equality_hits == 200


def test_suites_deterministic():
    assert ddvv_suite(samples=2000, seed=3).to_dict() == ddvv_suite(samples=2000, seed=3).to_dict()
