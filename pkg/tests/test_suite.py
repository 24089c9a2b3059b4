import math

import numpy as np
import pytest

from metallic_geo.ambient import make_space
from metallic_geo.immersion import make_immersion, point_data, slant_analysis
from metallic_geo.inequalities import classify
from metallic_geo.suite import AMBIENTS, CLASSES, make_case, run_case, suite_cases, summarize


def test_suite_shape():
    cases = suite_cases()
    assert len(cases) == 240
    assert {c.ambient for c in cases} == set(AMBIENTS)
    assert {c.kind for c in cases} == set(CLASSES)
    assert {c.n for c in cases} == {2, 3, 4}
    assert suite_cases(per_cell=1, seed=3) == suite_cases(per_cell=1, seed=3)


EXPECTED = {"invariant": {"slant", "semi-invariant"}, "anti-invariant": {"slant"},
            "proper-slant": {"slant"}, "bi-slant": {"bi-slant"}}


@pytest.mark.parametrize("kind", CLASSES)
@pytest.mark.parametrize("ambient", AMBIENTS)
def test_designed_class_is_realized(kind, ambient):
    rng = np.random.default_rng([CLASSES.index(kind), AMBIENTS.index(ambient)])
    for n in (2, 3):
        c = make_case(ambient, kind, n, rng)
        spec = make_immersion(make_space(**c.space), n, list(c.coords))
        pd = point_data(spec, np.zeros(n))
        s = slant_analysis(pd, c.D1, c.D2 or None)
        assert s.is_bislant
        assert classify(s) in EXPECTED[kind]
        if kind == "anti-invariant":
            assert s.theta1 == pytest.approx(math.pi / 2, abs=1e-6)


def test_run_case_and_summary():
    rng = np.random.default_rng(0)
    out = [run_case(make_case("flat-flat", "bi-slant", 2, rng), restarts=16),
           run_case(make_case("flat-flat", "proper-slant", 3, rng), restarts=16)]
    assert all(o.classified for o in out)
    s = summarize(out)
    assert s["cases"] == 2 and s["verdicts"] == sum(len(o.results) for o in out)
    # flat ambients: every theorem reduces to its Euclidean form
    assert s["falsifications"] == []
    assert all(v >= -1e-7 for v in s["worst_slack"].values())
