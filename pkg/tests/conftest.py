import numpy as np
import pytest

from metallic_geo.ambient import make_space
from metallic_geo.catalogue import get_example
from metallic_geo.immersion import make_immersion, point_data, slant_analysis
from metallic_geo.inequalities import PointBundle


def example_spec(name):
    e = get_example(name)
    return make_immersion(make_space(**e.space), e.n, list(e.coords), e.constants)


def example_bundle(name, point=0, **kw):
    e = get_example(name)
    spec = example_spec(name)
    pd = point_data(spec, e.points[point])
    d = e.distributions or {}
    return PointBundle(pd, slant_analysis(pd, d.get("D1"), d.get("D2")), **kw)


RANDOM_IMMERSIONS = [
    (dict(m1=2, m2=2), 2, ["u1 + 0.3*u2^2", "u2 + 0.2*u1*u2", "0.5*u1^2 - u2^2", "sin(u1)*0.4 + 0.1*u2"]),
    (dict(m1=3, m2=1, c1=1.0, p=2, q=1),
     2, ["sin(u1)*cos(u2)", "sin(u1)*sin(u2)", "cos(u1)*cos(0.5*u2)", "cos(u1)*sin(0.5*u2)", "u1*u2"]),
    (dict(m1=2, m2=2, c1=1.0, c2=0.25, branch="second"),
     2, ["cos(u1)", "sin(u1)*cos(u2)", "sin(u1)*sin(u2)", "2*cos(u1 + u2)", "2*sin(u1 + u2)", "0"]),
    (dict(m1=2, m2=3, c2=1.0, p=1, q=2),
     3, ["u1 + u3^2", "u2*u1", "sin(u3)*cos(u1)", "sin(u3)*sin(u1)", "cos(u3)*cos(u2)", "cos(u3)*sin(u2)"]),
    (dict(m1=3, m2=2, p=3, q=2),
     3, ["u1", "u2 + u1*u3", "u3", "0.3*u1^2 + u2^2", "u1*u2*u3"]),
]


@pytest.fixture(params=range(len(RANDOM_IMMERSIONS)), ids=lambda i: f"imm{i}")
def random_immersion(request):
    kw, n, coords = RANDOM_IMMERSIONS[request.param]
    return make_immersion(make_space(**kw), n, coords)


def sample_points(spec, count, seed=0, scale=0.6, centre=0.7):
    rng = np.random.default_rng(seed)
    return centre + scale * rng.uniform(-1, 1, size=(count, spec.n))


ACCEPTANCE: dict[int, str] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    """Store and print the one-line verdict for an acceptance criterion."""
    line = f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[criterion] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
