"""Built-in example immersions with their expected outcomes."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ArgumentError


@dataclass(frozen=True)
class Example:
    name: str
    summary: str
    space: dict
    n: int
    coords: tuple[str, ...]
    points: tuple[tuple[float, ...], ...]
    constants: dict = field(default_factory=dict)
    distributions: dict | None = None
    analysis: dict = field(default_factory=dict)
    highlights: tuple[str, ...] = ()

    def config(self) -> dict:
        """A complete configuration document for this example."""
        analysis = {"theorems": ["wintgen", "chen", "shape_ricci", "mean_scalar", "casorati"],
                    "tuples": [], "k_values": [], "u_values": [1.0]}
        analysis.update(self.analysis)
        if self.distributions is not None:
            analysis["distributions"] = self.distributions
        return {
            "schema": "metallic-geo/1",
            "name": self.name,
            "space": dict(self.space),
            "immersion": {"n": self.n, "coords": list(self.coords), "constants": dict(self.constants)},
            "grid": {"points": [list(p) for p in self.points]},
            "analysis": analysis,
        }

    def listing(self) -> dict:
        return {"name": self.name, "summary": self.summary, "n": self.n,
                "space": dict(self.space), "expected": list(self.highlights)}


_SPHERE2 = ("sin(u1)*cos(u2)", "sin(u1)*sin(u2)", "cos(u1)")
_SPHERE3 = ("sin(u1)*sin(u2)*cos(u3)", "sin(u1)*sin(u2)*sin(u3)", "sin(u1)*cos(u2)", "cos(u1)")

EXAMPLES: dict[str, Example] = {e.name: e for e in [
    Example(
        "flat-invariant-plane", "coordinate plane R^2 x {0} in flat R^2 x R^1",
        {"m1": 2, "m2": 1, "c1": 0, "c2": 0, "p": 1, "q": 1}, 2, ("u1", "u2", "0"),
        ((0.0, 0.0), (0.3, -1.2), (2.0, 0.5)),
        analysis={"k_values": [2], "u_values": [1.0, 3.0]},
        highlights=("all invariants 0", "equality in Wintgen, shape-Ricci, mean-scalar and Casorati",
                    "every equality pattern residual 0", "Chen delta not applicable (S(2) is empty)")),
    Example(
        "flat-invariant-3space", "coordinate 3-space in flat R^3 x R^1",
        {"m1": 3, "m2": 1, "c1": 0, "c2": 0, "p": 1, "q": 1}, 3, ("u1", "u2", "u3", "0"),
        ((0.0, 0.0, 0.0), (0.4, -0.3, 1.1)),
        analysis={"tuples": [[2]], "k_values": [2, 3], "u_values": [1.0]},
        highlights=("all invariants 0", "equality in all five theorems including Chen delta(2)",
                    "every equality pattern residual 0")),
    Example(
        "mixed-slant-plane", "plane spanned by (e1+e3)/sqrt2, (e2+e4)/sqrt2 in flat R^2 x R^2",
        {"m1": 2, "m2": 2, "c1": 0, "c2": 0, "p": 1, "q": 1}, 2,
        ("u1/sqrt(2)", "u2/sqrt(2)", "u1/sqrt(2)", "u2/sqrt(2)"),
        ((0.0, 0.0), (1.0, -0.5)),
        analysis={"k_values": [2], "u_values": [1.0]},
        highlights=("proper slant with cos^2(theta) = 1/6 (theta ~ 65.905 deg) at (p,q) = (1,1)",
                    "T = 0.5 I", "totally geodesic: equality in Wintgen, shape-Ricci, mean-scalar, Casorati")),
    Example(
        "circle", "circle of radius r in the first factor of flat R^2 x R^1",
        {"m1": 2, "m2": 1, "c1": 0, "c2": 0, "p": 1, "q": 1}, 1,
        ("r*cos(u1)", "r*sin(u1)", "0"), ((0.0,), (1.3,)), constants={"r": 2.0},
        analysis={"theorems": []},
        highlights=("|H| = 1/r = 0.5", "invariant curve (theta = 0)", "no theorem applies for n = 1")),
    Example(
        "torus-in-flat", "product of unit circles, one in each factor of flat R^2 x R^2",
        {"m1": 2, "m2": 2, "c1": 0, "c2": 0, "p": 1, "q": 1}, 2,
        ("cos(u1)", "sin(u1)", "cos(u2)", "sin(u2)"), ((0.0, 0.0), (0.7, 2.1)),
        distributions={"D1": [[1, 0]], "D2": [[0, 1]]},
        analysis={"k_values": [2], "u_values": [1.0]},
        highlights=("flat: tau = 0", "|H|^2 = 1/2", "invariant in both factors (theta1 = theta2 = 0)",
                    "strict Wintgen slack 1/2", "rho_perp = 0")),
    Example(
        "sphere-in-flat", "unit sphere S^2 in the R^3 factor of flat R^3 x R^1",
        {"m1": 3, "m2": 1, "c1": 0, "c2": 0, "p": 1, "q": 1}, 2,
        _SPHERE2 + ("0",), ((0.7, 0.3), (1.2, -2.0), (2.0, 1.0)),
        analysis={"k_values": [2], "u_values": [1.0, 3.0]},
        highlights=("tau = 1, |H|^2 = 1", "equality in Wintgen and mean-scalar (umbilical)",
                    "Casorati slack 0.5 at u = 1 and 1/6 at u = 3", "shape-Ricci slack 2 at k = 2")),
    Example(
        "sphere3-in-flat", "unit sphere S^3 in the R^4 factor of flat R^4 x R^1",
        {"m1": 4, "m2": 1, "c1": 0, "c2": 0, "p": 1, "q": 1}, 3,
        _SPHERE3 + ("0",), ((0.7, 0.9, 0.3), (1.1, 2.0, -0.4)),
        analysis={"tuples": [[2]], "k_values": [2, 3], "u_values": [1.0]},
        highlights=("tau = 3, |H|^2 = 1", "Chen delta(2) = 2 with slack 0.25 (c(2) = 9/4)",
                    "shape-Ricci slack 3", "equality in mean-scalar")),
    Example(
        "sphere-factor", "the whole first factor of S^2(1) x R^1 (invariant, totally geodesic)",
        {"m1": 2, "m2": 1, "c1": 1, "c2": 0, "p": 1, "q": 1}, 2,
        _SPHERE2 + ("0",), ((0.7, 0.3), (1.9, -1.0)),
        analysis={"k_values": [2], "u_values": [1.0]},
        highlights=("tau = 1 from the ambient curvature alone", "h = 0",
                    "check-derivation matches exactly one (reading, sign) combination")),
    Example(
        "sphere-second-factor", "the whole second factor of R^1 x S^2(1) (invariant, totally geodesic)",
        {"m1": 1, "m2": 2, "c1": 0, "c2": 1, "p": 1, "q": 1}, 2,
        ("0",) + _SPHERE2, ((0.7, 0.3),),
        analysis={"k_values": [2], "u_values": [1.0]},
        highlights=("tau = 1, h = 0", "closed form matches the direct Gauss sum for (tr(T^2), +)",
                    "shape-Ricci slack (1 - sqrt 5)/5 < 0 under those flags: falsification event",
                    "shape-Ricci holds under the (tr T)^2 reading")),
    Example(
        "sphere-times-sphere", "torus of great circles in S^2(1) x S^2(1)",
        {"m1": 2, "m2": 2, "c1": 1, "c2": 1, "p": 1, "q": 1}, 2,
        ("cos(u1)", "sin(u1)", "0", "cos(u2)", "sin(u2)", "0"), ((0.0, 0.0), (0.9, -0.4)),
        distributions={"D1": [[1, 0]], "D2": [[0, 1]]},
        analysis={"k_values": [2], "u_values": [1.0]},
        highlights=("totally geodesic and flat (tau = 0)", "invariant in both factors",
                    "c1 = c2 so the (c1 - c2) sign plays no role")),
    Example(
        "slant-sphere-product", "graph of the homothety S^2(1) -> S^2(1/2) inside S^2(1) x S^2(1/2)",
        {"m1": 2, "m2": 2, "c1": 1, "c2": 4, "p": 1, "q": 1}, 2,
        _SPHERE2 + tuple(f"0.5*{e}" for e in _SPHERE2), ((0.7, 0.3), (1.4, 2.2)),
        analysis={"k_values": [2], "u_values": [1.0]},
        highlights=("proper slant surface with T a multiple of I", "c1 != c2: both signs are reported",
                    "h = 0 but rho_perp = 0.8 from the ambient normal curvature",
                    "Wintgen slack -0.8 under (tr(T^2), +): falsification event")),
]}


def get_example(name: str) -> Example:
    try:
        return EXAMPLES[name]
    except KeyError:
        raise ArgumentError(f"unknown example {name!r}; known: {', '.join(sorted(EXAMPLES))}") from None


def listing() -> list[dict]:
    return [e.listing() for e in EXAMPLES.values()]
