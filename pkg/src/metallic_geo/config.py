"""Loading and validating ``metallic-geo/1`` JSON configurations."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ambient import ProductSpaceForm, make_space
from .errors import ConfigError, GeometryError, ParseError
from .expr import evaluate, parse_expression
from .immersion import ImmersionSpec, make_immersion
from .inequalities import READINGS, THEOREMS
from .invariants import validate_tuple

SCHEMA = "metallic-geo/1"
THEOREM_ALIASES = {"mean-scalar": "mean_scalar", "shape-ricci": "shape_ricci", "chen-delta": "chen",
                   "delta": "chen", "ddvv": "wintgen"}


@dataclass(frozen=True)
class Numerics:
    seed: int = 42
    restarts: int = 64
    tol: float = 1e-7
    eq_tol: float = 1e-8
    reading: str = "outer"

    def to_dict(self) -> dict:
        return {"seed": self.seed, "restarts": self.restarts, "tol": self.tol,
                "eq_tol": self.eq_tol, "tr2_reading": self.reading}


@dataclass(frozen=True)
class Analysis:
    theorems: tuple[str, ...] = THEOREMS
    tuples: tuple[tuple[int, ...], ...] = ()
    k_values: tuple[int, ...] = ()
    u_values: tuple[float, ...] = ()
    D1: tuple | None = None
    D2: tuple | None = None


@dataclass(frozen=True)
class CaseConfig:
    name: str
    space: ProductSpaceForm
    immersion: ImmersionSpec
    points: np.ndarray
    analysis: Analysis
    numerics: Numerics
    raw: dict = field(default_factory=dict, repr=False, compare=False)

    def distribution_at(self, u) -> tuple:
        """D1, D2 basis vectors (u-coordinates) evaluated at ``u``."""
        def ev(block):
            if block is None:
                return None
            return [[float(evaluate(c, np.asarray(u, float), self.immersion.constants)) if not isinstance(c, float)
                     else c for c in vec] for vec in block]
        return ev(self.analysis.D1), ev(self.analysis.D2)


def _need(d: dict, key: str, path: str):
    if not isinstance(d, dict):
        raise ConfigError(path, "expected an object")
    if key not in d:
        raise ConfigError(f"{path}.{key}", "missing required field")
    return d[key]


def _int(v, path, lo=None):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(path, f"expected an integer, got {v!r}")
    if lo is not None and v < lo:
        raise ConfigError(path, f"must be >= {lo}, got {v}")
    return v


def _real(v, path, positive=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(path, f"expected a finite number, got {v!r}")
    if positive and v <= 0:
        raise ConfigError(path, f"must be positive, got {v}")
    return float(v)


def _space(d: dict, path: str) -> ProductSpaceForm:
    known = {"m1", "m2", "c1", "c2", "p", "q", "branch", "curv_sign", "realization"}
    for k in d:
        if k not in known:
            raise ConfigError(f"{path}.{k}", "unknown field")
    kw = {"m1": _int(_need(d, "m1", path), f"{path}.m1", 1), "m2": _int(_need(d, "m2", path), f"{path}.m2", 1)}
    for k in ("c1", "c2"):
        if k in d:
            kw[k] = _real(d[k], f"{path}.{k}")
    for k in ("p", "q"):
        if k in d:
            kw[k] = _int(d[k], f"{path}.{k}", 1)
    for k in ("branch", "curv_sign", "realization"):
        if k in d:
            kw[k] = d[k]
    try:
        return make_space(**kw)
    except GeometryError as e:
        raise ConfigError(path, str(e)) from None


def _grid(d, n: int, path: str) -> np.ndarray:
    if isinstance(d, list):
        d = {"points": d}
    if not isinstance(d, dict):
        raise ConfigError(path, "expected an object or a list of points")
    if "points" in d:
        pts = d["points"]
        if not isinstance(pts, list) or not pts:
            raise ConfigError(f"{path}.points", "grid must be a non-empty list of points")
        out = []
        for i, p in enumerate(pts):
            if not isinstance(p, list) or len(p) != n:
                raise ConfigError(f"{path}.points[{i}]", f"expected a list of {n} numbers")
            out.append([_real(x, f"{path}.points[{i}][{j}]") for j, x in enumerate(p)])
        return np.array(out)
    axes = []
    for k in range(1, n + 1):
        key = f"u{k}"
        ax = _need(d, key, path)
        if isinstance(ax, list):
            if not ax:
                raise ConfigError(f"{path}.{key}", "empty value list")
            axes.append([_real(x, f"{path}.{key}[{j}]") for j, x in enumerate(ax)])
            continue
        lo = _real(_need(ax, "min", f"{path}.{key}"), f"{path}.{key}.min")
        hi = _real(_need(ax, "max", f"{path}.{key}"), f"{path}.{key}.max")
        cnt = _int(_need(ax, "count", f"{path}.{key}"), f"{path}.{key}.count", 1)
        axes.append(np.linspace(lo, hi, cnt).tolist())
    return np.array(list(itertools.product(*axes)), dtype=float)


def _distribution(block, n, constants, path):
    if block is None:
        return None
    if not isinstance(block, list):
        raise ConfigError(path, "expected a list of vectors")
    out = []
    for i, vec in enumerate(block):
        if not isinstance(vec, list) or len(vec) != n:
            raise ConfigError(f"{path}[{i}]", f"expected a vector of {n} components")
        row = []
        for j, c in enumerate(vec):
            if isinstance(c, str):
                try:
                    row.append(parse_expression(c, n, constants))
                except ParseError as e:
                    raise ConfigError(f"{path}[{i}][{j}]", f"{e.reason} at column {e.column}") from None
            else:
                row.append(_real(c, f"{path}[{i}][{j}]"))
        out.append(tuple(row))
    return tuple(out)


def _analysis(d: dict, n: int, constants, path: str) -> Analysis:
    th = d.get("theorems", list(THEOREMS))
    if not isinstance(th, list):
        raise ConfigError(f"{path}.theorems", "expected a list")
    theorems = []
    for i, t in enumerate(th):
        t = THEOREM_ALIASES.get(t, t)
        if t not in THEOREMS:
            raise ConfigError(f"{path}.theorems[{i}]", f"unknown theorem {t!r}")
        theorems.append(t)
    tuples = []
    for i, tup in enumerate(d.get("tuples", [])):
        p = f"{path}.tuples[{i}]"
        if not isinstance(tup, list):
            raise ConfigError(p, "expected a list of integers")
        try:
            tuples.append(validate_tuple(n, [_int(m, f"{p}[{j}]") for j, m in enumerate(tup)]))
        except GeometryError as e:
            raise ConfigError(p, str(e)) from None
    ks = []
    for i, k in enumerate(d.get("k_values", [])):
        k = _int(k, f"{path}.k_values[{i}]")
        if not 2 <= k <= n:
            raise ConfigError(f"{path}.k_values[{i}]", f"k must satisfy 2 <= k <= n={n}")
        ks.append(k)
    us = []
    for i, u in enumerate(d.get("u_values", [])):
        u = _real(u, f"{path}.u_values[{i}]", positive=True)
        if abs(u - n * (n - 1)) < 1e-12:
            raise ConfigError(f"{path}.u_values[{i}]", f"u must differ from n(n-1)={n * (n - 1)}")
        us.append(u)
    dist = d.get("distributions") or {}
    if not isinstance(dist, dict):
        raise ConfigError(f"{path}.distributions", "expected an object with D1/D2")
    D1 = _distribution(dist.get("D1"), n, constants, f"{path}.distributions.D1")
    D2 = _distribution(dist.get("D2"), n, constants, f"{path}.distributions.D2")
    return Analysis(tuple(theorems), tuple(tuples), tuple(ks), tuple(us), D1, D2)


def _numerics(d: dict, path: str) -> Numerics:
    kw = {}
    if "seed" in d:
        kw["seed"] = _int(d["seed"], f"{path}.seed", 0)
    if "restarts" in d:
        kw["restarts"] = _int(d["restarts"], f"{path}.restarts", 1)
    tols = d.get("tolerances", {})
    for key in ("tol", "eq_tol"):
        src = d.get(key, tols.get(key) if isinstance(tols, dict) else None)
        if src is not None:
            kw[key] = _real(src, f"{path}.{key}", positive=True)
    if "tr2_reading" in d:
        if d["tr2_reading"] not in READINGS:
            raise ConfigError(f"{path}.tr2_reading", f"expected one of {READINGS}")
        kw["reading"] = d["tr2_reading"]
    return Numerics(**kw)


def parse_config(doc: dict) -> CaseConfig:
    if not isinstance(doc, dict):
        raise ConfigError("$", "configuration must be a JSON object")
    schema = doc.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise ConfigError("$.schema", f"unsupported schema {schema!r}, expected {SCHEMA!r}")
    space = _space(_need(doc, "space", "$"), "$.space")
    im = _need(doc, "immersion", "$")
    n = _int(_need(im, "n", "$.immersion"), "$.immersion.n", 1)
    coords = _need(im, "coords", "$.immersion")
    if not isinstance(coords, list) or not all(isinstance(c, str) for c in coords):
        raise ConfigError("$.immersion.coords", "expected a list of expression strings")
    constants = im.get("constants", {})
    if not isinstance(constants, dict):
        raise ConfigError("$.immersion.constants", "expected an object")
    constants = {k: _real(v, f"$.immersion.constants.{k}") for k, v in constants.items()}
    try:
        spec = make_immersion(space, n, coords, constants)
    except ParseError as e:
        raise ConfigError(f"$.immersion.coords[{e.line - 1}]", f"{e.reason} at column {e.column}") from None
    except GeometryError as e:
        raise ConfigError("$.immersion", str(e)) from None
    points = _grid(_need(doc, "grid", "$"), n, "$.grid")
    analysis = _analysis(doc.get("analysis", {}), n, constants, "$.analysis")
    numerics = _numerics(doc.get("numerics", {}), "$.numerics")
    return CaseConfig(str(doc.get("name", "")), space, spec, points, analysis, numerics, doc)


def load_config(path) -> CaseConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ConfigError(str(path), f"cannot read file: {e.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(str(path), f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    return parse_config(doc)
