"""``metallic-geo`` command line: invariants, verify, oracles, check-derivation, examples.

Exit status: 0 success, 1 falsification event, 2 configuration or
classification error, 3 numerical failure with no valid point.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from . import __version__
from .catalogue import get_example, listing
from .config import SCHEMA, THEOREM_ALIASES, CaseConfig, load_config, parse_config
from .errors import ArgumentError, ClassificationError, ConfigError, GeometryError
from .immersion import point_data, slant_analysis
from .inequalities import THEOREMS, PointBundle, classify, derivation_check, verify_all
from .invariants import extrinsic_normal_scalar_curvature
from .oracles import chen_lemma_suite, ddvv_suite

EXIT_OK, EXIT_FALSIFIED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
NUMERIC_ERRORS = (GeometryError, np.linalg.LinAlgError)


def clean(obj):
    """JSON-ready copy: numpy to builtins, non-finite floats to ``None``."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(report: dict) -> str:
    return json.dumps(clean(report), indent=2) + "\n"


def worker_count(jobs: int) -> int:
    cap = os.environ.get("METALLIC_GEO_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = max(1, int(cap))
        except ValueError:
            pass
    return max(1, min(n, jobs))


def _map_points(fn, cfg: CaseConfig) -> list[dict]:
    idx = list(range(len(cfg.points)))
    workers = worker_count(len(idx))
    if workers == 1:
        return [fn(i) for i in idx]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, idx))


def _flags(cfg: CaseConfig) -> dict:
    sp = cfg.space
    return {"tr2_reading": cfg.numerics.reading, "curv_sign": "+" if sp.curv_sign > 0 else "-",
            "curv_sign_matched": sp.sign_is_matched, "curv_sign_source": sp.sign_source,
            "ddvv_bracket": "squared", "d_i": "distribution dimensions"}


def _header(command: str, cfg: CaseConfig) -> dict:
    im = cfg.immersion
    return {
        "schema": SCHEMA, "command": command, "name": cfg.name,
        "space": cfg.space.to_dict(),
        "immersion": {"n": im.n, "coords": list(im.sources or ()), "constants": dict(im.constants)},
        "numerics": cfg.numerics.to_dict(), "flags": _flags(cfg),
    }


def _slant(cfg: CaseConfig, pd, u):
    D1, D2 = cfg.distribution_at(u)
    return slant_analysis(pd, D1, D2)


def _slant_block(s) -> dict:
    return {"type": classify(s), "bislant": s.is_bislant, "d1": s.d1, "d2": s.d2,
            "cos2_theta1": s.cos2_1, "cos2_theta2": s.cos2_2, "theta1": s.theta1, "theta2": s.theta2,
            "angle_dispersion": [s.angle_dev_1, s.angle_dev_2],
            "lemma_residual": [s.lemma_residual_1, s.lemma_residual_2],
            "vartheta": [s.vartheta1, s.vartheta2]}


def _point_block(cfg: CaseConfig, i: int) -> tuple[dict, PointBundle | None]:
    u = cfg.points[i]
    out = {"index": i, "u": u}
    try:
        pd = point_data(cfg.immersion, u)
    except NUMERIC_ERRORS as e:
        out.update(status="numerical_error", error=str(e))
        return out, None
    try:
        s = _slant(cfg, pd, u)
    except ArgumentError as e:
        out.update(status="classification_error", error=str(e))
        return out, None
    num = cfg.numerics
    b = PointBundle(pd, s, restarts=num.restarts, seed=num.seed, tol=num.tol, eq_tol=num.eq_tol,
                    reading=num.reading)
    inv = b.invariants.to_dict()
    if pd.n >= 2:
        inv["rho_perp_extrinsic"] = extrinsic_normal_scalar_curvature(pd)
    out.update(status="ok", invariants=inv, slant=_slant_block(s), traces=b.traces.to_dict())
    return out, b


def cmd_invariants(cfg: CaseConfig) -> tuple[dict, int]:
    pts = _map_points(lambda i: _point_block(cfg, i)[0], cfg)
    rep = _header("invariants", cfg)
    rep["points"] = pts
    ok = sum(p["status"] == "ok" for p in pts)
    rep["summary"] = {"points": len(pts), "valid_points": ok}
    return rep, EXIT_OK if ok else EXIT_NUMERIC


def cmd_verify(cfg: CaseConfig, theorems=None) -> tuple[dict, int]:
    a = cfg.analysis
    theorems = tuple(t for t in a.theorems if theorems is None or t in theorems)

    def run(i):
        blk, b = _point_block(cfg, i)
        if b is None:
            return blk
        if not b.slant.is_bislant:
            blk.update(status="classification_error",
                       error=str(ClassificationError("supplied distributions are not slant at this point")))
            return blk
        try:
            res = verify_all(b, theorems, a.tuples, a.k_values, a.u_values)
        except NUMERIC_ERRORS as e:
            blk.update(status="numerical_error", error=str(e))
            return blk
        blk["results"] = [r.to_dict() for r in res]
        return blk

    pts = _map_points(run, cfg)
    worst, events = {}, []
    for p in pts:
        for r in p.get("results", []):
            key = r["theorem"] + "".join(f"/{k}={v}" for k, v in r["params"].items())
            worst[key] = min(worst.get(key, math.inf), r["slack"])
            if not r["holds"]:
                events.append({"point": p["index"], "u": p["u"], "theorem": r["theorem"], "params": r["params"],
                               "slack": r["slack"], "lhs": r["lhs"], "rhs": r["rhs"], "flags": r["flags"],
                               "variants": r["variants"]})
    rep = _header("verify", cfg)
    rep["theorems"] = list(theorems)
    rep["points"] = pts
    statuses = [p["status"] for p in pts]
    rep["summary"] = {"points": len(pts), "valid_points": statuses.count("ok"),
                      "worst_slack": worst, "falsifications": events}
    if "classification_error" in statuses:
        code = EXIT_CONFIG
    elif events:
        code = EXIT_FALSIFIED
    elif "ok" not in statuses:
        code = EXIT_NUMERIC
    else:
        code = EXIT_OK
    return rep, code


def cmd_check_derivation(cfg: CaseConfig) -> tuple[dict, int]:
    def run(i):
        blk, b = _point_block(cfg, i)
        if b is not None:
            if b.pd.n < 2:
                blk.update(status="skipped", error="n = 1 has no scalar curvature")
            else:
                blk["derivation"] = derivation_check(b)
        return blk

    pts = _map_points(run, cfg)
    matched = None
    for p in pts:
        if "derivation" in p:
            m = set(p["derivation"]["matched"])
            matched = m if matched is None else matched & m
    rep = _header("check-derivation", cfg)
    rep["points"] = pts
    rep["summary"] = {"points": len(pts), "matched_everywhere": sorted(matched or [])}
    return rep, EXIT_OK if matched is not None else EXIT_NUMERIC


def cmd_oracles(seed: int = 42, ddvv_samples: int = 100_000, lemma_samples: int = 1_000_000) -> tuple[dict, int]:
    d = ddvv_suite(samples=ddvv_samples, seed=seed)
    c = chen_lemma_suite(samples=lemma_samples, seed=seed)
    rep = {"schema": SCHEMA, "command": "oracles", "seed": seed,
           "flags": {"ddvv_bracket": "squared"}, "suites": [d.to_dict(), c.to_dict()]}
    bad = d.violations or c.violations or c.equality_criterion_failures
    return rep, EXIT_FALSIFIED if bad else EXIT_OK


def cmd_examples() -> tuple[dict, int]:
    return {"schema": SCHEMA, "command": "examples", "examples": listing()}, EXIT_OK


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="metallic-geo", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            src = p.add_mutually_exclusive_group(required=True)
            src.add_argument("--config", metavar="PATH", help="JSON case configuration")
            src.add_argument("--example", metavar="NAME", help="built-in example (see 'examples')")
        p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
        p.add_argument("--seed", type=int, default=None, help="RNG seed (default 42)")
        if config:
            p.add_argument("--restarts", type=int, default=None, help="optimizer restarts (default 64)")
            p.add_argument("--tol", type=float, default=None, help="slack tolerance (default 1e-7)")
            p.add_argument("--reading", choices=("outer", "square"), default=None,
                           help="reading of the squared trace: (tr T)^2 or tr(T^2)")

    common(sub.add_parser("invariants", help="curvature invariants at each grid point"))
    v = sub.add_parser("verify", help="verify the theorems at each grid point")
    common(v)
    v.add_argument("--ineq", metavar="LIST", help="comma-separated theorem selector")
    common(sub.add_parser("check-derivation", help="closed-form assembly of 2 tau vs direct Gauss sum"))
    o = sub.add_parser("oracles", help="randomized Chen-lemma and DDVV suites")
    common(o, config=False)
    o.add_argument("--ddvv-samples", type=int, default=100_000)
    o.add_argument("--lemma-samples", type=int, default=1_000_000)
    e = sub.add_parser("examples", help="list the built-in examples")
    e.add_argument("--out", metavar="PATH")
    return ap


def _load(args) -> CaseConfig:
    cfg = load_config(args.config) if args.config else parse_config(get_example(args.example).config())
    num = cfg.numerics
    if args.seed is not None:
        num = replace(num, seed=args.seed)
    if args.restarts is not None:
        if args.restarts < 1:
            raise ConfigError("--restarts", "must be >= 1")
        num = replace(num, restarts=args.restarts)
    if args.tol is not None:
        if not args.tol > 0:
            raise ConfigError("--tol", "must be positive")
        num = replace(num, tol=args.tol)
    if args.reading is not None:
        num = replace(num, reading=args.reading)
    return replace(cfg, numerics=num)


def _selector(text: str | None):
    if not text:
        return None
    out = []
    for t in text.split(","):
        t = THEOREM_ALIASES.get(t.strip(), t.strip())
        if t not in THEOREMS:
            raise ConfigError("--ineq", f"unknown theorem {t!r}; choose from {', '.join(THEOREMS)}")
        out.append(t)
    return tuple(out)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "examples":
            rep, code = cmd_examples()
        elif args.command == "oracles":
            rep, code = cmd_oracles(42 if args.seed is None else args.seed, args.ddvv_samples, args.lemma_samples)
        else:
            cfg = _load(args)
            if args.command == "invariants":
                rep, code = cmd_invariants(cfg)
            elif args.command == "verify":
                rep, code = cmd_verify(cfg, _selector(args.ineq))
            else:
                rep, code = cmd_check_derivation(cfg)
    except GeometryError as e:
        print(f"metallic-geo: error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    text = dumps(rep)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
