"""Command-line front end.

Exit codes: 0 success, 2 parse error, 3 domain or geometry error,
4 no feasible disc, 5 nothing to compute.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .complex_core import Domain
from .errors import (
    DimensionError,
    DomainError,
    EmptyGridError,
    GeometryError,
    InvalidParameterError,
    ParseError,
)
from .green import (
    PoleConfiguration,
    green_bidisc_maxform,
    green_branches,
    green_function,
)
from .harness import counterexample_experiment
from .lelong import RadialScan, evaluate_scan, recenter, slice_scale
from .lempert import SolverConfig, lempert_bidisc_axis, lempert_subset_min
from .monge_ampere import DEFAULT_C, DEFAULT_H, GridRegion, ma_values, smooth_mask

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_INFEASIBLE, EXIT_EMPTY = 0, 2, 3, 4, 5
THREADS_ENV = "PLURIGREEN_THREADS"

_REAL = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(rf"^(?P<re>{_REAL})(?:(?P<sign>[+-])(?P<im>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)i)?$")


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def parse_complex(text: str) -> complex:
    """Parse ``<real>[+|-]<real>i`` (the imaginary part may be omitted)."""
    m = _COMPLEX.match(text.strip())
    if m is None:
        raise ParseError(f"bad complex literal {text!r}; expected e.g. 0.5-0.25i")
    re_part = float(m.group("re"))
    im_part = 0.0
    if m.group("im") is not None:
        im_part = float(m.group("im"))
        if m.group("sign") == "-":
            im_part = -im_part
    return complex(re_part, im_part)


def parse_point(text: str, n: int | None = None) -> np.ndarray:
    parts = text.split(",")
    z = np.array([parse_complex(p) for p in parts], dtype=complex)
    if n is not None and z.size != n:
        raise ParseError(f"point has {z.size} coordinates, domain needs {n}")
    return z


def config_from_dict(doc) -> PoleConfiguration:
    if not isinstance(doc, dict):
        raise ParseError("config must be a JSON object")
    try:
        kind = doc["domain"]
        n = int(doc.get("n", 2))
        poles = doc["poles"]
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"config missing or malformed field: {e}") from None
    if kind not in ("bidisc", "polydisc", "ball"):
        raise ParseError(f"unknown domain {kind!r}")
    if not isinstance(poles, list) or not poles:
        raise ParseError("config needs a non-empty 'poles' list")
    try:
        dom = Domain(kind, n)
        a = [complex(float(p["a_re"]), float(p.get("a_im", 0.0))) for p in poles]
        w = [float(p.get("weight", 1.0)) for p in poles]
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"malformed pole entry: {e}") from None
    if any(not (x > 0) for x in w):
        raise ParseError("pole weights must be positive")
    return PoleConfiguration.axis(a, w, dom)


def load_config(path: str) -> PoleConfiguration:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ParseError(f"cannot read config: {e}") from None
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed JSON in {path}: {e}") from None
    return config_from_dict(doc)


def fmt(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def _threads(args) -> int:
    if args.threads is not None:
        t = args.threads
    else:
        env = os.environ.get(THREADS_ENV, "1")
        try:
            t = int(env)
        except ValueError:
            raise ParseError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    if t < 1:
        raise ParseError("thread count must be >= 1")
    return t


def _grid(text: str):
    try:
        R, A = (int(x) for x in text.split(","))
    except ValueError:
        raise ParseError(f"--grid expects R,A integers, got {text!r}") from None
    return R, A


def _solver_config(args) -> SolverConfig:
    kw = {"seed": args.seed}
    if getattr(args, "grid", None):
        kw["n_radii"], kw["n_angles"] = _grid(args.grid)
    if getattr(args, "tol", None) is not None:
        kw["refine_tol"] = args.tol
    return SolverConfig(**kw)


# ---------------------------------------------------------------- commands

def cmd_eval(args, out) -> int:
    cfg = load_config(args.config)
    z = parse_point(args.point, cfg.domain.n)
    if args.form == "max":
        if cfg.domain.kind == "ball":
            raise ParseError("--form max applies to product domains only")
        v = green_bidisc_maxform(cfg, None, z)
    else:
        v = green_function(cfg, z)
    print(fmt(v), file=out)
    return EXIT_OK


def _parse_subset(text: str, k: int):
    if text == "all":
        return None
    try:
        idx = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ParseError(f"--subset expects 'all' or comma-separated indices, got {text!r}") from None
    if any(i < 0 or i >= k for i in idx):
        raise ParseError(f"subset indices must lie in 0..{k - 1}")
    return idx


def cmd_lempert(args, out) -> int:
    cfg = load_config(args.config)
    z = parse_point(args.point, cfg.domain.n)
    sc = _solver_config(args)
    subset = _parse_subset(args.subset, cfg.k)
    if subset is None:
        res = lempert_subset_min(z, cfg, None, sc, threads=_threads(args))
    else:
        res = lempert_bidisc_axis(z, cfg, None, subset, sc)
    if not res.feasible:
        raise _Exit(EXIT_INFEASIBLE, "no feasible disc at this resolution")
    print(fmt(res.value), file=out)
    print(json.dumps(res.to_dict(), indent=2, allow_nan=False), file=out)
    return EXIT_OK


def cmd_counterexample(args, out) -> int:
    a, b, g = (parse_complex(x) for x in (args.a, args.b, args.gamma))
    a, b, g = (x.real if x.imag == 0 else x for x in (a, b, g))
    sc = _solver_config(args)
    rep = counterexample_experiment(a, b, g, sc)
    text = rep.to_json() + "\n"
    if args.out == "-":
        out.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK


def _parse_region(text: str, step: float, exclusions) -> GridRegion:
    parts = text.split(",")
    if len(parts) != 6:
        raise ParseError("--region expects c1,c2,w1,w2,w3,w4")
    c = [parse_complex(p) for p in parts[:2]]
    try:
        w = [float(p) for p in parts[2:]]
    except ValueError:
        raise ParseError(f"bad half-widths in {text!r}") from None
    try:
        return GridRegion(np.array(c), tuple(w), step, exclusions)
    except InvalidParameterError as e:
        raise ParseError(str(e)) from None


def _scan_values(what, cfg, Z, h, threads):
    g = lambda P: green_function(cfg, P)  # noqa: E731
    if what == "green":
        return g(Z)
    if what == "ma":
        return ma_values(g, Z, h)
    dom = cfg.domain
    d0 = np.ones(dom.n, dtype=complex) / math.sqrt(dom.n)

    def one(p):
        z = d0 * slice_scale(dom, p, d0)
        scan = evaluate_scan(recenter(g, p), RadialScan.geometric(z, 0.999, 13, samples=64))
        return scan.values[-1]

    with ThreadPoolExecutor(max_workers=threads) as ex:
        return np.array(list(ex.map(one, Z)))


def cmd_scan(args, out) -> int:
    cfg = load_config(args.config)
    if cfg.domain.n != 2:
        raise ParseError("scan works on C^2 domains")
    if not args.step > 0:
        raise ParseError("--step must be positive")
    radius = args.exclude if args.exclude is not None else max(0.05, 2.5 * args.step)
    region = _parse_region(args.region, args.step, [(w, radius) for w in cfg.locations])
    region.check_in_domain(cfg.domain)
    h = args.h
    Z = region.points(cfg.domain, margin=3 * h)
    if args.what == "ma" and Z.shape[0] and cfg.domain.kind == "bidisc":
        Z = Z[smooth_mask(lambda P: green_branches(cfg, None, P), Z, h)]
    if Z.shape[0] == 0:
        raise _Exit(EXIT_EMPTY, "region is empty after exclusions")
    vals = _scan_values(args.what, cfg, Z, h, _threads(args))
    lines = ["re_z1,im_z1,re_z2,im_z2,value"]
    for p, v in zip(Z, vals):
        lines.append(",".join([fmt(p[0].real), fmt(p[0].imag), fmt(p[1].real),
                               fmt(p[1].imag), fmt(v)]))
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        out.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.what == "ma":
        fin = np.isfinite(vals)
        worst = float(np.max(np.abs(vals[fin]))) if fin.any() else math.nan
        print(f"max |det| = {fmt(worst)}, threshold = {fmt(DEFAULT_C * h * h)}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plurigreen",
                                description="Pluricomplex Green and Lempert functions on model domains.")
    p.add_argument("--seed", type=int, default=0, help="seed for grid subsampling (default 0)")
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker threads (default ${THREADS_ENV} or 1)")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="evaluate the Green function at a point")
    e.add_argument("--config", required=True)
    e.add_argument("--point", required=True, help="e.g. 0+0i,0.3+0i")
    e.add_argument("--form", choices=("sum", "max"), default="sum")
    e.set_defaults(func=cmd_eval)

    lp = sub.add_parser("lempert", help="Lempert function by disc search")
    lp.add_argument("--config", required=True)
    lp.add_argument("--point", required=True)
    lp.add_argument("--grid", default=None, help="radii,angles per node (default 64,64)")
    lp.add_argument("--tol", type=float, default=None, help="refinement tolerance")
    lp.add_argument("--subset", default="all", help="'all' or 0-based pole indices, e.g. 0,1")
    lp.set_defaults(func=cmd_lempert)

    c = sub.add_parser("counterexample", help="run the two-pole bidisc experiment")
    c.add_argument("--a", default="0.5")
    c.add_argument("--b", default="-0.5")
    c.add_argument("--gamma", default="0.3")
    c.add_argument("--grid", default=None)
    c.add_argument("--tol", type=float, default=None)
    c.add_argument("--out", default="-", help="output file, '-' for stdout")
    c.set_defaults(func=cmd_counterexample)

    s = sub.add_parser("scan", help="grid scan written as CSV")
    s.add_argument("--config", required=True)
    s.add_argument("--region", required=True, help="c1,c2,w1,w2,w3,w4")
    s.add_argument("--step", type=float, required=True, help="grid spacing")
    s.add_argument("--what", choices=("ma", "green", "lelong"), default="green")
    s.add_argument("--h", type=float, default=DEFAULT_H, help="finite-difference step for ma")
    s.add_argument("--exclude", type=float, default=None, help="exclusion radius around poles")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_scan)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except _Exit as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (DomainError, GeometryError, DimensionError, InvalidParameterError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except EmptyGridError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_EMPTY


if __name__ == "__main__":
    sys.exit(main())
