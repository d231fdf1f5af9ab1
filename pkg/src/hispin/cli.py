"""Command-line front end: ``hispin verify|spaces|fundsol|catalog|render-op``.

Config files are plain ``key = value`` lines; ``#`` starts a comment and list
values are comma separated.  Precedence is flags, then the file, then defaults.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field, fields

from . import __version__
from .conformal import apply_to_fundamental_solution
from .operators import build, render_definition
from .params import ParameterError, SpaceParams
from .spaces import harmonic_basis, harmonic_dimension, monogenic_basis, monogenic_dimension
from .verify import REGISTRY, SUITES, Grid, catalog, run_suite
from .weighted import to_text

REPORT_ENV = "HISPIN_REPORT_DIR"
REPORT_NAME = "hispin-report.json"
MODES = ("exact", "float")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    m: list[int] = field(default_factory=lambda: [3, 4, 5])
    k: list[int] = field(default_factory=lambda: [0, 1, 2])
    xdeg: int | None = None
    suite: list[str] = field(default_factory=lambda: ["all"])
    mode: str = "exact"
    output: str | None = None
    seed: int = 0
    workers: int = field(default_factory=lambda: os.cpu_count() or 1)

    def validate(self) -> None:
        if not self.m or not self.k:
            raise ConfigError("the grid needs at least one m and one k")
        if any(m < 3 for m in self.m):
            raise ConfigError(f"m must be at least 3, got {self.m}")
        if any(k < 0 for k in self.k):
            raise ConfigError(f"k must be nonnegative, got {self.k}")
        if self.xdeg is not None and self.xdeg < 0:
            raise ConfigError(f"xdeg must be nonnegative, got {self.xdeg}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.workers < 1:
            raise ConfigError(f"workers must be positive, got {self.workers}")
        unknown = [s for s in self.suite if s != "all" and s not in SUITES and s not in REGISTRY]
        if unknown:
            raise ConfigError(f"unknown suite or check: {', '.join(unknown)}; suites: all, {', '.join(SUITES)}")

    def grid(self) -> Grid:
        return Grid(ms=tuple(self.m), ks=tuple(self.k), xdeg=self.xdeg, mode=self.mode, seed=self.seed)

    def report_path(self) -> str:
        if self.output:
            return self.output
        return os.path.join(os.environ.get(REPORT_ENV, "."), REPORT_NAME)

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if isinstance(value, list):
                value = ",".join(str(v) for v in value)
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise ConfigError(f"expected a comma separated list of integers, got {text!r}") from None


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}") from None


def _xdeg(text: str) -> int | None:
    return None if text.strip() == "auto" else _int(text)


_PARSERS = {
    "m": _int_list,
    "k": _int_list,
    "xdeg": _xdeg,
    "suite": lambda t: [s for s in t.replace(" ", "").split(",") if s],
    "mode": str.strip,
    "output": str.strip,
    "seed": _int,
    "workers": _int,
}


def parse_config(text: str) -> dict:
    """Parse ``key = value`` lines into a dict of typed RunConfig fields."""
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"line {n}: unknown key {key!r}")
        out[key] = _PARSERS[key](value)
    return out


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = load_config(args.config) if args.config else {}
    for key in _PARSERS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def _check_writable(path: str) -> None:
    if path == "-":
        return
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
        raise ConfigError(f"cannot write report to {path}")
    if os.path.exists(path) and not os.access(path, os.W_OK):
        raise ConfigError(f"cannot write report to {path}")


def _progress(quiet: bool):
    if quiet:
        return None

    def show(r):
        where = " ".join(f"{k}={v}" for k, v in r.params.items())
        extra = f"  ({r.reason})" if r.reason else ""
        print(f"{r.status.upper():5s} {r.kind:8s} {r.name} [{where}]{extra}", file=sys.stderr, flush=True)

    return show


def cmd_verify(args) -> int:
    cfg = resolve_config(args)
    path = cfg.report_path()
    _check_writable(path)
    report = run_suite(cfg.suite, cfg.grid(), workers=cfg.workers, progress=_progress(args.quiet))
    text = report.to_json(timings=not args.no_timings)
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    counts = ", ".join(f"{k}={v}" for k, v in report.summary().items())
    print(f"{len(report.checks)} results: {counts}", file=sys.stderr)
    for c in report.failed:
        print(f"asserted failure: {c.name} at {c.params}: {c.reason}", file=sys.stderr)
    if path != "-":
        print(f"report written to {path}", file=sys.stderr)
    return report.exit_code


def _params(args) -> SpaceParams:
    try:
        return SpaceParams(args.m, args.k)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_spaces(args) -> int:
    p = _params(args)
    print(f"m={p.m} k={p.k}")
    print(f"dim H_k = {harmonic_dimension(p.m, p.k)}")
    real = monogenic_dimension(p.m, p.k)
    print(f"rank M_k = {real >> p.m} (right Cl_m-module), real dimension {real}")
    if args.show:
        for label, basis in (("H_k", harmonic_basis(p)), ("M_k", monogenic_basis(p))):
            print(f"{label} basis ({len(basis)}):")
            for f in basis:
                print(f"  {to_text(f)}")
    return 0


def cmd_fundsol(args) -> int:
    p = _params(args)
    basis = monogenic_basis(p) if args.which == "D3" else harmonic_basis(p)
    bad = 0
    for n, f in enumerate(basis):
        sol, image = apply_to_fundamental_solution(p, args.which, f)
        ok = image.is_zero()
        bad += not ok
        print(f"#{n} {'zero' if ok else 'NONZERO'}  f = {to_text(f)}")
        if args.show:
            print(f"   solution = {to_text(sol)}")
    print(f"{args.which} annihilates {len(basis) - bad}/{len(basis)} fundamental solutions")
    return 1 if bad else 0


def cmd_catalog(args) -> int:
    for entry in catalog():
        guards = f" guards={','.join(entry['guards'])}" if entry["guards"] else ""
        print(f"{entry['name']:45s} {entry['suite']:14s} {entry['kind']:8s} {entry['anchor']}{guards}")
    return 0


def cmd_render(args) -> int:
    p = _params(args)
    kw = {k: v for k, v in (("i", args.i), ("j", args.j), ("n", args.n), ("form", args.form)) if v is not None}
    try:
        op = build(args.tag, p, **kw)
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from None
    print(render_definition(op))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hispin", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"hispin {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run identity suites and write a JSON report")
    v.add_argument("--suite", type=_PARSERS["suite"], help="comma separated suites or check names (default all)")
    v.add_argument("--m", type=_int_list, help="comma separated m values (default 3,4,5)")
    v.add_argument("--k", type=_int_list, help="comma separated k values (default 0,1,2)")
    v.add_argument("--xdeg", type=_xdeg, help="max x-degree of test functions, or 'auto' (operator order)")
    v.add_argument("--mode", help="exact or float (float is for benchmarking only)")
    v.add_argument("--seed", type=_int, help="seed for randomized checks")
    v.add_argument("--workers", type=_int, help="worker processes (default: CPU count)")
    v.add_argument("--config", help="key = value config file")
    v.add_argument("--output", help=f"report path, '-' for stdout (default ${REPORT_ENV}/{REPORT_NAME})")
    v.add_argument("--no-timings", action="store_true", help="omit timing fields from the report")
    v.add_argument("--quiet", action="store_true", help="no per-check progress lines")
    v.set_defaults(func=cmd_verify)

    def space_args(p):
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--k", type=int, required=True)

    s = sub.add_parser("spaces", help="dimensions and bases of H_k and M_k")
    space_args(s)
    s.add_argument("--show", action="store_true", help="print basis elements")
    s.set_defaults(func=cmd_spaces)

    f = sub.add_parser("fundsol", help="apply D3 or D4 to fundamental solutions built from a basis")
    space_args(f)
    f.add_argument("--which", choices=("D3", "D4"), default="D3")
    f.add_argument("--show", action="store_true", help="print each solution")
    f.set_defaults(func=cmd_fundsol)

    c = sub.add_parser("catalog", help="list every registered check")
    c.set_defaults(func=cmd_catalog)

    r = sub.add_parser("render-op", help="print an operator in textual notation")
    r.add_argument("tag")
    space_args(r)
    r.add_argument("--i", type=int)
    r.add_argument("--j", type=int)
    r.add_argument("--n", type=int)
    r.add_argument("--form")
    r.set_defaults(func=cmd_render)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"hispin: error: {exc}", file=sys.stderr)
        return 2
    except ParameterError as exc:
        print(f"hispin: error: {exc}", file=sys.stderr)
        return 2
