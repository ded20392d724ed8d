"""``entroscope`` command line: run an engine, sweep a parameter, fit a divergence.

Every command prints a table of ``(param, value)`` rows as CSV or JSON. Floats
are written with 17 significant digits so identical runs give identical
bytes. Exit status: 0 on success, 2 for invalid input, 3 when a numerical
check fails.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import cft1d, geometry, holographic, lattice, twist
from ._backend import worker_count
from .errors import DomainError, NumericalFailureError
from .scaling import DivergenceFit, EntropySeries, fit_divergence

FLOAT_FMT = "%.16e"
UNIT = "nats"


@dataclass(frozen=True)
class Quantity:
    fn: Callable[[dict], float]
    defaults: dict
    param: str
    convention: str
    integers: tuple = ()


def _cft_pair(p):
    return cft1d.IntervalPair(p["a1"], p["b1"], p["a2"], p["b2"], p["epsilon"])


def _twist_cfg(p, dim):
    return twist.TwistKernelConfig(dim=dim, include_transverse_term=bool(p["transverse"]),
                                   norm_alpha=p["norm_alpha"])


def _circle(p):
    cfg = _twist_cfg(p, 2)
    if p["panels"] > 0:
        mesh = geometry.discretize_boundary(geometry.Circle(p["R"]), int(p["panels"]), 2)
        return twist.self_entropy_integral(mesh, p["epsilon"], cfg)
    return twist.circle_entropy_reduced(p["R"], p["epsilon"], cfg)


def _sphere(p):
    cfg = _twist_cfg(p, 3)
    if p["panels"] > 0:
        mesh = geometry.discretize_boundary(geometry.Sphere(p["R"]), int(p["panels"]), 3)
        return twist.self_entropy_integral(mesh, p["epsilon"], cfg)
    return twist.sphere_entropy_reduced(p["R"], p["epsilon"], cfg)


def _segments(p):
    L, x, n = p["L"], p["x"], int(p["panels"])
    if n == 0:
        return twist.flat_segments_mutual_information(L, x, p["norm_alpha"])
    a = geometry.discretize_boundary(geometry.Segment((0.0, 0.0), (0.0, L)), n, 2)
    b = geometry.discretize_boundary(geometry.Segment((x, L), (x, 0.0)), n, 2)
    return twist.cross_mutual_information(a, b, _twist_cfg(p, 2))


def _profile(kind):
    def run(p):
        extra = {"R": p["R"]} if kind == "parabolic" else {"m": p["m"]}
        prof = holographic.AdiabaticProfile(kind, p["x0"], p["w0"], (p["y_min"], p["y_max"]), **extra)
        return holographic.adiabatic_mutual_information(prof, p["prefactor"])
    return run


_FF = "central charge c multiplies the free-fermion result"
_HOLO = "units of L_AdS^2/(4 G_N) times prefactor"
_TWIST = "up to the universal twist prefactor norm_alpha"
_TWIST_DEF = {"epsilon": 0.01, "R": 1.0, "norm_alpha": 1.0, "transverse": 0.0, "panels": 0.0}
_PROFILE = {"x0": 1e-3, "w0": math.inf, "y_min": -10.0, "y_max": 10.0, "prefactor": 1.0}

ENGINES: dict[str, dict[str, Quantity]] = {
    "cft1d": {
        "mi": Quantity(lambda p: cft1d.mutual_information_equal_intervals(p["L"], p["x"], p["c"]),
                       {"L": 1.0, "x": 1.0, "c": 1.0}, "x", _FF),
        "entropy": Quantity(lambda p: cft1d.single_interval_entropy(p["L"], p["epsilon"], p["c"]),
                            {"L": 1.0, "epsilon": 0.01, "c": 1.0}, "L", _FF),
        "two-interval": Quantity(lambda p: cft1d.two_interval_entropy(_cft_pair(p), p["c"]),
                                 {"a1": 0.0, "b1": 1.0, "a2": 2.0, "b2": 3.0, "epsilon": 0.01, "c": 1.0},
                                 "a2", cft1d.TWO_INTERVAL_FORM),
        "singularity": Quantity(lambda p: cft1d.singularity_coefficient(p["c"]), {"c": 1.0}, "c", _FF),
    },
    "lattice": {
        "mi": Quantity(lambda p: lattice.lattice_mutual_information(int(p["L"]), int(p["x"]), p["kF"], p["n"]),
                       {"L": 64.0, "x": 16.0, "kF": math.pi / 2, "n": 1.0}, "x",
                       "infinite tight-binding chain ground state", ("L", "x")),
        "entropy": Quantity(lambda p: lattice.block_entropy(int(p["L"]), p["kF"], p["n"]),
                            {"L": 64.0, "kF": math.pi / 2, "n": 1.0}, "L",
                            "infinite tight-binding chain ground state", ("L",)),
    },
    "holo": {
        "mi": Quantity(lambda p: holographic.two_strip_mutual_information(
                           holographic.StripConfig(p["w"], p["L"], p["x"], p["epsilon"], p["prefactor"])),
                       {"w": 1.0, "L": 100.0, "x": 0.1, "epsilon": 0.01, "prefactor": 1.0}, "x", _HOLO),
        "entropy": Quantity(lambda p: holographic.strip_entropy(p["w"], p["L"], p["epsilon"], p["prefactor"]),
                            {"w": 1.0, "L": 100.0, "epsilon": 0.01, "prefactor": 1.0}, "w", _HOLO),
        "turning-point": Quantity(lambda p: holographic.strip_turning_point(p["w"]), {"w": 1.0}, "w",
                                  "bulk radial coordinate in units of w"),
        "parabolic": Quantity(_profile("parabolic"), {**_PROFILE, "R": 1.0}, "x0", _HOLO),
        "corner": Quantity(_profile("corner"), {**_PROFILE, "m": 0.25}, "x0", _HOLO),
    },
    "twist": {
        "circle": Quantity(_circle, dict(_TWIST_DEF), "epsilon", _TWIST, ("panels",)),
        "sphere": Quantity(_sphere, dict(_TWIST_DEF), "epsilon", _TWIST, ("panels",)),
        "segments": Quantity(_segments, {"L": 1.0, "x": 1.0, "norm_alpha": 1.0, "transverse": 0.0,
                                         "panels": 0.0}, "x", _TWIST, ("panels",)),
        "wedge": Quantity(lambda p: twist.wedge_log_coefficient(p["theta"], p["arm_length"],
                                                                normalize=bool(p["normalize"])),
                          {"theta": math.pi / 2, "arm_length": 1.0, "normalize": 1.0}, "theta",
                          "log coefficient normalized to 1 at theta=pi/2 when normalize=1"),
    },
}

DEFAULT_QUANTITY = {"cft1d": "mi", "lattice": "mi", "holo": "mi", "twist": "circle"}
_SCAN_KEYS = ("engine", "quantity", "param", "from", "to", "points", "log_grid", "then_fit")
_COMMON_KEYS = ("format", "output")


# -- formatting -------------------------------------------------------------

def fmt_float(v: float) -> str:
    return FLOAT_FMT % v


def _meta_text(v) -> str:
    if isinstance(v, (float, np.floating)):
        return fmt_float(float(v))
    return str(v)


def _json_number(v: float) -> str:
    return "null" if not math.isfinite(v) else fmt_float(v)


def _fit_items(fit: DivergenceFit):
    yield "kind", fit.kind
    for name in ("exponent", "coefficient", "offset", "residual_rms"):
        yield name, getattr(fit, name)
    if fit.window:
        yield "window_min", fit.window[0]
        yield "window_max", fit.window[1]


def render_csv(series: EntropySeries, fit: DivergenceFit | None = None) -> str:
    out = io.StringIO()
    out.write("param,value\n")
    for p, v in series.points:
        out.write(f"{fmt_float(p)},{fmt_float(v)}\n")
    meta = {"param_name": series.param_name, **series.meta}
    for k in sorted(meta):
        out.write(f"# meta: {k}={meta[k]}\n")
    if fit is not None:
        for k, v in _fit_items(fit):
            out.write(f"# meta: fit.{k}={_meta_text(v)}\n")
    return out.getvalue()


def render_json(series: EntropySeries, fit: DivergenceFit | None = None) -> str:
    # hand-rolled so every float keeps the fixed 17-digit format
    pts = ",\n    ".join(f"[{fmt_float(p)}, {fmt_float(v)}]" for p, v in series.points)
    meta = ",\n    ".join(f"{json.dumps(k)}: {json.dumps(series.meta[k])}" for k in sorted(series.meta))
    if fit is None:
        fit_txt = "null"
    else:
        parts = []
        for k, v in _fit_items(fit):
            val = json.dumps(v) if isinstance(v, str) else _json_number(float(v))
            parts.append(f"{json.dumps(k)}: {val}")
        fit_txt = "{" + ", ".join(parts) + "}"
    return (f'{{\n  "param_name": {json.dumps(series.param_name)},\n'
            f'  "points": [\n    {pts}\n  ],\n'
            f'  "meta": {{\n    {meta}\n  }},\n'
            f'  "fit": {fit_txt}\n}}\n')


def emit_series(series: EntropySeries, fit: DivergenceFit | None = None, fmt: str = "csv",
                path: str = "-") -> None:
    """Write a series (and optional fit) as CSV or JSON to ``path`` (``-`` = stdout)."""
    if fmt not in ("csv", "json"):
        raise DomainError(f"format must be csv or json, got {fmt!r}")
    text = render_csv(series, fit) if fmt == "csv" else render_json(series, fit)
    if path in ("-", "", None):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise DomainError(f"output: cannot write {path!r}: {exc.strerror}") from exc


def _fit_from_fields(fields: dict) -> DivergenceFit | None:
    if not fields:
        return None

    def num(k):
        v = fields.get(k)
        return math.nan if v in (None, "null", "nan") else float(v)

    window = ()
    if "window_min" in fields:
        window = (num("window_min"), num("window_max"))
    return DivergenceFit(fields["kind"], num("exponent"), num("coefficient"), num("offset"),
                         num("residual_rms"), window)


def parse_csv(text: str) -> tuple[EntropySeries, DivergenceFit | None]:
    """Inverse of :func:`render_csv`."""
    rows, meta, fit = [], {}, {}
    reader = csv.reader(line for line in text.splitlines() if line and not line.startswith("#"))
    header = next(reader, None)
    if header != ["param", "value"]:
        raise DomainError(f"input: expected header 'param,value', got {header!r}")
    for row in reader:
        if len(row) != 2:
            raise DomainError(f"input: malformed row {row!r}")
        rows.append((float(row[0]), float(row[1])))
    for line in text.splitlines():
        if line.startswith("# meta: "):
            key, _, val = line[len("# meta: "):].partition("=")
            if key.startswith("fit."):
                fit[key[4:]] = val
            else:
                meta[key] = val
    name = meta.pop("param_name", "x")
    return EntropySeries(tuple(rows), name, meta), _fit_from_fields(fit)


def parse_json(text: str) -> tuple[EntropySeries, DivergenceFit | None]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"input: not valid JSON ({exc.msg})") from exc
    series = EntropySeries(tuple(map(tuple, doc["points"])), doc.get("param_name", "x"),
                           doc.get("meta", {}))
    fit = doc.get("fit")
    fit = None if fit is None else _fit_from_fields({k: v for k, v in fit.items()})
    return series, fit


# -- configuration ----------------------------------------------------------

def _norm_key(key: str) -> str:
    return key.strip().replace("-", "_")


def read_config(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DomainError(f"config: cannot read {path!r}: {exc.strerror}") from exc
    out = {}
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep or not key.strip():
            raise DomainError(f"config: line {no} is not key=value: {raw!r}")
        out[_norm_key(key)] = val.strip()
    return out


def _to_float(key: str, raw) -> float:
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise DomainError(f"{key}: expected a number, got {raw!r}") from None


def _to_bool(key: str, raw) -> bool:
    if isinstance(raw, bool):
        return raw
    txt = str(raw).strip().lower()
    if txt in ("1", "true", "yes", "on"):
        return True
    if txt in ("0", "false", "no", "off", ""):
        return False
    raise DomainError(f"{key}: expected a boolean, got {raw!r}")


def _engine_quantity(engine: str, quantity: str | None) -> tuple[str, Quantity]:
    if engine not in ENGINES:
        raise DomainError(f"engine: must be one of {sorted(ENGINES)}, got {engine!r}")
    quantity = quantity or DEFAULT_QUANTITY[engine]
    table = ENGINES[engine]
    if quantity not in table:
        raise DomainError(f"quantity: {engine} offers {sorted(table)}, got {quantity!r}")
    return quantity, table[quantity]


def _resolve_params(q: Quantity, supplied: dict) -> dict:
    params = dict(q.defaults)
    for key, raw in supplied.items():
        if key not in params:
            raise DomainError(f"{key}: not a parameter of this quantity (allowed: {sorted(params)})")
        params[key] = _to_float(key, raw)
    for key in q.integers:
        if params[key] != int(params[key]):
            raise DomainError(f"{key}: must be an integer, got {params[key]!r}")
    return params


def _all_param_names(engine: str | None = None) -> list[str]:
    engines = [engine] if engine else list(ENGINES)
    names = {k for e in engines for q in ENGINES[e].values() for k in q.defaults}
    return sorted(names)


def _merged(args, file_cfg: dict, keys) -> dict:
    """File values overridden by flags that were given on the command line."""
    out = {}
    for key in keys:
        flag = getattr(args, key, None)
        if flag is not None:
            out[key] = flag
        elif key in file_cfg:
            out[key] = file_cfg[key]
    return out


def _meta(engine, quantity, q: Quantity, params: dict) -> dict:
    meta = {"engine": engine, "quantity": quantity, "unit": UNIT, "convention": q.convention}
    for k, v in params.items():
        meta[k] = _meta_text(v)
    return meta


# -- commands ---------------------------------------------------------------

def _evaluate(q: Quantity, params: dict) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        value = float(q.fn(params))
    if not math.isfinite(value):
        raise NumericalFailureError(f"non-finite result {value!r}")
    return value


def _run_single(engine: str, args, file_cfg: dict):
    allowed = set(_all_param_names(engine)) | {"quantity", *_COMMON_KEYS}
    unknown = sorted(set(file_cfg) - allowed)
    if unknown:
        raise DomainError(f"{unknown[0]}: unknown config key for {engine}")
    quantity = args.quantity or file_cfg.get("quantity")
    quantity, q = _engine_quantity(engine, quantity)
    supplied = _merged(args, file_cfg, _all_param_names(engine))
    params = _resolve_params(q, supplied)
    value = _evaluate(q, params)
    series = EntropySeries(((params[q.param], value),), q.param, _meta(engine, quantity, q, params))
    return series, None


def scan_grid(lo: float, hi: float, points: int, log_grid: bool) -> np.ndarray:
    if points < 2:
        raise DomainError(f"points: need at least 2, got {points}")
    if not lo < hi:
        raise DomainError(f"from: must be below to, got from={lo}, to={hi}")
    if log_grid:
        if lo <= 0:
            raise DomainError(f"from: log grid needs a positive start, got {lo}")
        return np.geomspace(lo, hi, points)
    return np.linspace(lo, hi, points)


def _run_scan(args, file_cfg: dict):
    scan = _merged(args, file_cfg, _SCAN_KEYS)
    engine = scan.get("engine")
    if engine is None:
        raise DomainError("engine: required for scan")
    allowed = set(_all_param_names(engine)) | set(_SCAN_KEYS) | set(_COMMON_KEYS)
    unknown = sorted(set(file_cfg) - allowed)
    if unknown:
        raise DomainError(f"{unknown[0]}: unknown config key for scan --engine {engine}")
    quantity, q = _engine_quantity(engine, scan.get("quantity"))
    name = scan.get("param", q.param)
    base = _resolve_params(q, _merged(args, file_cfg, _all_param_names(engine)))
    if name not in base:
        raise DomainError(f"param: {engine}/{quantity} has no parameter {name!r}")
    for key in ("from", "to", "points"):
        if key not in scan:
            raise DomainError(f"{key}: required for scan")
    points = _to_float("points", scan["points"])
    if points != int(points):
        raise DomainError(f"points: must be an integer, got {points}")
    grid = scan_grid(_to_float("from", scan["from"]), _to_float("to", scan["to"]), int(points),
                     _to_bool("log_grid", scan.get("log_grid", False)))
    if name in q.integers:
        grid = np.round(grid)
        if np.any(np.diff(grid) <= 0):
            raise DomainError(f"{name}: integer grid has repeated values; use fewer points")
    jobs = [dict(base, **{name: float(v)}) for v in grid]
    workers = max(1, min(worker_count(), len(jobs)))
    if workers == 1:
        values = [_evaluate(q, p) for p in jobs]
    else:
        with ThreadPoolExecutor(workers) as pool:
            values = list(pool.map(lambda p: _evaluate(q, p), jobs))  # map keeps grid order
    meta = _meta(engine, quantity, q, {k: v for k, v in base.items() if k != name})
    meta.update({"scan_from": _meta_text(float(grid[0])), "scan_to": _meta_text(float(grid[-1])),
                 "scan_points": str(len(grid)), "scan_log_grid": str(bool(scan.get("log_grid", False)))})
    series = EntropySeries.from_arrays(grid, values, name, meta)
    fit = fit_divergence(series) if _to_bool("then_fit", scan.get("then_fit", False)) else None
    return series, fit


def _run_fit(args, file_cfg: dict):
    allowed = {"input", "window_min", "window_max", *_COMMON_KEYS}
    unknown = sorted(set(file_cfg) - allowed)
    if unknown:
        raise DomainError(f"{unknown[0]}: unknown config key for fit")
    opts = _merged(args, file_cfg, ("input", "window_min", "window_max"))
    src = opts.get("input", "-")
    try:
        text = sys.stdin.read() if src == "-" else open(src).read()
    except OSError as exc:
        raise DomainError(f"input: cannot read {src!r}: {exc.strerror}") from exc
    series, _ = parse_json(text) if text.lstrip().startswith("{") else parse_csv(text)
    window = None
    if "window_min" in opts or "window_max" in opts:
        window = (_to_float("window_min", opts.get("window_min", 0.0)),
                  _to_float("window_max", opts.get("window_max", math.inf)))
    return series, fit_divergence(series, window)


# -- argument parsing -------------------------------------------------------

def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key=value file; flags override it")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--output", default=None, help="output path, '-' for stdout")


def _add_params(p: argparse.ArgumentParser, names):
    for name in names:
        flag = "--" + name.replace("_", "-")
        opts = [flag] if flag == "--" + name else [flag, "--" + name]
        p.add_argument(*opts, dest=name, default=None, metavar="VALUE")


def _add_quantity(p: argparse.ArgumentParser, engine: str | None):
    p.add_argument("--quantity", default=None)
    names = sorted(ENGINES[engine]) if engine else []
    for name in ("mi", "entropy"):
        if engine is None or name in names:
            p.add_argument("--" + name, dest="quantity", action="store_const", const=name)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entroscope", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for engine in ENGINES:
        quantities = ", ".join(sorted(ENGINES[engine]))
        p = sub.add_parser(engine, help=f"evaluate one {engine} quantity ({quantities})")
        _add_common(p)
        _add_quantity(p, engine)
        _add_params(p, _all_param_names(engine))
    p = sub.add_parser("scan", help="sweep one parameter of an engine")
    _add_common(p)
    p.add_argument("--engine", choices=sorted(ENGINES), default=None)
    _add_quantity(p, None)
    p.add_argument("--param", default=None)
    p.add_argument("--from", dest="from", default=None)
    p.add_argument("--to", default=None)
    p.add_argument("--points", default=None)
    p.add_argument("--log-grid", dest="log_grid", action="store_const", const=True, default=None)
    p.add_argument("--then-fit", dest="then_fit", action="store_const", const=True, default=None)
    _add_params(p, _all_param_names())
    p = sub.add_parser("fit", help="classify the divergence of a CSV/JSON series")
    _add_common(p)
    p.add_argument("--input", default=None, help="series file written by this tool, '-' for stdin")
    p.add_argument("--window-min", dest="window_min", default=None)
    p.add_argument("--window-max", dest="window_max", default=None)
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_cfg = read_config(args.config) if args.config else {}
        fmt = args.format or file_cfg.get("format", "csv")
        out = args.output or file_cfg.get("output", "-")
        if args.command == "scan":
            series, fit = _run_scan(args, file_cfg)
        elif args.command == "fit":
            series, fit = _run_fit(args, file_cfg)
        else:
            series, fit = _run_single(args.command, args, file_cfg)
        emit_series(series, fit, fmt, out)
    except NumericalFailureError as exc:
        print(f"entroscope: numerical failure: {exc}", file=sys.stderr)
        return 3
    except (DomainError, ValueError) as exc:
        print(f"entroscope: error: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
