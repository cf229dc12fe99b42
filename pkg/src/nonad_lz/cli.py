"""``nonad-lz``: scenario runner emitting CSV/JSON tables.

Commands
--------
spectrum        adiabatic eigenvalues along real ``u``
branch-points   closed-form branch points and their z images
exact           exact survival probability on an eps grid
ddp             asymptotic probability on an eps grid
oscillator      oscillator estimate on an eps grid
critical        critical eps values from ddp / oscillator / exact scans
figure N        data behind figure N (1-8)
validate        the cross-validation suite; exit status 0 iff every row passes

Exit codes: 0 success, 1 validation failure, 2 usage, 3 numerical failure, 4 I/O.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
import time
import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import __version__
from .ddp import (branch_points_closed, critical_epsilons_ddp, p_ddp)
from .errors import InvalidParameterError, NonadError
from .model import TlsModel, adiabatic_eigen
from .oscillator import critical_epsilons_osc, solve_oscillator
from .propagate import PropagationSettings, exact_minima, probability_scan, survival_probability

__all__ = ["ScenarioConfig", "ResultTable", "parse_config", "run", "emit", "main"]

COMMANDS = ("spectrum", "branch-points", "exact", "ddp", "oscillator", "critical", "figure", "validate")
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4

# per-figure defaults, applied only where the user gave no value
FIGURE_DEFAULTS = {
    1: {"n": 3, "gamma": "0.5"},
    2: {"n": 3, "gamma": "1.1"},
    3: {"n": 3, "gamma": "0.5"},
    4: {"n": 3, "gamma": "0.1,0.3,0.7,0.9", "eps": "0.5:10:64"},
    5: {"n": 3, "gamma": "1.5"},
    6: {"n": 3, "gamma": "1.01,1.1,50,500", "eps": "0.5:10:64"},
    7: {"n": 3, "gamma": "0.05:2:40", "eps": "10,15,20,25,30"},
    8: {"n": 5, "gamma": "0,0.2,0.4,0.6,0.8", "nu_max": 3},
}
BASE_DEFAULTS = {"n": 3, "gamma": "0.3", "eps": "1:10:10", "u": "-2:2:201", "log_eps": False,
                 "tol": 1e-10, "window": None, "nu_max": 3, "source": "all", "format": "csv",
                 "output": None, "workers": 1, "criteria": None}


class UsageError(Exception):
    pass


@dataclass
class ScenarioConfig:
    command: str
    n: int = 3
    gamma_tilde: tuple[float, ...] = (0.3,)
    epsilon_range: tuple[float, float, int] | tuple[float, ...] = (1.0, 10.0, 10)
    eps_values: tuple[float, ...] = ()
    u_values: tuple[float, ...] = ()
    log_eps: bool = False
    tol: float = 1e-10
    window: float | None = None
    nu_max: int = 3
    source: str = "all"
    figure: int | None = None
    output: str | None = None
    format: str = "csv"
    workers: int = 1
    criteria: tuple[int, ...] | None = None
    raw: dict = field(default_factory=dict)

    def settings(self) -> PropagationSettings:
        return PropagationSettings(window_half_width=self.window, rel_tol=self.tol)


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[list[Any]]
    metadata: dict = field(default_factory=dict)


# ---------------------------------------------------------------- parsing

def _parse_range(text: str, name: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--{name}: expected LO:HI:K, got {text!r}")
    try:
        lo, hi, k = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"--{name}: malformed range {text!r}") from None
    if k < 2:
        raise UsageError(f"--{name}: need at least 2 samples, got {k}")
    if not hi > lo:
        raise UsageError(f"--{name}: HI must exceed LO in {text!r}")
    return lo, hi, k


def _parse_values(text: str, name: str, *, log: bool = False) -> tuple[float, ...]:
    """Either ``LO:HI:K`` (inclusive uniform grid) or a comma-separated list."""
    text = str(text).strip()
    if ":" in text:
        lo, hi, k = _parse_range(text, name)
        if log:
            if lo <= 0:
                raise UsageError(f"--{name}: log spacing needs LO > 0")
            return tuple(float(x) for x in np.geomspace(lo, hi, k))
        return tuple(float(x) for x in np.linspace(lo, hi, k))
    try:
        vals = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"--{name}: malformed value list {text!r}") from None
    if not vals:
        raise UsageError(f"--{name}: empty value list")
    return vals


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nonad-lz", description=__doc__.split("\n\n")[0],
                                argument_default=argparse.SUPPRESS)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("figure", nargs="?", type=int, default=None,
                   help="figure number for the figure command")
    p.add_argument("--n", type=int, help="odd exponent of the sweep w = u**n")
    p.add_argument("--gamma", help="damping: value, list a,b,c or range LO:HI:K")
    p.add_argument("--eps", help="adiabaticity grid LO:HI:K or list")
    p.add_argument("--u", help="time grid for spectra, LO:HI:K")
    p.add_argument("--log-eps", dest="log_eps", action="store_true", help="log-spaced eps range")
    p.add_argument("--tol", type=float, help="relative tolerance of the exact solver")
    p.add_argument("--window", type=float, help="half-width U of the integration window")
    p.add_argument("--nu-max", dest="nu_max", type=int, help="number of critical values")
    p.add_argument("--source", choices=("ddp", "oscillator", "exact", "all"))
    p.add_argument("--criteria", help="validate: comma-separated criterion numbers")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--output", help="output path (stdout if omitted)")
    p.add_argument("--config", help="flat key = value file mirroring the flags")
    p.add_argument("--workers", type=int, help="worker processes for eps sweeps")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def _read_config_file(path: str) -> dict:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_string("[config]\n" + fh.read())
    except OSError as exc:
        raise UsageError(f"--config: cannot read {path!r}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise UsageError(f"--config: malformed file {path!r}: {exc}") from None
    out = {}
    known = set(BASE_DEFAULTS) | {"command", "figure"}
    for key, val in cp["config"].items():
        k = key.replace("-", "_")
        if k not in known:
            raise UsageError(f"--config: unknown key {key!r}")
        out[k] = val
    return out


def _coerce(key: str, val):
    if val is None or not isinstance(val, str):
        return val
    try:
        if key in ("n", "nu_max", "workers", "figure"):
            return int(val)
        if key in ("tol", "window"):
            return float(val)
    except ValueError:
        raise UsageError(f"--{key.replace('_', '-')}: malformed value {val!r}") from None
    if key == "log_eps":
        if val.lower() not in ("true", "false", "1", "0", "yes", "no"):
            raise UsageError(f"--log-eps: expected a boolean, got {val!r}")
        return val.lower() in ("true", "1", "yes")
    return val


def parse_config(argv: list[str]) -> ScenarioConfig:
    """Resolve defaults < figure defaults < config file < command-line flags."""
    parser = _build_parser()
    try:
        ns = vars(parser.parse_args(argv))
    except SystemExit as exc:
        if exc.code in (0, None):
            raise
        raise UsageError("invalid command line") from None
    if ns.get("figure") is None:
        ns.pop("figure", None)
    file_vals = _read_config_file(ns.pop("config")) if "config" in ns else {}
    file_vals.pop("command", None)
    merged = {**file_vals, **ns}
    merged = {k: _coerce(k, v) for k, v in merged.items()}
    command = merged["command"]
    fig = merged.get("figure")
    if command == "figure":
        if fig is None or fig not in FIGURE_DEFAULTS:
            raise UsageError("figure: expected a figure number 1-8")
    elif fig is not None:
        raise UsageError(f"unexpected positional argument {fig!r} for {command}")
    resolved = dict(BASE_DEFAULTS)
    if command == "figure":
        resolved.update(FIGURE_DEFAULTS[fig])
    resolved.update({k: v for k, v in merged.items() if k not in ("command", "figure")})
    n = int(resolved["n"])
    if n < 1 or n % 2 == 0:
        raise UsageError(f"--n: must be an odd positive integer, got {n}")
    gammas = _parse_values(resolved["gamma"], "gamma")
    if any(g < 0 for g in gammas):
        raise UsageError("--gamma: values must be >= 0")
    eps_text = str(resolved["eps"])
    eps_vals = _parse_values(eps_text, "eps", log=bool(resolved["log_eps"]))
    if any(e <= 0 for e in eps_vals):
        raise UsageError("--eps: values must be > 0")
    eps_range = _parse_range(eps_text, "eps") if ":" in eps_text else eps_vals
    u_vals = _parse_values(resolved["u"], "u")
    if resolved["tol"] is not None and not 0 < float(resolved["tol"]) <= 1e-3:
        raise UsageError("--tol: must lie in (0, 1e-3]")
    if resolved["window"] is not None and not float(resolved["window"]) > 0:
        raise UsageError("--window: must be positive")
    if int(resolved["nu_max"]) < 1:
        raise UsageError("--nu-max: must be >= 1")
    if int(resolved["workers"]) < 1:
        raise UsageError("--workers: must be >= 1")
    if resolved["source"] not in ("ddp", "oscillator", "exact", "all"):
        raise UsageError(f"--source: unknown value {resolved['source']!r}")
    if resolved["format"] not in ("csv", "json"):
        raise UsageError(f"--format: unknown value {resolved['format']!r}")
    crit = None
    if resolved["criteria"]:
        try:
            crit = tuple(int(x) for x in str(resolved["criteria"]).split(","))
        except ValueError:
            raise UsageError(f"--criteria: malformed list {resolved['criteria']!r}") from None
        if any(not 1 <= c <= 11 for c in crit):
            raise UsageError("--criteria: numbers must lie in 1..11")
    raw = {k: resolved[k] for k in sorted(resolved)}
    raw["command"] = command
    if fig is not None:
        raw["figure"] = fig
    return ScenarioConfig(command=command, n=n, gamma_tilde=gammas, epsilon_range=eps_range,
                          eps_values=eps_vals, u_values=u_vals, log_eps=bool(resolved["log_eps"]),
                          tol=float(resolved["tol"]),
                          window=None if resolved["window"] is None else float(resolved["window"]),
                          nu_max=int(resolved["nu_max"]), source=resolved["source"], figure=fig,
                          output=resolved["output"], format=resolved["format"],
                          workers=int(resolved["workers"]), criteria=crit, raw=raw)


# ---------------------------------------------------------------- runners

def _single_gamma(cfg: ScenarioConfig) -> float:
    if len(cfg.gamma_tilde) != 1:
        raise UsageError(f"{cfg.command}: expects a single --gamma value")
    return cfg.gamma_tilde[0]


def _spectrum_rows(n, g, us, with_gamma):
    m = TlsModel.power_law(n, g)
    ep, em = adiabatic_eigen(m, np.asarray(us))
    rows = []
    for u, a, b in zip(us, ep, em):
        row = [u, a.real, a.imag, b.real, b.imag]
        rows.append([g] + row if with_gamma else row)
    return rows


def _branch_rows(n, g, with_gamma):
    rows = []
    for b in branch_points_closed(n, g):
        row = [b.k, b.family.value, b.u_c.real, b.u_c.imag, b.z_c.real, b.z_c.imag, b.contributes]
        rows.append([g] + row if with_gamma else row)
    return rows


def _ddp_value(n, g, e):
    if g == 1.0:
        return float("nan"), "ddp_undefined"
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        br = p_ddp(TlsModel.power_law(n, g, e))
    return br.p, f"ddp_{br.regime.value}"


def _exact_rows(cfg: ScenarioConfig):
    s = cfg.settings()
    rows = []
    for g in sorted(cfg.gamma_tilde):
        m = TlsModel.power_law(cfg.n, g)
        for e in cfg.eps_values:
            r = survival_probability(m.with_epsilon(e), s)
            diag = (f"window={r.window:.6g};window_converged={str(r.window_converged).lower()};"
                    f"plateau_residual={r.plateau_residual:.3e};steps={r.steps_used}")
            rows.append([e, g, r.p, "exact", diag])
    return rows


def _critical_rows(cfg: ScenarioConfig):
    srcs = ("ddp", "oscillator", "exact") if cfg.source == "all" else (cfg.source,)
    rows = []
    for g in sorted(cfg.gamma_tilde):
        found = {}
        if "ddp" in srcs and g < 1 and cfg.n >= 3:
            found["ddp"] = critical_epsilons_ddp(cfg.n, g, cfg.nu_max).values
        if "oscillator" in srcs and g < 1:
            found["oscillator"] = critical_epsilons_osc(g, cfg.nu_max).values
        if "exact" in srcs:
            hint = [v[-1] for v in found.values()] or [critical_epsilons_osc(min(g, 0.9), cfg.nu_max).values[-1]]
            lo, hi = (0.5, 1.35 * max(hint) + 1.0) if ":" not in str(cfg.raw["eps"]) else cfg.epsilon_range[:2]
            mins = exact_minima(TlsModel.power_law(cfg.n, g), lo, hi, 128, settings=cfg.settings(),
                                workers=cfg.workers)
            found["exact_scan"] = tuple(mn.epsilon for mn in mins[:cfg.nu_max])
        ex = found.get("exact_scan", ())
        for src in ("ddp", "oscillator", "exact_scan"):
            for nu, val in enumerate(found.get(src, ()), start=1):
                rel = abs(val - ex[nu - 1]) / ex[nu - 1] if nu <= len(ex) else float("nan")
                rows.append([nu, val, src, g, rel])
    return rows


def _figure(cfg: ScenarioConfig) -> ResultTable:
    f, n = cfg.figure, cfg.n
    if f in (1, 2):
        rows = [r for g in sorted(cfg.gamma_tilde) for r in _spectrum_rows(n, g, cfg.u_values, True)]
        return ResultTable(["gamma", "u", "re_e_plus", "im_e_plus", "re_e_minus", "im_e_minus"], rows)
    if f in (3, 5):
        rows = [r for g in sorted(cfg.gamma_tilde) for r in _branch_rows(n, g, True)]
        return ResultTable(["gamma", "k", "family", "re_u_c", "im_u_c", "re_z_c", "im_z_c", "contributes"],
                           rows)
    if f in (4, 6):
        rows = []
        for g in sorted(cfg.gamma_tilde):
            pe = probability_scan(TlsModel.power_law(n, g), cfg.eps_values, cfg.settings(),
                                  workers=cfg.workers)
            for e, p in zip(cfg.eps_values, pe):
                q, meth = _ddp_value(n, g, e)
                rows.append([g, e, float(p), q, abs(q - p) / p if p > 0 else float("nan"), meth])
        return ResultTable(["gamma", "eps", "p_exact", "p_ddp", "rel_gap", "ddp_method"], rows)
    if f == 7:
        rows = []
        for e in sorted(cfg.eps_values):
            for g in sorted(cfg.gamma_tilde):
                p = survival_probability(TlsModel.power_law(n, g, e), cfg.settings(), check_window=False).p
                q, meth = _ddp_value(n, g, e)
                rows.append([e, g, p, q, meth])
        return ResultTable(["eps", "gamma", "p_exact", "p_ddp", "ddp_method"], rows)
    if f == 8:
        rows = []
        for g in sorted(cfg.gamma_tilde):
            osc = critical_epsilons_osc(g, cfg.nu_max).values
            mins = exact_minima(TlsModel.power_law(n, g), 0.25 * osc[0], 1.35 * osc[-1] + 1.0, 128,
                                settings=cfg.settings(), workers=cfg.workers)
            for nu, eo in enumerate(osc, start=1):
                ee = mins[nu - 1].epsilon if nu <= len(mins) else float("nan")
                rows.append([g, nu, eo, ee, abs(eo - ee) / ee])
        return ResultTable(["gamma", "nu", "eps_osc", "eps_exact", "rel_diff"], rows)
    raise UsageError(f"figure: unknown figure {f}")


def run(cfg: ScenarioConfig) -> ResultTable:
    """Execute ``cfg`` and return its table (metadata filled by the caller)."""
    c = cfg.command
    if c == "spectrum":
        return ResultTable(["u", "re_e_plus", "im_e_plus", "re_e_minus", "im_e_minus"],
                           _spectrum_rows(cfg.n, _single_gamma(cfg), cfg.u_values, False))
    if c == "branch-points":
        return ResultTable(["k", "family", "re_u_c", "im_u_c", "re_z_c", "im_z_c", "contributes"],
                           _branch_rows(cfg.n, _single_gamma(cfg), False))
    cols = ["eps", "gamma", "p", "method", "diagnostics"]
    if c == "exact":
        return ResultTable(cols, _exact_rows(cfg))
    if c == "ddp":
        rows = []
        for g in sorted(cfg.gamma_tilde):
            for e in cfg.eps_values:
                q, meth = _ddp_value(cfg.n, g, e)
                rows.append([e, g, q, meth, ""])
        return ResultTable(cols, rows)
    if c == "oscillator":
        rows = []
        for g in sorted(cfg.gamma_tilde):
            for e in cfg.eps_values:
                s = solve_oscillator(e, g)
                rows.append([e, g, s.p_estimate, "oscillator", f"regime={s.params.regime}"])
        return ResultTable(cols, rows)
    if c == "critical":
        return ResultTable(["nu", "eps_c", "source", "gamma", "rel_diff_to_exact"], _critical_rows(cfg))
    if c == "figure":
        return _figure(cfg)
    if c == "validate":
        from .acceptance import run_criteria
        checks = run_criteria(cfg.criteria)
        return ResultTable(["criterion", "check", "value", "relation", "limit", "passed"],
                           [[k.criterion, k.label, k.value, k.relation, k.limit, k.passed] for k in checks])
    raise UsageError(f"unknown command {c!r}")


# ---------------------------------------------------------------- output

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "nan" if math.isnan(v) else format(v, ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return None if not math.isfinite(v) else v
    return v


def render(table: ResultTable, fmt: str) -> str:
    if fmt == "json":
        doc = {"metadata": table.metadata, "columns": table.columns,
               "rows": [{c: _json_value(v) for c, v in zip(table.columns, r)} for r in table.rows]}
        return json.dumps(doc, indent=1, sort_keys=False) + "\n"
    buf = io.StringIO()
    for key, val in table.metadata.items():
        buf.write(f"# {key}: {json.dumps(val, sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for r in table.rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def emit(table: ResultTable, fmt: str = "csv", path: str | None = None) -> None:
    """Write ``table`` to ``path`` (stdout when ``None``); raises ``OSError`` on failure."""
    text = render(table, fmt)
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"nonad-lz: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    t0 = time.perf_counter()
    try:
        table = run(cfg)
    except UsageError as exc:
        print(f"nonad-lz: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidParameterError as exc:
        print(f"nonad-lz: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NonadError, ArithmeticError) as exc:
        diag = getattr(exc, "diagnostics", {})
        table = ResultTable(["error", "message", "diagnostics"],
                            [[type(exc).__name__, str(exc), json.dumps(diag, sort_keys=True)]])
        code = EXIT_NUMERIC
    else:
        code = EXIT_OK
        if cfg.command == "validate" and not all(r[-1] for r in table.rows):
            code = EXIT_FAIL
    table.metadata = {"program": "nonad-lz", "version": __version__, "config": cfg.raw,
                      "wall_time_s": round(time.perf_counter() - t0, 3)}
    try:
        emit(table, cfg.format, cfg.output)
    except OSError as exc:
        print(f"nonad-lz: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    if code == EXIT_NUMERIC:
        print(f"nonad-lz: numerical failure: {table.rows[0][1]}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
