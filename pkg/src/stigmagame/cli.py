"""Command-line surface: config parsing and the six analysis commands.

Commands: check | evaluate | sweep | optimize | simulate | figures.
Config files are flat `key = value` text (UTF-8, # comments). Exit codes:
0 success, 2 config error (including an assumption-1 violation), 3
assumption-3 failure, 4 numerical failure. All CSV output uses a fixed
column order with 12-significant-digit floats, so repeated runs with the
same config are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import math
import re
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from .distributions import (
    DistributionSpec,
    QuadratureError,
    piecewise_linear_cdf,
    uniform,
)
from .figures import figure_tables, line_chart_svg
from .montecarlo import SimConfig, analytic_targets, simulate
from .signaling import AssumptionViolation, ModelParams, check_assumptions
from .welfare import (
    CONVENTIONS,
    SweepError,
    SweepRow,
    evaluate_point,
    optimize,
    sweep,
)

__all__ = ["ConfigError", "RunConfig", "load_config", "run", "main", "entry"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ASSUMPTION = 3
EXIT_NUMERICAL = 4

SWEEP_HEADER = ("tau_hat", "S", "gap", "H", "r", "R_H", "R", "W_A", "W_B", "W")

_PARAM_KEYS = (
    "theta_L",
    "theta_H",
    "v",
    "c",
    "c_h",
    "z",
    "u",
    "M",
    "tau_hat",
    "tau_true",
)
_REQUIRED_KEYS = (
    "theta_L",
    "theta_H",
    "v",
    "c",
    "c_h",
    "z",
    "u",
    "tau_hat",
    "dist_beta",
    "dist_y",
)
_KNOWN_KEYS = set(_PARAM_KEYS) | {"dist_beta", "dist_y", "convention"}

_UNIFORM_RE = re.compile(
    r"^uniform\(\s*([^,\s]+)\s*,\s*([^,\s)]+)\s*\)$", re.IGNORECASE
)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    params: ModelParams
    convention: str = "corrected"
    grid: int = 101
    tol: float = 1e-6
    n_pairs: int = 500_000
    seed: int = 2024
    strict: bool = False
    out_dir: str = "."
    tau: float | None = None


def _parse_dist(key: str, value: str, base_dir: Path) -> DistributionSpec:
    m = _UNIFORM_RE.match(value)
    if m:
        try:
            lo, hi = float(m.group(1)), float(m.group(2))
        except ValueError:
            raise ConfigError(f"key '{key}': malformed uniform bounds in {value!r}")
        try:
            return uniform(lo, hi)
        except ValueError as exc:
            raise ConfigError(f"key '{key}': {exc}")
    if value.startswith("piecewise:"):
        path = base_dir / value[len("piecewise:"):].strip()
        if not path.is_file():
            raise ConfigError(f"key '{key}': knot file not found: {path}")
        knots = []
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().lower() == "x":
                    continue
                try:
                    knots.append((float(row[0]), float(row[1])))
                except (IndexError, ValueError):
                    raise ConfigError(
                        f"key '{key}': bad knot row {row!r} in {path}"
                    )
        try:
            return piecewise_linear_cdf(knots)
        except ValueError as exc:
            raise ConfigError(f"key '{key}': {exc}")
    raise ConfigError(
        f"key '{key}': expected uniform(lo,hi) or piecewise:<csv>, got {value!r}"
    )


def load_config(path) -> RunConfig:
    """Parse a flat key = value config file into a RunConfig.

    Unknown keys are rejected. M defaults to 1, tau_true to 0 and the
    convention to corrected; everything else is required.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    raw: dict[str, str] = {}
    for lineno, line in enumerate(
        path.read_text(encoding="utf-8").splitlines(), start=1
    ):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, value = (part.strip() for part in text.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        raw[key] = value
    for key in _REQUIRED_KEYS:
        if key not in raw:
            raise ConfigError(f"missing key '{key}'")

    scalars = {}
    for key in _PARAM_KEYS:
        if key not in raw:
            continue
        try:
            scalars[key] = float(raw[key])
        except ValueError:
            raise ConfigError(f"key '{key}': malformed value {raw[key]!r}")
    dist_beta = _parse_dist("dist_beta", raw["dist_beta"], path.parent)
    dist_y = _parse_dist("dist_y", raw["dist_y"], path.parent)
    convention = raw.get("convention", "corrected")
    if convention not in CONVENTIONS:
        raise ConfigError(
            f"key 'convention': must be one of {CONVENTIONS}, got {convention!r}"
        )
    try:
        params = ModelParams(dist_beta=dist_beta, dist_y=dist_y, **scalars)
    except AssumptionViolation:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc))
    return RunConfig(params=params, convention=convention)


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".12g")


def _csv_line(values) -> str:
    return ",".join(_fmt(v) for v in values)


def _write_csv(path: Path, header, rows, comments=()) -> None:
    lines = list(comments)
    lines.append(",".join(header))
    lines.extend(_csv_line(row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _dist_repr(spec: DistributionSpec) -> str:
    if spec.kind == "uniform":
        return f"uniform({_fmt(spec.support_lo)},{_fmt(spec.support_hi)})"
    return (
        f"piecewise_linear_cdf({len(spec.knots_x)} knots on "
        f"[{_fmt(spec.support_lo)},{_fmt(spec.support_hi)}])"
    )


def _echo_params(cfg: RunConfig) -> list[str]:
    p = cfg.params
    scalar_bits = ", ".join(f"{k} = {_fmt(getattr(p, k))}" for k in _PARAM_KEYS)
    return [
        f"# {scalar_bits}",
        f"# dist_beta = {_dist_repr(p.dist_beta)}, dist_y = {_dist_repr(p.dist_y)}",
        f"# convention = {cfg.convention}",
    ]


def _sweep_row_values(row: SweepRow):
    return (
        row.tau_hat,
        row.S,
        row.gap,
        row.H,
        row.r,
        row.R_H,
        row.R,
        row.W_A,
        row.W_B,
        row.W,
    )


def _grid(n: int) -> list[float]:
    return [i / (n - 1) for i in range(n)]


def _cmd_check(cfg: RunConfig, out: Path) -> int:
    for line in _echo_params(cfg):
        print(line)
    rep = check_assumptions(cfg.params)
    print(
        f"assumption 1 (testing worthwhile for high risk only): "
        f"{'OK' if rep.a1_holds else 'VIOLATED'}  margin = {_fmt(rep.a1_margin)}"
    )
    print(
        f"assumption 2 (interaction with average partner): violating mass = "
        f"{_fmt(rep.a2_violating_mass)}  (reported only; untested partners "
        f"are always accepted)"
    )
    print(
        f"assumption 3 (continuation-value gap): "
        f"{'OK' if rep.a3_holds else 'VIOLATED'}  margin = {_fmt(rep.a3_margin)}"
    )
    print(f"implied infection rate h_bar = {_fmt(rep.h_bar)}")
    return EXIT_OK


def _cmd_evaluate(cfg: RunConfig, out: Path) -> int:
    tau = cfg.params.tau_hat if cfg.tau is None else cfg.tau
    row = evaluate_point(cfg.params, tau, cfg.convention)
    for line in _echo_params(cfg):
        print(line)
    print(",".join(SWEEP_HEADER))
    print(_csv_line(_sweep_row_values(row)))
    return EXIT_OK


def _cmd_sweep(cfg: RunConfig, out: Path) -> int:
    rows = sweep(cfg.params, _grid(cfg.grid), cfg.convention)
    path = out / "sweep.csv"
    _write_csv(path, SWEEP_HEADER, [_sweep_row_values(r) for r in rows])
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


def _cmd_optimize(cfg: RunConfig, out: Path) -> int:
    res = optimize(
        cfg.params, tol=cfg.tol, convention=cfg.convention, grid_points=cfg.grid
    )
    path = out / "optimize_trace.csv"
    _write_csv(path, ("stage", "tau_hat", "W"), res.trace)
    print(f"tau_star = {_fmt(res.tau_star)}  W_star = {_fmt(res.W_star)}")
    print(f"wrote {path} ({len(res.trace)} rows)")
    return EXIT_OK


_SIM_HEADER = (
    "tau_hat",
    "n_pairs",
    "seed",
    "r_hat",
    "r_se",
    "r_analytic",
    "R_hat",
    "R_se",
    "R_analytic",
    "R_H_hat",
    "R_H_se",
    "R_H_analytic",
    "S_hat",
    "S_se",
    "S_analytic",
    "W_hat",
    "W_se",
    "W_analytic",
    "hot_hot",
    "cold_cold",
    "hot_cold_unsafe",
    "hot_cold_safe",
)


def _cmd_simulate(cfg: RunConfig, out: Path) -> int:
    tau = cfg.params.tau_hat if cfg.tau is None else cfg.tau
    sim_cfg = SimConfig(
        n_pairs=cfg.n_pairs, seed=cfg.seed, tau_hat=tau, convention=cfg.convention
    )
    res = simulate(cfg.params, sim_cfg)
    tgt = analytic_targets(cfg.params, tau, cfg.convention)
    row = (
        tau,
        res.n_pairs,
        cfg.seed,
        res.r_hat,
        res.stderr.r,
        tgt["r"],
        res.R_hat,
        res.stderr.R,
        tgt["R"],
        res.R_H_hat,
        res.stderr.R_H,
        tgt["R_H"],
        res.S_hat,
        res.stderr.S,
        tgt["S"],
        res.W_hat,
        res.stderr.W,
        tgt["W"],
        res.counts.hot_hot,
        res.counts.cold_cold,
        res.counts.hot_cold_unsafe,
        res.counts.hot_cold_safe,
    )
    path = out / "sim.csv"
    _write_csv(path, _SIM_HEADER, [row])
    print(f"backend = {res.backend}", file=sys.stderr)
    for name, est, se in (
        ("r", res.r_hat, res.stderr.r),
        ("R", res.R_hat, res.stderr.R),
        ("R_H", res.R_H_hat, res.stderr.R_H),
        ("S", res.S_hat, res.stderr.S),
        ("W", res.W_hat, res.stderr.W),
    ):
        print(
            f"{name}: {_fmt(est)} +/- {_fmt(se)}  (analytic {_fmt(tgt[name])})"
        )
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_figures(cfg: RunConfig, out: Path, svg: bool) -> int:
    tables = figure_tables(cfg.params, cfg.convention, cfg.grid)
    for table in tables:
        path = out / f"{table.name}.csv"
        _write_csv(path, table.header, table.rows, comments=table.comments)
        print(f"wrote {path}")
        if svg:
            svg_path = out / f"{table.name}.svg"
            svg_path.write_text(line_chart_svg(table), encoding="utf-8")
            print(f"wrote {svg_path}")
    return EXIT_OK


def run(command: str, cfg: RunConfig, svg: bool = False) -> int:
    """Dispatch one command against a merged RunConfig."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if command == "check":
        return _cmd_check(cfg, out)
    if command == "evaluate":
        return _cmd_evaluate(cfg, out)
    if command == "sweep":
        return _cmd_sweep(cfg, out)
    if command == "optimize":
        return _cmd_optimize(cfg, out)
    if command == "simulate":
        return _cmd_simulate(cfg, out)
    if command == "figures":
        return _cmd_figures(cfg, out, svg)
    raise ValueError(f"unknown command {command!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stigmagame",
        description="Testing-stigma policy analysis: equilibrium chain, "
        "welfare sweep, and agent-based cross-check.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, descr in (
        ("check", "print the assumption report"),
        ("evaluate", "print one sweep row at the configured tau_hat"),
        ("sweep", "write sweep.csv over a tau_hat grid"),
        ("optimize", "locate the welfare-maximizing tau_hat"),
        ("simulate", "run the agent-based cross-check, write sim.csv"),
        ("figures", "write fig1.csv..fig5.csv (and SVGs with --svg)"),
    ):
        sp = sub.add_parser(name, help=descr)
        sp.add_argument("--config", required=True, help="path to key=value config")
        sp.add_argument("--tau", type=float, default=None, help="override tau_hat")
        sp.add_argument("--grid", type=int, default=None, help="grid resolution")
        sp.add_argument("--tol", type=float, default=None, help="optimizer tolerance")
        sp.add_argument("--pairs", type=int, default=None, help="simulated pairs")
        sp.add_argument("--seed", type=int, default=None, help="simulation seed")
        sp.add_argument(
            "--convention",
            choices=("paper", "corrected"),
            default=None,
            help="population-B welfare bookkeeping",
        )
        sp.add_argument("--strict", action="store_true", help="fail on assumption 3")
        sp.add_argument("--out", default=None, help="output directory")
        if name == "figures":
            sp.add_argument("--svg", action="store_true", help="also render SVGs")
    return parser


def _merge_flags(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    updates = {}
    if args.convention is not None:
        updates["convention"] = (
            "paper_literal" if args.convention == "paper" else "corrected"
        )
    if args.grid is not None:
        if args.grid < 3:
            raise ConfigError(f"--grid must be >= 3, got {args.grid}")
        updates["grid"] = args.grid
    if args.tol is not None:
        if args.tol <= 0:
            raise ConfigError(f"--tol must be positive, got {args.tol}")
        updates["tol"] = args.tol
    if args.pairs is not None:
        if args.pairs < 1:
            raise ConfigError(f"--pairs must be >= 1, got {args.pairs}")
        updates["n_pairs"] = args.pairs
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError(f"--seed must fit in 64 unsigned bits, got {args.seed}")
        updates["seed"] = args.seed
    if args.tau is not None:
        if not 0.0 <= args.tau <= 1.0:
            raise ConfigError(f"--tau must lie in [0, 1], got {args.tau}")
        updates["tau"] = args.tau
    if args.out is not None:
        updates["out_dir"] = args.out
    if args.strict:
        updates["strict"] = True
    return replace(cfg, **updates) if updates else cfg


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        cfg = load_config(args.config)
        cfg = _merge_flags(cfg, args)
    except AssumptionViolation as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.strict:
        p = cfg.params
        a3 = p.c_h * (p.theta_H - p.theta_L) - (p.theta_H * p.v - p.c)
        if a3 <= 0.0:
            print(
                f"assumption 3 violated: continuation-gap margin = {a3!r}",
                file=sys.stderr,
            )
            return EXIT_ASSUMPTION
    try:
        return run(args.command, cfg, svg=getattr(args, "svg", False))
    except AssumptionViolation as exc:
        print(f"assumption failure: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except (QuadratureError, SweepError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        # e.g. tau_true != 0 rejected by the welfare preconditions
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
