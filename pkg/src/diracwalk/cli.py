"""Command-line front end.

`run <config>` executes one scenario from a flat key=value file and
writes the record CSV, density matrix (text and PGM), reference-ray CSV,
and a rendered report figure into the output directory.  `validate
<suite>` runs a property suite and reports each check.  Exit codes:
0 ok, 1 validation failure, 2 runtime error, 3 config error.
"""

import argparse
import math
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from . import __version__
from .engine import (
    EmptyComponentError,
    PacketSpec,
    PacketTooWideError,
    RecorderConfig,
    RunRecord,
    StepOptions,
    Walk,
    init_packet,
    write_density_pgm,
    write_density_txt,
    write_record_csv,
)
from .expr import ExpressionError, compile_expression
from .geometry import GaugeConditionError, MetricField, SignatureError
from .operators import COIN_VARIANTS, LatticeSpec, MixedSignError, SizeError
from .oracles import (
    characteristic_position,
    integrate_characteristic,
    write_oracle_csv,
)
from .validation import SUITES, run_suite

ENV_OUTPUT_DIR = "DIRACWALK_OUTPUT_DIR"

SCENARIOS = ("flat", "flat-hybrid", "gem", "custom-metric")
STRATEGIES = ("auto", "affine", "exponential")
TIME_SAMPLINGS = ("start", "midpoint")


class ParseError(ValueError):
    """Config file cannot be read into fields (syntax, key, or value)."""


class ValidationError(ValueError):
    """Config fields parsed but violate constraints; message lists all."""


@dataclass
class RunConfig:
    scenario: str = "gem"
    n_sites: int = 2048
    eps: float = 1.0
    steps: int = 50
    mass: float = 0.0
    g: float = -0.2
    p0: Optional[float] = None  # None -> center site n_sites/2
    sigma2: float = 300.0
    k0: float = 0.0
    mix: Tuple[complex, complex] = (0.0, 1.0)
    coin_variant: str = "rotation"
    unitarize_strategy: str = "auto"
    snapshot_cadence: int = 1
    output_dir: str = "out"
    rng_seed: int = 0
    time_sampling: str = "midpoint"
    dense_cap: int = 4096
    g00: Optional[str] = None
    g01: Optional[str] = None
    g11: Optional[str] = None

    def packet_center(self) -> float:
        return self.p0 if self.p0 is not None else self.n_sites / 2.0


def _parse_mix(text: str) -> Tuple[complex, complex]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError("expected two comma-separated amplitudes")
    return complex(parts[0].strip()), complex(parts[1].strip())


# config key -> (RunConfig attribute, converter)
_KEYS = {
    "scenario": ("scenario", str),
    "nSites": ("n_sites", int),
    "eps": ("eps", float),
    "steps": ("steps", int),
    "mass": ("mass", float),
    "g": ("g", float),
    "p0": ("p0", float),
    "sigma2": ("sigma2", float),
    "k0": ("k0", float),
    "mix": ("mix", _parse_mix),
    "coinVariant": ("coin_variant", str),
    "unitarizeStrategy": ("unitarize_strategy", str),
    "snapshotCadence": ("snapshot_cadence", int),
    "outputDir": ("output_dir", str),
    "rngSeed": ("rng_seed", int),
    "timeSampling": ("time_sampling", str),
    "denseCap": ("dense_cap", int),
    "g00": ("g00", str),
    "g01": ("g01", str),
    "g11": ("g11", str),
}


def parse_config(path) -> RunConfig:
    """Read a key=value file (one pair per line, # comments), fill
    defaults, and validate.  Raises ParseError on malformed lines or
    values, ValidationError listing every constraint violation."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from exc

    kwargs = {}
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ParseError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        if key not in _KEYS:
            raise ParseError(f"{path}:{lineno}: unknown key {key!r}")
        if key in seen:
            raise ParseError(
                f"{path}:{lineno}: duplicate key {key!r} (first set on line {seen[key]})")
        seen[key] = lineno
        attr, convert = _KEYS[key]
        try:
            kwargs[attr] = convert(value)
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc

    cfg = RunConfig(**kwargs)
    validate_config(cfg)
    return cfg


def validate_config(cfg: RunConfig) -> None:
    """Collect every violated constraint; raise once with the full list."""
    problems = []

    def check(ok: bool, message: str):
        if not ok:
            problems.append(message)

    check(cfg.scenario in SCENARIOS,
          f"scenario must be one of {', '.join(SCENARIOS)}; got {cfg.scenario!r}")
    check(cfg.n_sites >= 4, f"nSites must be >= 4; got {cfg.n_sites}")
    check(math.isfinite(cfg.eps) and cfg.eps > 0.0,
          f"eps must be finite and positive; got {cfg.eps}")
    check(cfg.steps >= 0, f"steps must be >= 0; got {cfg.steps}")
    for name, value in (("mass", cfg.mass), ("g", cfg.g), ("k0", cfg.k0),
                        ("sigma2", cfg.sigma2)):
        check(math.isfinite(value), f"{name} must be finite; got {value}")
    if cfg.p0 is not None:
        check(math.isfinite(cfg.p0), f"p0 must be finite; got {cfg.p0}")
    check(cfg.sigma2 >= 0.0, f"sigma2 must be >= 0; got {cfg.sigma2}")
    check(all(math.isfinite(a.real) and math.isfinite(a.imag) for a in cfg.mix)
          and sum(abs(a) ** 2 for a in cfg.mix) > 0.0,
          "mix must be two finite amplitudes with nonzero total weight")
    check(cfg.coin_variant in COIN_VARIANTS,
          f"coinVariant must be one of {', '.join(COIN_VARIANTS)}; "
          f"got {cfg.coin_variant!r}")
    check(cfg.unitarize_strategy in STRATEGIES,
          f"unitarizeStrategy must be one of {', '.join(STRATEGIES)}; "
          f"got {cfg.unitarize_strategy!r}")
    check(cfg.snapshot_cadence >= 1,
          f"snapshotCadence must be >= 1; got {cfg.snapshot_cadence}")
    check(cfg.dense_cap >= 1, f"denseCap must be >= 1; got {cfg.dense_cap}")
    check(cfg.time_sampling in TIME_SAMPLINGS,
          f"timeSampling must be one of {', '.join(TIME_SAMPLINGS)}; "
          f"got {cfg.time_sampling!r}")

    metric_keys = {"g00": cfg.g00, "g01": cfg.g01, "g11": cfg.g11}
    if cfg.scenario == "custom-metric":
        for name, expr in metric_keys.items():
            if expr is None:
                problems.append(f"scenario custom-metric requires {name}")
                continue
            try:
                compile_expression(expr)
            except ExpressionError as exc:
                problems.append(f"{name}: {exc}")
    else:
        for name, expr in metric_keys.items():
            check(expr is None, f"{name} is only meaningful for scenario custom-metric")

    if problems:
        raise ValidationError("\n".join(problems))


def _metric_and_strategy(cfg: RunConfig):
    if cfg.scenario == "flat":
        return MetricField.flat(), cfg.unitarize_strategy
    if cfg.scenario == "flat-hybrid":
        # showcase: affine shift on one component, spectral exponential on the other
        return MetricField.flat(), ("affine", "exponential")
    if cfg.scenario == "gem":
        return MetricField.gem(cfg.g), cfg.unitarize_strategy
    return MetricField.custom(cfg.g00, cfg.g01, cfg.g11), cfg.unitarize_strategy


def _reference_rays(cfg: RunConfig, metric: MetricField, record: RunRecord) -> None:
    x0s = np.arange(len(record.js), dtype=float) * cfg.eps
    x1_0 = cfg.packet_center() * cfg.eps
    if cfg.scenario == "custom-metric":
        plus = integrate_characteristic(metric, "plus", x0s, x1_0)
        minus = integrate_characteristic(metric, "minus", x0s, x1_0)
    else:
        g = cfg.g if cfg.scenario == "gem" else 0.0
        plus = characteristic_position("plus", g, x0s, x1_0)
        minus = characteristic_position("minus", g, x0s, x1_0)
    record.oracle_x0 = x0s
    record.oracle_plus = np.asarray(plus)
    record.oracle_minus = np.asarray(minus)


def run_scenario(cfg: RunConfig):
    """Execute one configured run; returns (record, list of files written)."""
    out_dir = Path(os.environ.get(ENV_OUTPUT_DIR) or cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    metric, strategy = _metric_and_strategy(cfg)
    lattice = LatticeSpec(n_sites=cfg.n_sites, eps=cfg.eps)
    options = StepOptions(coin_variant=cfg.coin_variant, strategy=strategy,
                          time_sampling=cfg.time_sampling,
                          dense_cap=cfg.dense_cap)
    state = init_packet(PacketSpec(p0=cfg.packet_center(), sigma2=cfg.sigma2,
                                   k0=cfg.k0, mix=cfg.mix), lattice)
    walk = Walk(metric, cfg.mass, lattice, options)
    record = walk.evolve(state, cfg.steps,
                         RecorderConfig(snapshot_cadence=cfg.snapshot_cadence))
    record.meta = {f.name: getattr(cfg, f.name) for f in fields(RunConfig)}
    _reference_rays(cfg, metric, record)

    written = []
    path = out_dir / "record.csv"
    write_record_csv(record, path)
    written.append(path)
    path = out_dir / "density.txt"
    write_density_txt(record, path)
    written.append(path)
    path = out_dir / "density.pgm"
    if write_density_pgm(record, path):
        written.append(path)
    path = out_dir / "oracle.csv"
    write_oracle_csv(record.oracle_x0, record.oracle_plus, record.oracle_minus, path)
    written.append(path)

    from .report import render_report  # deferred: pulls in matplotlib

    path = out_dir / "report.png"
    title = (f"{cfg.scenario}: N={cfg.n_sites}, eps={cfg.eps:g}, "
             f"steps={cfg.steps}, m={cfg.mass:g}")
    if cfg.scenario == "gem":
        title += f", g={cfg.g:g}"
    render_report(record, path, title=title)
    written.append(path)
    return record, written


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="diracwalk",
        description="unitary lattice walks for Dirac dynamics in curved "
                    "(1+1)D backgrounds",
        epilog=f"environment: {ENV_OUTPUT_DIR} overrides the configured "
               "output directory",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario from a config file")
    p_run.add_argument("config", help="key=value config file")

    p_val = sub.add_parser("validate", help="run a property suite")
    p_val.add_argument("suite", choices=sorted(SUITES) + ["all"])
    p_val.add_argument("--seed", type=int, default=0)

    sub.add_parser("version", help="print version and exit")
    return parser


def _cmd_run(args) -> int:
    try:
        cfg = parse_config(args.config)
    except (ParseError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    try:
        record, written = run_scenario(cfg)
    except (SignatureError, GaugeConditionError, MixedSignError, SizeError,
            PacketTooWideError, EmptyComponentError, ExpressionError,
            ValueError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    print(f"scenario {cfg.scenario}: {cfg.steps} steps on {cfg.n_sites} "
          f"sites (eps {cfg.eps:g})")
    print(f"norm drift {record.norm_drift():.3e}")
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_validate(args) -> int:
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    all_passed = True
    for name in names:
        report = run_suite(name, args.seed)
        for line in report.lines():
            print(line)
        all_passed = all_passed and report.passed
    return 0 if all_passed else 1


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except ParseError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    if args.command == "version":
        print(f"diracwalk {__version__}")
        return 0
    if args.command == "validate":
        return _cmd_validate(args)
    return _cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())
