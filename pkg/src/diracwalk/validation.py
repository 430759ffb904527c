"""Self-contained validation suites behind the `validate` subcommand.

Each suite runs a handful of named checks with explicit numeric bounds
and reports measured values, so a failure message carries enough to
diagnose without rerunning.  Random draws are seeded; suites accept the
seed from the CLI.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List

import numpy as np

from .engine import (
    PacketSpec,
    RecorderConfig,
    StepOptions,
    Walk,
    centroid,
    init_packet,
)
from .geometry import (
    GemPotentials,
    MetricField,
    ScalarField,
    SignatureError,
    field_strength,
    frame_at,
    gem_gauge_transform,
    zweibein_residual,
)
from .operators import (
    COIN_REFLECTION,
    COIN_ROTATION,
    LatticeSpec,
    build_step_unitary,
    flat_step_symbol,
)
from .oracles import (
    characteristic_position,
    characteristic_velocity,
    dispersion_omega,
    evolve_fourier,
    lattice_vs_fourier,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    bound: float
    passed: bool

    def line(self) -> str:
        tag = "pass" if self.passed else "FAIL"
        return f"[{tag}] {self.name}: {self.value:.3e} (bound {self.bound:.3e})"


@dataclass
class SuiteReport:
    suite: str
    seed: int
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, value: float, bound: float) -> None:
        self.checks.append(CheckResult(name, float(value), float(bound),
                                       float(value) <= float(bound)))

    def lines(self) -> List[str]:
        out = [f"suite {self.suite} (seed {self.seed})"]
        out.extend("  " + c.line() for c in self.checks)
        verdict = "passed" if self.passed else "FAILED"
        out.append(f"suite {self.suite}: {verdict} "
                   f"({sum(c.passed for c in self.checks)}/{len(self.checks)} checks)")
        return out


def _random_frame_inputs(rng: np.random.Generator):
    """Covariant metric built from a random valid frame decomposition, so
    signature and causal-cone conditions hold by construction."""
    s0 = rng.uniform(0.2, 3.0)
    d0 = rng.uniform(0.2, 3.0)
    s1 = rng.uniform(0.05, 3.0) * s0
    d1 = -rng.uniform(0.05, 3.0) * d0
    g00_con = s0 * d0
    g01_con = 0.5 * (s0 * d1 + s1 * d0)
    g11_con = s1 * d1
    det_con = g00_con * g11_con - g01_con**2
    # invert back to covariant entries for MetricField.custom
    g00 = g11_con / det_con
    g01 = -g01_con / det_con
    g11 = g00_con / det_con
    return g00, g01, g11


def suite_unitarity(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("unitarity", seed)
    rng = np.random.default_rng(seed)
    lattice = LatticeSpec(n_sites=64, eps=1.0)

    worst = 0.0
    for _ in range(100):
        a_minus = rng.uniform(0.05, 2.5, lattice.n_sites)
        a_plus = -rng.uniform(0.05, 2.5, lattice.n_sites)
        op = build_step_unitary(a_minus, a_plus, rng.uniform(-1.0, 1.0),
                                lattice, strategy="exponential",
                                force_dense=True)
        worst = max(worst, op.unitarity_defect())
    rep.add("dense exponential Gram defect (100 random operators)", worst, 1e-12)

    worst = 0.0
    for _ in range(20):
        a = float(rng.uniform(-2.5, 2.5))
        op = build_step_unitary(np.full(lattice.n_sites, a),
                                np.full(lattice.n_sites, -abs(a) - 0.1),
                                0.3, lattice, strategy="exponential")
        worst = max(worst, op.unitarity_defect())
    rep.add("spectral multiplier modulus defect (20 draws)", worst, 1e-12)

    op = build_step_unitary(np.ones(lattice.n_sites), -np.ones(lattice.n_sites),
                            0.0, lattice, strategy="affine")
    rep.add("unit-speed affine path is an exact shift", op.unitarity_defect(), 0.0)

    walk = Walk(MetricField.gem(-0.2), 0.4, LatticeSpec(256, 1.0),
                StepOptions(strategy="exponential"))
    state = init_packet(PacketSpec(p0=128.0, sigma2=40.0), walk.lattice)
    record = walk.evolve(state, 200)
    rep.add("norm drift over 200 boosted steps", record.norm_drift(), 1e-12)
    return rep


def suite_dispersion(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("dispersion", seed)
    rng = np.random.default_rng(seed)

    worst = {COIN_ROTATION: 0.0, COIN_REFLECTION: 0.0}
    for _ in range(25):
        k = float(rng.uniform(-math.pi, math.pi))
        theta_m = float(rng.uniform(0.0, 1.2))
        for variant in worst:
            symbol = flat_step_symbol(k, 1.0, theta_m, variant)
            measured = np.sort(np.angle(np.linalg.eigvals(symbol)))
            predicted = dispersion_omega(k, theta_m, variant)
            worst[variant] = max(worst[variant],
                                 float(np.max(np.abs(measured - predicted))))
    rep.add("closed-form eigenphases vs 2x2 symbol (25 draws, mass coin)",
            worst[COIN_ROTATION], 1e-12)
    rep.add("closed-form eigenphases vs 2x2 symbol (25 draws, flip coin)",
            worst[COIN_REFLECTION], 1e-12)

    kappa, mass = 3.0, 1.0
    continuum = math.sqrt(kappa**2 + mass**2)
    errors = []
    for eps in (0.05, 0.025, 0.0125):
        omega = float(dispersion_omega(kappa * eps, mass * eps)[-1]) / eps
        errors.append(abs(omega - continuum))
    rep.add("dispersion error at eps=0.05 (relative)",
            errors[0] / continuum, 0.01)
    ratios = np.array([errors[0] / errors[1], errors[1] / errors[2]])
    rep.add("second-order convergence (|ratio - 4| over two halvings)",
            float(np.max(np.abs(ratios - 4.0))), 1.0)
    return rep


def suite_geometry(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("geometry", seed)
    rng = np.random.default_rng(seed)

    worst_residual = 0.0
    worst_cone = 0.0
    for _ in range(1000):
        g00, g01, g11 = _random_frame_inputs(rng)
        metric = MetricField.custom(lambda x0, x1, a=g00: a + 0.0 * x1,
                                    lambda x0, x1, b=g01: b + 0.0 * x1,
                                    lambda x0, x1, c=g11: c + 0.0 * x1)
        frame = frame_at(metric, 0.0, np.array([0.0]))
        worst_residual = max(worst_residual, zweibein_residual(frame))
        worst_cone = max(worst_cone, float(np.max(frame.v_minus)),
                         float(np.max(-frame.v_plus)))
    rep.add("frame decomposition residual (1000 random valid metrics)",
            worst_residual, 1e-12)
    rep.add("light-cone orientation (max of v_minus and -v_plus)",
            worst_cone, 0.0)

    worst = 0.0
    for _ in range(25):
        g = float(rng.uniform(-0.5, 0.5))
        x0 = float(rng.uniform(0.0, 20.0))
        frame = frame_at(MetricField.gem(g), x0, np.array([0.0]), mass=0.7)
        rapidity = math.asinh(2.0 * g * x0)
        worst = max(
            worst,
            abs(float(frame.volume[0]) - math.cosh(rapidity)),
            abs(float(frame.shift[0]) + math.sinh(rapidity)),
            abs(float(frame.mass_eff[0]) - 0.7 * math.cosh(rapidity)),
        )
    rep.add("uniform-boost closed forms (25 draws)", worst, 1e-12)

    try:
        frame_at(MetricField.custom("-1", "0", "-1"), 0.0, np.array([0.0]))
        rep.add("time-like signature guard trips", 1.0, 0.0)
    except SignatureError:
        rep.add("time-like signature guard trips", 0.0, 0.0)

    g = -0.3
    pots = GemPotentials.of(lambda x0, x1: -g * np.asarray(x1),
                            lambda x0, x1: 0.0 * np.asarray(x1))
    gen = ScalarField(
        value=lambda x0, x1: -g * np.asarray(x0) * np.asarray(x1),
        d_dx0=lambda x0, x1: -g * np.asarray(x1) + 0.0 * np.asarray(x0),
        d_dx1=lambda x0, x1: -g * np.asarray(x0) + 0.0 * np.asarray(x1),
    )
    moved = gem_gauge_transform(pots, gen)
    before, after = field_strength(pots), field_strength(moved)
    worst = 0.0
    for _ in range(20):
        x0 = float(rng.uniform(0.0, 10.0))
        x1 = float(rng.uniform(-10.0, 10.0))
        worst = max(worst,
                    abs(float(moved.V.value(x0, x1))),
                    abs(float(moved.A.value(x0, x1)) + g * x0),
                    abs(float(before(x0, x1)) - float(after(x0, x1))))
    rep.add("gauge shift to pure vector potential (20 sample points)",
            worst, 1e-9)
    return rep


def _simpson(y: np.ndarray, x: np.ndarray) -> float:
    """Composite Simpson rule on a uniform grid with an odd point count."""
    n = len(x) - 1
    if n % 2 != 0:
        raise ValueError("need an even number of intervals")
    h = (x[-1] - x[0]) / n
    return float(h / 3.0 * (y[0] + y[-1] + 4.0 * np.sum(y[1:-1:2])
                            + 2.0 * np.sum(y[2:-2:2])))


def suite_oracle(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("oracle", seed)
    rng = np.random.default_rng(seed)
    lattice = LatticeSpec(n_sites=128, eps=1.0)
    g, mass = -0.15, 0.35

    worst = 0.0
    for variant in (COIN_ROTATION, COIN_REFLECTION):
        state = init_packet(PacketSpec(p0=64.0, sigma2=30.0, k0=0.4,
                                       mix=(0.6, 0.8j)), lattice)
        walk = Walk(MetricField.gem(g), mass, lattice,
                    StepOptions(coin_variant=variant, strategy="exponential"))
        record = walk.evolve(state, 40, RecorderConfig(keep_states=True,
                                                       track_centroids=False))
        reference = evolve_fourier(state, 40, g, mass, coin_variant=variant)
        worst = max(worst, lattice_vs_fourier(record.states, reference))
    rep.add("stencil walk vs per-mode reference (40 boosted steps)",
            worst, 1e-10)

    worst = 0.0
    for _ in range(10):
        gg = float(rng.uniform(-0.4, 0.4))
        horizon = float(rng.uniform(5.0, 30.0))
        grid = np.linspace(0.0, horizon, 2001)
        for branch in ("plus", "minus"):
            quad = _simpson(characteristic_velocity(branch, gg, grid), grid)
            closed = characteristic_position(branch, gg, horizon)
            worst = max(worst, abs(quad - closed) / max(1.0, abs(closed)))
    rep.add("closed-form rays vs velocity quadrature (10 draws)", worst, 1e-6)

    # leading boost correction shifts both rays by -g*x0^2
    tiny, horizon = 1e-8, 40.0
    shift = -tiny * horizon**2
    drift = max(
        abs(characteristic_position("plus", tiny, horizon) - (horizon + shift)),
        abs(characteristic_position("minus", tiny, horizon) - (-horizon + shift)))
    rep.add("weak-boost rays match the first-order expansion", drift, 1e-9)

    state = init_packet(PacketSpec(p0=64.0, sigma2=0.0, mix=(1.0, 0.0)), lattice)
    walk = Walk(MetricField.flat(), 0.0, lattice, StepOptions(strategy="affine"))
    for _ in range(5):
        state = walk.step(state)
    rep.add("delta transport lands on the exact site",
            abs(centroid(state, "minus") - (64.0 - 5.0) * lattice.eps), 0.0)
    return rep


SUITES: Dict[str, Callable[[int], SuiteReport]] = {
    "unitarity": suite_unitarity,
    "dispersion": suite_dispersion,
    "geometry": suite_geometry,
    "oracle": suite_oracle,
}


def run_suite(name: str, seed: int = 0) -> SuiteReport:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of "
                         f"{', '.join(sorted(SUITES))}")
    return SUITES[name](seed)
