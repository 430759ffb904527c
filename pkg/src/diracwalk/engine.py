"""Two-component walk state, shift-then-coin time stepping, observables,
and run records with their serializers.

A step advances x0 by eps: each component is moved by its unitary shift
operator, then the site-wise coin mixes the components.  Operators are
derived from the metric at the current step and rebuilt every step unless
the metric is static.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np

from .geometry import MetricField, frame_at
from .operators import (
    COIN_ROTATION,
    DENSE_CAP_DEFAULT,
    LatticeSpec,
    StepUnitary,
    build_step_unitary,
)


class PacketTooWideError(ValueError):
    """Gaussian packet does not fit the periodic lattice."""


class EmptyComponentError(ValueError):
    """Observable requested for a component with (numerically) no weight."""


COMPONENT_NORM_FLOOR = 1e-12


@dataclass
class WalkState:
    """Lattice spinor at discrete time j (coordinate x0 = j * eps)."""

    j: int
    phi_minus: np.ndarray
    phi_plus: np.ndarray
    lattice: LatticeSpec

    def norm(self) -> float:
        return float(np.sum(np.abs(self.phi_minus) ** 2 + np.abs(self.phi_plus) ** 2))

    def component(self, name: str) -> np.ndarray:
        if name == "minus":
            return self.phi_minus
        if name == "plus":
            return self.phi_plus
        raise ValueError(f"unknown component {name!r}")


@dataclass(frozen=True)
class PacketSpec:
    """Gaussian wavepacket: center p0 (site units), density variance
    sigma2 (site^2; 0 requests a one-site delta), carrier k0, and the
    chirality amplitudes mix = (alpha_minus, alpha_plus)."""

    p0: float
    sigma2: float = 300.0
    k0: float = 0.0
    mix: tuple = (0.0, 1.0)


def init_packet(spec: PacketSpec, lattice: LatticeSpec) -> WalkState:
    """Build a unit-norm two-component packet on the lattice."""
    n = lattice.n_sites
    alpha = np.asarray(spec.mix, dtype=complex)
    if alpha.shape != (2,) or np.sum(np.abs(alpha) ** 2) == 0.0:
        raise ValueError("mix must be two amplitudes with nonzero total weight")
    alpha = alpha / np.sqrt(np.sum(np.abs(alpha) ** 2))

    if spec.sigma2 < 0.0:
        raise ValueError("sigma2 must be nonnegative")
    if spec.sigma2 == 0.0:
        center = int(round(spec.p0)) % n
        phi_m = np.zeros(n, dtype=complex)
        phi_p = np.zeros(n, dtype=complex)
        phi_m[center] = alpha[0]
        phi_p[center] = alpha[1]
        return WalkState(j=0, phi_minus=phi_m, phi_plus=phi_p, lattice=lattice)

    sigma = math.sqrt(spec.sigma2)
    if 3.0 * sigma >= n / 2.0:
        raise PacketTooWideError(
            f"packet with 3*sigma = {3.0 * sigma:.1f} sites does not fit "
            f"{n} periodic sites"
        )
    p = np.arange(n)
    d = (p - spec.p0 + n / 2.0) % n - n / 2.0  # nearest-image offset
    envelope = np.exp(-(d**2) / (4.0 * spec.sigma2)) * np.exp(1j * spec.k0 * p)
    envelope = envelope / np.sqrt(np.sum(np.abs(envelope) ** 2))
    return WalkState(
        j=0,
        phi_minus=alpha[0] * envelope,
        phi_plus=alpha[1] * envelope,
        lattice=lattice,
    )


def probability_density(state: WalkState) -> np.ndarray:
    """Per-site density |phi_minus|^2 + |phi_plus|^2."""
    return np.abs(state.phi_minus) ** 2 + np.abs(state.phi_plus) ** 2


def centroid(state: WalkState, component: str = "both",
             prev: Optional[float] = None) -> float:
    """Density centroid <x1> with periodic unwrapping.

    Site offsets are taken in the window centered on the previous centroid
    (coordinate units) when given, else on the density maximum, so the
    returned coordinate stays continuous across the periodic seam and may
    leave [0, n*eps).
    """
    if component == "both":
        w = probability_density(state)
    else:
        w = np.abs(state.component(component)) ** 2
    total = float(np.sum(w))
    if total <= COMPONENT_NORM_FLOOR:
        raise EmptyComponentError(f"component {component!r} carries no weight")
    n = state.lattice.n_sites
    eps = state.lattice.eps
    ref = prev / eps if prev is not None else float(np.argmax(w))
    offsets = (np.arange(n) - ref + n / 2.0) % n - n / 2.0
    return eps * (ref + float(offsets @ w) / total)


@dataclass(frozen=True)
class StepOptions:
    """Knobs for operator construction.

    strategy is 'auto' | 'affine' | 'exponential' or a (minus, plus) pair;
    time_sampling 'start' evaluates the metric at x0 = j*eps, 'midpoint'
    at x0 = (j + 1/2)*eps (second-order accurate for time-dependent
    metrics); force_dense requests the dense eigendecomposition even for
    site-independent coefficients.
    """

    coin_variant: str = COIN_ROTATION
    strategy: Union[str, tuple] = "auto"
    time_sampling: str = "start"
    dense_cap: int = DENSE_CAP_DEFAULT
    force_dense: bool = False

    def __post_init__(self):
        if self.time_sampling not in ("start", "midpoint"):
            raise ValueError(f"unknown time sampling {self.time_sampling!r}")


@dataclass(frozen=True)
class RecorderConfig:
    snapshot_cadence: int = 1
    keep_states: bool = False
    track_centroids: bool = True


@dataclass
class RunRecord:
    """Per-step observables plus density snapshots at the configured
    cadence.  Oracle trajectory columns are filled by the scenario layer
    when a reference curve exists."""

    lattice: LatticeSpec
    js: List[int] = field(default_factory=list)
    norms: List[float] = field(default_factory=list)
    centroid_minus: List[float] = field(default_factory=list)
    centroid_plus: List[float] = field(default_factory=list)
    snapshot_js: List[int] = field(default_factory=list)
    snapshots: List[np.ndarray] = field(default_factory=list)
    states: Optional[List[WalkState]] = None
    final_state: Optional[WalkState] = None
    meta: dict = field(default_factory=dict)
    oracle_x0: Optional[np.ndarray] = None
    oracle_plus: Optional[np.ndarray] = None
    oracle_minus: Optional[np.ndarray] = None

    def norm_drift(self) -> float:
        return float(np.max(np.abs(np.asarray(self.norms) - self.norms[0])))


class Walk:
    """Holds the metric, mass, lattice, and options; advances states.

    Step operators are cached when the metric is time-independent and
    rebuilt from the frame at the step's time sample otherwise.
    """

    def __init__(self, metric: MetricField, mass: float, lattice: LatticeSpec,
                 options: Optional[StepOptions] = None):
        self.metric = metric
        self.mass = float(mass)
        self.lattice = lattice
        self.options = options or StepOptions()
        self._cached: Optional[StepUnitary] = None

    def _time_sample(self, j: int) -> float:
        half = 0.5 if self.options.time_sampling == "midpoint" else 0.0
        return (j + half) * self.lattice.eps

    def step_unitary(self, j: int) -> StepUnitary:
        if self._cached is not None and self.metric.static:
            return self._cached
        frame = frame_at(self.metric, self._time_sample(j),
                         self.lattice.coordinates(), self.mass)
        op = build_step_unitary(
            a_minus=-frame.v_minus,
            a_plus=-frame.v_plus,
            coin_angles=self.lattice.eps * frame.mass_eff,
            lattice=self.lattice,
            coin_variant=self.options.coin_variant,
            strategy=self.options.strategy,
            dense_cap=self.options.dense_cap,
            force_dense=self.options.force_dense,
        )
        if self.metric.static:
            self._cached = op
        return op

    def step(self, state: WalkState) -> WalkState:
        op = self.step_unitary(state.j)
        phi_m, phi_p = op.apply(state.phi_minus, state.phi_plus)
        return WalkState(j=state.j + 1, phi_minus=phi_m, phi_plus=phi_p,
                         lattice=state.lattice)

    def evolve(self, state: WalkState, n_steps: int,
               recorder: Optional[RecorderConfig] = None) -> RunRecord:
        if n_steps < 0:
            raise ValueError("n_steps must be nonnegative")
        cfg = recorder or RecorderConfig()
        if cfg.snapshot_cadence < 1:
            raise ValueError("snapshot_cadence must be >= 1")
        record = RunRecord(lattice=state.lattice)
        if cfg.keep_states:
            record.states = [state]
        prev = {"minus": None, "plus": None}

        def observe(st: WalkState):
            record.js.append(st.j)
            record.norms.append(st.norm())
            if not cfg.track_centroids:
                record.centroid_minus.append(float("nan"))
                record.centroid_plus.append(float("nan"))
                return
            for name, column in (("minus", record.centroid_minus),
                                 ("plus", record.centroid_plus)):
                try:
                    value = centroid(st, name, prev=prev[name])
                except EmptyComponentError:
                    value = float("nan")
                else:
                    prev[name] = value
                column.append(value)

        observe(state)
        for _ in range(n_steps):
            state = self.step(state)
            observe(state)
            if state.j % cfg.snapshot_cadence == 0:
                record.snapshot_js.append(state.j)
                record.snapshots.append(probability_density(state))
            if cfg.keep_states:
                record.states.append(state)
        record.final_state = state
        return record


def step(state: WalkState, metric: MetricField, mass: float,
         options: Optional[StepOptions] = None) -> WalkState:
    """Advance one step (convenience wrapper around Walk)."""
    return Walk(metric, mass, state.lattice, options).step(state)


def evolve(state: WalkState, metric: MetricField, mass: float, n_steps: int,
           options: Optional[StepOptions] = None,
           recorder: Optional[RecorderConfig] = None) -> RunRecord:
    """Run n_steps with per-step operator refresh; returns the record."""
    return Walk(metric, mass, state.lattice, options).evolve(state, n_steps, recorder)


RECORD_HEADER = "# record-v1: j,norm,centroid_minus,centroid_plus"


def write_record_csv(record: RunRecord, path) -> None:
    with open(path, "w") as fh:
        fh.write(RECORD_HEADER + "\n")
        for j, norm, cm, cp in zip(record.js, record.norms,
                                   record.centroid_minus, record.centroid_plus):
            fh.write(f"{j:d},{norm:.17g},{cm:.17g},{cp:.17g}\n")


def write_density_txt(record: RunRecord, path) -> None:
    """Snapshot matrix, one time row per line, one column per site."""
    with open(path, "w") as fh:
        for row in record.snapshots:
            fh.write(" ".join(f"{v:.17g}" for v in row))
            fh.write("\n")


def write_density_pgm(record: RunRecord, path) -> bool:
    """8-bit binary PGM of the snapshot matrix, linearly scaled by the
    recorded maximum.  Returns False (and writes nothing) when the run
    recorded no snapshots."""
    if not record.snapshots:
        return False
    rows = np.asarray(record.snapshots)
    peak = float(rows.max())
    scale = 255.0 / peak if peak > 0.0 else 0.0
    img = np.rint(rows * scale).clip(0, 255).astype(np.uint8)
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(img.tobytes())
    return True
