"""Independent references the lattice evolution is checked against.

Three families: a Fourier-space evolution for the uniform-boost metric
(exact per-mode 2x2 updates, no position-space stencils), closed-form
null characteristics of that metric, and the one-step dispersion relation
of the flat walk.  None of these share code with the stencil pipeline.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .engine import WalkState
from .operators import COIN_REFLECTION, COIN_ROTATION, LatticeSpec


class ConfigMismatchError(ValueError):
    """Two state sequences do not describe the same run."""


@dataclass
class FourierState:
    """Mode amplitudes of a walk state (orthonormal FFT convention, so
    sum |hat|^2 equals the position-space norm)."""

    j: int
    hat_minus: np.ndarray
    hat_plus: np.ndarray
    lattice: LatticeSpec

    @classmethod
    def from_state(cls, state: WalkState) -> "FourierState":
        return cls(
            j=state.j,
            hat_minus=np.fft.fft(state.phi_minus, norm="ortho"),
            hat_plus=np.fft.fft(state.phi_plus, norm="ortho"),
            lattice=state.lattice,
        )

    def to_state(self) -> WalkState:
        return WalkState(
            j=self.j,
            phi_minus=np.fft.ifft(self.hat_minus, norm="ortho"),
            phi_plus=np.fft.ifft(self.hat_plus, norm="ortho"),
            lattice=self.lattice,
        )


def gem_fourier_step(fstate: FourierState, g: float, mass: float,
                     coin_variant: str = COIN_ROTATION,
                     time_sampling: str = "start") -> FourierState:
    """One exact step of the uniform-boost walk, mode by mode.

    The boost rapidity at the step's time sample fixes both component
    phase velocities (e^{rapidity} and e^{-rapidity}) and the coin angle
    eps*m*cosh(rapidity); each mode k picks up exp(+-i a sin k) before
    the coin mixes the pair.
    """
    eps = fstate.lattice.eps
    half = 0.5 if time_sampling == "midpoint" else 0.0
    x0 = (fstate.j + half) * eps
    rapidity = math.asinh(2.0 * g * x0)
    k = fstate.lattice.wavenumbers()
    sink = np.sin(k)
    u_minus = np.exp(1j * math.exp(rapidity) * sink)
    u_plus = np.exp(-1j * math.exp(-rapidity) * sink)
    theta_m = eps * mass * math.cosh(rapidity)
    c, s = math.cos(theta_m), math.sin(theta_m)

    fm = u_minus * fstate.hat_minus
    fp = u_plus * fstate.hat_plus
    if coin_variant == COIN_ROTATION:
        new_minus = c * fm - 1j * s * fp
        new_plus = -1j * s * fm + c * fp
    elif coin_variant == COIN_REFLECTION:
        new_minus = c * fm - 1j * s * fp
        new_plus = 1j * s * fm - c * fp
    else:
        raise ValueError(f"unknown coin variant {coin_variant!r}")
    return FourierState(j=fstate.j + 1, hat_minus=new_minus,
                        hat_plus=new_plus, lattice=fstate.lattice)


def evolve_fourier(state: WalkState, n_steps: int, g: float, mass: float,
                   coin_variant: str = COIN_ROTATION,
                   time_sampling: str = "start") -> List[WalkState]:
    """Evolve in Fourier space; returns the position-space state at every
    step, initial state included (n_steps + 1 entries)."""
    fstate = FourierState.from_state(state)
    out = [fstate.to_state()]
    for _ in range(n_steps):
        fstate = gem_fourier_step(fstate, g, mass, coin_variant, time_sampling)
        out.append(fstate.to_state())
    return out


def characteristic_velocity(branch: str, g: float, x0):
    """Coordinate velocity dx1/dx0 of the null ray at time x0."""
    x0 = np.asarray(x0, dtype=float)
    rapidity = np.arcsinh(2.0 * g * x0)
    if branch == "plus":
        v = np.exp(-rapidity)
    elif branch == "minus":
        v = -np.exp(rapidity)
    else:
        raise ValueError(f"unknown branch {branch!r}")
    return v if v.shape else float(v)


def characteristic_position(branch: str, g: float, x0, x1_0: float = 0.0):
    """Closed-form null ray x1(x0) through (0, x1_0).

    Antiderivatives of exp(-+arcsinh(2 g x0)); written with expm1 so the
    g -> 0 limit degrades gracefully to the flat rays x1_0 +- x0.
    """
    x0 = np.asarray(x0, dtype=float)
    if branch not in ("plus", "minus"):
        raise ValueError(f"unknown branch {branch!r}")
    if g == 0.0:
        out = x1_0 + x0 if branch == "plus" else x1_0 - x0
        return out if out.shape else float(out)
    rapidity = np.arcsinh(2.0 * g * x0)
    if branch == "plus":
        out = x1_0 + (rapidity - np.expm1(-2.0 * rapidity) / 2.0) / (4.0 * g)
    else:
        out = x1_0 - (rapidity + np.expm1(2.0 * rapidity) / 2.0) / (4.0 * g)
    return out if out.shape else float(out)


@dataclass(frozen=True)
class CharacteristicCurve:
    """Null ray of the uniform-boost metric through (x0=0, x1=x1_0)."""

    branch: str
    g: float
    x1_0: float = 0.0

    def position(self, x0):
        return characteristic_position(self.branch, self.g, x0, self.x1_0)

    def velocity(self, x0):
        return characteristic_velocity(self.branch, self.g, x0)


def integrate_characteristic(metric, branch: str, x0s, x1_0: float = 0.0,
                             substeps: int = 8) -> np.ndarray:
    """Null ray for metrics without closed forms: classic fourth-order
    Runge-Kutta on dx1/dx0 = v_branch(x0, x1), the cone velocity read off
    the frame decomposition at each sample point."""
    from .geometry import frame_at

    if branch not in ("plus", "minus"):
        raise ValueError(f"unknown branch {branch!r}")
    x0s = np.asarray(x0s, dtype=float)

    def vel(t: float, x: float) -> float:
        frame = frame_at(metric, t, np.array([x]))
        v = frame.v_plus if branch == "plus" else frame.v_minus
        return float(v[0])

    out = np.empty(x0s.shape)
    x = float(x1_0)
    t = float(x0s[0])
    out[0] = x
    for i in range(1, len(x0s)):
        h = (float(x0s[i]) - t) / substeps
        for _ in range(substeps):
            k1 = vel(t, x)
            k2 = vel(t + h / 2.0, x + h * k1 / 2.0)
            k3 = vel(t + h / 2.0, x + h * k2 / 2.0)
            k4 = vel(t + h, x + h * k3)
            x += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
            t += h
        out[i] = x
    return out


def dispersion_omega(k: float, theta_m: float,
                     coin_variant: str = COIN_ROTATION) -> np.ndarray:
    """Both one-step eigenphases of the flat walk at wavenumber k,
    sorted ascending in (-pi, pi]."""
    sink = math.sin(k)
    if coin_variant == COIN_ROTATION:
        omega = math.acos(min(1.0, max(-1.0, math.cos(theta_m) * math.cos(sink))))
        return np.array(sorted((-omega, omega)))
    if coin_variant == COIN_REFLECTION:
        # trace 2i cos(theta_m) sin(sin k), determinant -1
        c_sin = math.cos(theta_m) * math.sin(sink)
        root = math.sqrt(max(0.0, 1.0 - c_sin * c_sin))
        mu = 1j * c_sin + np.array([root, -root])
        return np.sort(np.angle(mu))
    raise ValueError(f"unknown coin variant {coin_variant!r}")


def lattice_vs_fourier(states_a: Sequence[WalkState],
                       states_b: Sequence[WalkState]) -> float:
    """Largest per-site amplitude deviation between two state sequences.

    The sequences must agree in length, lattice, and step indices;
    anything else is a configuration error, not a deviation."""
    if len(states_a) != len(states_b):
        raise ConfigMismatchError(
            f"sequence lengths differ: {len(states_a)} vs {len(states_b)}")
    worst = 0.0
    for sa, sb in zip(states_a, states_b):
        if sa.lattice != sb.lattice:
            raise ConfigMismatchError("lattices differ between sequences")
        if sa.j != sb.j:
            raise ConfigMismatchError(f"step indices differ: {sa.j} vs {sb.j}")
        worst = max(
            worst,
            float(np.max(np.abs(sa.phi_minus - sb.phi_minus))),
            float(np.max(np.abs(sa.phi_plus - sb.phi_plus))),
        )
    return worst


ORACLE_HEADER = "# oracle-v1: x0,x1_plus,x1_minus"


def write_oracle_csv(x0s, x1_plus, x1_minus, path) -> None:
    with open(path, "w") as fh:
        fh.write(ORACLE_HEADER + "\n")
        for t, xp, xm in zip(np.asarray(x0s), np.asarray(x1_plus),
                             np.asarray(x1_minus)):
            fh.write(f"{t:.17g},{xp:.17g},{xm:.17g}\n")
