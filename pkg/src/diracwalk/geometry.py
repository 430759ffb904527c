"""Continuum geometry layer for the walk construction.

Evaluates covariant (1+1)D metrics, inverts them, and derives everything
the lattice layer consumes: the volume factor S = sqrt(-det g_uv), the
advection velocities of the two spinor components, a zweibein in a fixed
boost gauge, and the position-dependent effective mass.  Also carries the
weak-field gravitoelectromagnetic potentials and their gauge freedom.

All operations are pure and broadcast over numpy arrays; a point is
(x0, x1) with x0 time-like and x1 space-like.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .expr import CompiledExpression, compile_expression


class SignatureError(ValueError):
    """Metric fails the required signature at a queried point."""


class GaugeConditionError(ValueError):
    """Gauge generator violates the wave-equation condition."""


@dataclass(frozen=True)
class MetricField:
    """Covariant metric coefficients as a field over (x0, x1).

    kind is one of 'flat', 'gem', 'custom'.  eval returns the covariant
    triple (g00, g01, g11); symmetry holds by construction since only a
    single off-diagonal coefficient is stored.
    """

    kind: str
    g: float = 0.0
    coeffs: Optional[tuple] = None  # custom: three callables (x0, x1) -> value
    static: bool = True

    @classmethod
    def flat(cls) -> "MetricField":
        return cls(kind="flat", static=True)

    @classmethod
    def gem(cls, g: float) -> "MetricField":
        """Uniform-field metric: g00 = 1, g01 = -2*g*x0, g11 = -1."""
        return cls(kind="gem", g=float(g), static=(g == 0.0))

    @classmethod
    def custom(cls, g00, g01, g11) -> "MetricField":
        """Coefficients given as expression strings or plain callables."""
        compiled = []
        uses_x0 = False
        for c in (g00, g01, g11):
            if isinstance(c, str):
                c = compile_expression(c)
            if isinstance(c, CompiledExpression):
                uses_x0 = uses_x0 or c.uses_x0
            else:
                uses_x0 = True  # opaque callable: assume time-dependent
            compiled.append(c)
        return cls(kind="custom", coeffs=tuple(compiled), static=not uses_x0)

    @classmethod
    def from_potentials(cls, potentials: "GemPotentials") -> "MetricField":
        """Weak-field metric induced by scalar/vector potentials:
        g00 = 1 - 2V, g01 = 2A, g11 = -(1 + 2V)."""
        V, A = potentials.V, potentials.A
        return cls.custom(
            lambda x0, x1: 1.0 - 2.0 * V.value(x0, x1),
            lambda x0, x1: 2.0 * A.value(x0, x1),
            lambda x0, x1: -(1.0 + 2.0 * V.value(x0, x1)),
        )

    def eval(self, x0, x1):
        """Covariant (g00, g01, g11) broadcast over the inputs."""
        x0a = np.asarray(x0, dtype=float)
        x1a = np.asarray(x1, dtype=float)
        shape = np.broadcast_shapes(x0a.shape, x1a.shape)
        if self.kind == "flat":
            one = np.ones(shape)
            return one, np.zeros(shape), -one
        if self.kind == "gem":
            one = np.ones(shape)
            g01 = np.broadcast_to(-2.0 * self.g * x0a, shape).astype(float)
            return one, g01, -one
        out = []
        for c in self.coeffs:
            v = np.asarray(c(x0a, x1a), dtype=float)
            out.append(np.broadcast_to(v, shape).astype(float))
        return tuple(out)


@dataclass
class GeometryFrame:
    """Derived point data: contravariant metric, volume factor, shift and
    lightcone speed, effective mass, boost-gauge zweibein components, and
    the two advection velocities.  Fields broadcast (scalars or arrays)."""

    x0: np.ndarray
    x1: np.ndarray
    g00: np.ndarray       # contravariant
    g01: np.ndarray
    g11: np.ndarray
    volume: np.ndarray    # S = sqrt(-det g_cov)
    shift: np.ndarray     # lambda = g01 / g00
    speed: np.ndarray     # c = 1 / (g00 * S) > 0
    mass_eff: np.ndarray  # m / sqrt(g00)
    sigma0: np.ndarray
    sigma1: np.ndarray
    delta0: np.ndarray
    delta1: np.ndarray
    v_minus: np.ndarray   # lambda - c < 0
    v_plus: np.ndarray    # lambda + c > 0


def _first_offender(mask, x0, x1):
    idx = np.unravel_index(np.argmax(mask), mask.shape) if mask.shape else ()
    p0 = np.broadcast_to(np.asarray(x0, float), mask.shape)[idx] if mask.shape else float(x0)
    p1 = np.broadcast_to(np.asarray(x1, float), mask.shape)[idx] if mask.shape else float(x1)
    return float(p0), float(p1)


def frame_at(metric: MetricField, x0, x1, mass: float = 0.0) -> GeometryFrame:
    """Evaluate the covariant metric at (x0, x1) and derive the frame.

    Raises SignatureError when the contravariant g00 is not positive,
    when det g_cov is not negative, or when the implied lightcone does
    not open around the x1 axis (v_minus < 0 < v_plus must hold).
    """
    c00, c01, c11 = metric.eval(x0, x1)
    det = c00 * c11 - c01 * c01

    # contravariant g00 = c11/det; its sign is checkable before dividing
    bad = (det >= 0.0) | (c11 * det <= 0.0)
    if np.any(bad):
        p0, p1 = _first_offender(np.asarray(bad), x0, x1)
        raise SignatureError(
            f"x0 must stay time-like: need contravariant g00 > 0 and "
            f"det g_cov < 0, violated at (x0={p0:g}, x1={p1:g})"
        )
    # brute-force 2x2 inversion of the covariant matrix
    g00 = c11 / det
    g01 = -c01 / det
    g11 = c00 / det
    if np.any(g11 >= 0.0):
        p0, p1 = _first_offender(np.asarray(g11 >= 0.0), x0, x1)
        raise SignatureError(
            f"x1 must stay space-like: need contravariant g11 < 0, "
            f"violated at (x0={p0:g}, x1={p1:g})"
        )

    volume = np.sqrt(-det)
    shift = g01 / g00
    speed = 1.0 / (g00 * volume)
    sqrt_g00 = np.sqrt(g00)
    v_minus = shift - speed
    v_plus = shift + speed
    frame = GeometryFrame(
        x0=np.asarray(x0, float),
        x1=np.asarray(x1, float),
        g00=g00, g01=g01, g11=g11,
        volume=volume,
        shift=shift,
        speed=speed,
        mass_eff=mass / sqrt_g00,
        sigma0=sqrt_g00,
        sigma1=sqrt_g00 * v_plus,
        delta0=sqrt_g00,
        delta1=sqrt_g00 * v_minus,
        v_minus=v_minus,
        v_plus=v_plus,
    )
    if np.any(v_minus >= 0.0) or np.any(v_plus <= 0.0):
        raise SignatureError("advection velocities must satisfy v_minus < 0 < v_plus")
    return frame


def zweibein_residual(frame: GeometryFrame) -> float:
    """Max deviation of the frame's zweibein from the three defining
    relations against the contravariant metric."""
    r1 = frame.sigma0 * frame.delta0 - frame.g00
    r2 = 0.5 * (frame.sigma0 * frame.delta1 + frame.sigma1 * frame.delta0) - frame.g01
    r3 = frame.sigma1 * frame.delta1 - frame.g11
    return float(max(np.max(np.abs(r1)), np.max(np.abs(r2)), np.max(np.abs(r3))))


def spinor_rescale(psi_minus, psi_plus, frame: GeometryFrame):
    """Map the raw spinor to the density-carrying components:
    phi_minus = sqrt(S * delta0) * psi_minus, phi_plus = sqrt(S * sigma0) * psi_plus."""
    fm = np.sqrt(frame.volume * frame.delta0)
    fp = np.sqrt(frame.volume * frame.sigma0)
    return fm * np.asarray(psi_minus), fp * np.asarray(psi_plus)


def spinor_unrescale(phi_minus, phi_plus, frame: GeometryFrame):
    """Inverse of spinor_rescale."""
    fm = np.sqrt(frame.volume * frame.delta0)
    fp = np.sqrt(frame.volume * frame.sigma0)
    return np.asarray(phi_minus) / fm, np.asarray(phi_plus) / fp


@dataclass(frozen=True)
class ScalarField:
    """Scalar function of (x0, x1) with optional analytic derivatives.

    Derivatives fall back to central finite differences when not given.
    """

    value: Callable
    d_dx0: Optional[Callable] = None
    d_dx1: Optional[Callable] = None
    fd_step: float = 1e-5

    def dx0(self, x0, x1):
        if self.d_dx0 is not None:
            return self.d_dx0(x0, x1)
        h = self.fd_step
        return (self.value(x0 + h, x1) - self.value(x0 - h, x1)) / (2.0 * h)

    def dx1(self, x0, x1):
        if self.d_dx1 is not None:
            return self.d_dx1(x0, x1)
        h = self.fd_step
        return (self.value(x0, x1 + h) - self.value(x0, x1 - h)) / (2.0 * h)


def _as_scalar_field(f) -> ScalarField:
    if isinstance(f, ScalarField):
        return f
    return ScalarField(value=f)


@dataclass(frozen=True)
class GemPotentials:
    """Weak-field potentials: scalar V and the x1 component of the vector
    potential A, both fields over (x0, x1)."""

    V: ScalarField
    A: ScalarField

    @classmethod
    def of(cls, V, A) -> "GemPotentials":
        return cls(V=_as_scalar_field(V), A=_as_scalar_field(A))


def _default_gauge_samples():
    pts = np.linspace(0.5, 9.5, 7)
    xx0, xx1 = np.meshgrid(pts, pts)
    return np.column_stack([xx0.ravel(), xx1.ravel()])


def gem_gauge_transform(
    potentials: GemPotentials,
    generator: ScalarField,
    samples: Optional[np.ndarray] = None,
    fd_step: float = 1e-3,
    tol: float = 1e-6,
) -> GemPotentials:
    """Apply the gauge map V -> V - dF/dx0, A -> A + dF/dx1.

    The generator F must satisfy the wave equation d2F/dx0^2 = d2F/dx1^2;
    this is verified by second-order finite differences of F at the sample
    points, and GaugeConditionError is raised when the residual exceeds tol.
    """
    F = generator
    if samples is None:
        samples = _default_gauge_samples()
    samples = np.asarray(samples, dtype=float)
    x0s, x1s = samples[:, 0], samples[:, 1]
    h = fd_step
    f0 = F.value(x0s, x1s)
    d2t = (F.value(x0s + h, x1s) - 2.0 * f0 + F.value(x0s - h, x1s)) / h**2
    d2x = (F.value(x0s, x1s + h) - 2.0 * f0 + F.value(x0s, x1s - h)) / h**2
    residual = np.max(np.abs(d2t - d2x))
    if residual > tol:
        raise GaugeConditionError(
            f"gauge generator is not harmonic: wave-operator residual "
            f"{residual:.3e} exceeds {tol:.1e}"
        )

    V, A = potentials.V, potentials.A
    new_v = ScalarField(value=lambda x0, x1: V.value(x0, x1) - F.dx0(x0, x1))
    new_a = ScalarField(value=lambda x0, x1: A.value(x0, x1) + F.dx1(x0, x1))
    return GemPotentials(V=new_v, A=new_a)


def field_strength(potentials: GemPotentials) -> Callable:
    """Gauge-invariant field strength -dV/dx1 - dA/dx0 as a callable."""
    V, A = potentials.V, potentials.A
    return lambda x0, x1: -V.dx1(x0, x1) - A.dx0(x0, x1)
