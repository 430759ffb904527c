"""Banded advection stencils on a periodic lattice and the exactly
unitary step operators built from them.

A stencil L acts one-sidedly (upwind) on one spinor component.  The step
operator is either the affine form 1 + L, used only when it is exactly
unitary (pure shifts), or the exponential exp((L - L^dag)/2), which is
unitary for any coefficient field.  Site-independent coefficients admit a
Fourier-multiplier representation; site-dependent ones use a dense
eigendecomposition capped in size.
"""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np


class MixedSignError(ValueError):
    """Advection coefficients change sign across the lattice."""


class SizeError(ValueError):
    """Dense operator path requested beyond the configured size cap."""


COIN_ROTATION = "rotation"      # det +1, exponential of the mass generator
COIN_REFLECTION = "reflection"  # det -1, Hermitian involution
COIN_VARIANTS = (COIN_ROTATION, COIN_REFLECTION)

DENSE_CAP_DEFAULT = 4096
UNITARITY_TOL = 1e-12


@dataclass(frozen=True)
class LatticeSpec:
    """Periodic 1D lattice: site p carries coordinate x1 = p * eps."""

    n_sites: int
    eps: float

    def __post_init__(self):
        if self.n_sites < 4:
            raise ValueError("lattice needs at least 4 sites")
        if not (self.eps > 0.0):
            raise ValueError("eps must be positive")

    def sites(self) -> np.ndarray:
        return np.arange(self.n_sites)

    def coordinates(self) -> np.ndarray:
        return self.eps * np.arange(self.n_sites)

    def wavenumbers(self) -> np.ndarray:
        """Mode wavenumbers in fft ordering, k_n = 2*pi*n/N wrapped to (-pi, pi]."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_sites)


@dataclass(frozen=True)
class StencilOperator:
    """One-sided difference operator with per-site coefficients.

    forward:  (L f)_p = a_p (f_{p+1} - f_p)
    backward: (L f)_p = a_p (f_p - f_{p-1})
    """

    coeffs: np.ndarray
    direction: str
    lattice: LatticeSpec

    def apply(self, f: np.ndarray) -> np.ndarray:
        a = self.coeffs
        if self.direction == "forward":
            return a * (np.roll(f, -1) - f)
        return a * (f - np.roll(f, 1))

    def to_dense(self) -> np.ndarray:
        n = self.lattice.n_sites
        out = np.zeros((n, n))
        idx = np.arange(n)
        if self.direction == "forward":
            out[idx, idx] = -self.coeffs
            out[idx, (idx + 1) % n] = self.coeffs
        else:
            out[idx, idx] = self.coeffs
            out[idx, (idx - 1) % n] = -self.coeffs
        return out


def assemble_stencil(a_field, lattice: LatticeSpec) -> StencilOperator:
    """Build the upwind stencil for a coefficient field.

    Direction follows the sign of the field: forward when all a >= 0,
    backward when all a <= 0 (with at least one strictly negative entry).
    Fields mixing strict signs are rejected with MixedSignError.
    """
    a = np.broadcast_to(np.asarray(a_field, dtype=float), (lattice.n_sites,)).copy()
    if not np.all(np.isfinite(a)):
        raise ValueError("advection coefficients must be finite")
    if np.min(a) >= 0.0:
        direction = "forward"
    elif np.max(a) <= 0.0:
        direction = "backward"
    else:
        raise MixedSignError(
            "advection coefficients change sign across the lattice; "
            "split the problem or refine the metric"
        )
    return StencilOperator(coeffs=a, direction=direction, lattice=lattice)


@dataclass(frozen=True)
class SkewBandedOperator:
    """Real skew-symmetric operator with a single periodic band:
    (B f)_p = s_p f_{p+1} - s_{p-1} f_{p-1}."""

    super_coeffs: np.ndarray
    lattice: LatticeSpec

    def apply(self, f: np.ndarray) -> np.ndarray:
        s = self.super_coeffs
        return s * np.roll(f, -1) - np.roll(s, 1) * np.roll(f, 1)

    def to_dense(self) -> np.ndarray:
        n = self.lattice.n_sites
        out = np.zeros((n, n))
        idx = np.arange(n)
        out[idx, (idx + 1) % n] = self.super_coeffs
        out[(idx + 1) % n, idx] = -self.super_coeffs
        return out


def antisymmetrize(op: Union[StencilOperator, SkewBandedOperator, np.ndarray]):
    """Return (X - X^dag)/2.

    Stencils map to a SkewBandedOperator (the diagonal vanishes for real
    coefficients); dense arrays are handled generically; an already skew
    operator comes back unchanged.
    """
    if isinstance(op, SkewBandedOperator):
        return op
    if isinstance(op, np.ndarray):
        return 0.5 * (op - op.conj().T)
    a = op.coeffs
    if op.direction == "forward":
        s = 0.5 * a
    else:
        s = 0.5 * np.roll(a, -1)  # bond p..p+1 carries a_{p+1}
    return SkewBandedOperator(super_coeffs=s, lattice=op.lattice)


def affine_is_unitary(op: StencilOperator, tol: float = UNITARITY_TOL) -> bool:
    """Whether U = 1 + L satisfies ||U^dag U - 1||_inf < tol.

    Computed from the closed banded form of U^dag U; true exactly for the
    pure shifts (a = +1 forward, a = -1 backward) and the identity.
    """
    a = op.coeffs
    if op.direction == "forward":
        diag = np.abs(1.0 - a) ** 2 + np.roll(np.abs(a), 1) ** 2 - 1.0
        off = (1.0 - a) * a  # entry (q, q+1), conjugate mirrored below
        row = np.abs(diag) + np.abs(off) + np.abs(np.roll(off, 1))
    else:
        diag = np.abs(1.0 + a) ** 2 + np.roll(np.abs(a), -1) ** 2 - 1.0
        off = -(1.0 + a) * a  # entry (q, q-1)
        row = np.abs(diag) + np.abs(off) + np.abs(np.roll(off, -1))
    return float(np.max(row)) < tol


@dataclass(frozen=True)
class ShiftUnitary:
    """Unitary step operator for one spinor component.

    kind 'roll' applies a cyclic permutation (affine flavor), 'spectral'
    multiplies Fourier modes by a unit-modulus array, 'dense' applies an
    explicit matrix.
    """

    kind: str
    lattice: LatticeSpec
    flavor: str                      # 'affine' | 'exponential'
    shift: int = 0
    multiplier: Optional[np.ndarray] = None
    matrix: Optional[np.ndarray] = None

    def apply(self, f: np.ndarray) -> np.ndarray:
        if self.kind == "roll":
            return np.roll(f, self.shift) if self.shift else f.copy()
        if self.kind == "spectral":
            return np.fft.ifft(self.multiplier * np.fft.fft(f))
        return self.matrix @ f

    def to_dense(self) -> np.ndarray:
        n = self.lattice.n_sites
        if self.kind == "roll":
            return np.roll(np.eye(n), self.shift, axis=0)
        if self.kind == "dense":
            return self.matrix.copy()
        eye = np.eye(n, dtype=complex)
        return np.fft.ifft(self.multiplier[:, None] * np.fft.fft(eye, axis=0), axis=0)

    def unitarity_defect(self) -> float:
        """||U^dag U - 1||_inf for the stored representation."""
        if self.kind == "roll":
            return 0.0
        if self.kind == "spectral":
            return float(np.max(np.abs(np.abs(self.multiplier) ** 2 - 1.0)))
        gram = self.matrix.conj().T @ self.matrix - np.eye(self.lattice.n_sites)
        return float(np.max(np.sum(np.abs(gram), axis=1)))


def _roll_shortcut(op: StencilOperator) -> Optional[int]:
    a = op.coeffs
    if np.all(a == 0.0):
        return 0
    if op.direction == "forward" and np.all(a == 1.0):
        return -1
    if op.direction == "backward" and np.all(a == -1.0):
        return 1
    return None


def unitarize(
    op: StencilOperator,
    strategy: str = "auto",
    lattice: Optional[LatticeSpec] = None,
    dense_cap: int = DENSE_CAP_DEFAULT,
    force_dense: bool = False,
) -> ShiftUnitary:
    """Turn a stencil into an exactly unitary step operator.

    strategy 'affine' requires 1 + L to be unitary and applies it as the
    corresponding permutation; 'exponential' builds exp((L - L^dag)/2),
    with Fourier multipliers exp(i * a * sin k) when the coefficient is
    site-independent, else a dense eigendecomposition of the Hermitian
    i*(L - L^dag)/2 (SizeError beyond dense_cap); 'auto' prefers the
    affine form whenever it is admissible.
    """
    lat = op.lattice
    if lattice is not None and lattice != lat:
        raise ValueError("lattice does not match the stencil")

    if strategy not in ("auto", "affine", "exponential"):
        raise ValueError(f"unknown strategy {strategy!r}")

    if strategy in ("auto", "affine") and not force_dense:
        if affine_is_unitary(op):
            shift = _roll_shortcut(op)
            if shift is not None:
                return ShiftUnitary(kind="roll", lattice=lat, flavor="affine", shift=shift)
            # unitary within tolerance but not an exact permutation:
            # snap to the nearest pure shift
            shift = -1 if op.direction == "forward" else 1
            if np.max(np.abs(op.coeffs)) < 0.5:
                shift = 0
            return ShiftUnitary(kind="roll", lattice=lat, flavor="affine", shift=shift)
        if strategy == "affine":
            raise ValueError("affine step operator is not unitary for this stencil")

    a = op.coeffs
    site_independent = np.all(a == a[0])
    if site_independent and not force_dense:
        k = lat.wavenumbers()
        mult = np.exp(1j * a[0] * np.sin(k))
        return ShiftUnitary(kind="spectral", lattice=lat, flavor="exponential", multiplier=mult)

    if lat.n_sites > dense_cap:
        raise SizeError(
            f"dense exponential needs {lat.n_sites} sites but the cap is {dense_cap}"
        )
    skew = antisymmetrize(op)
    hermitian = 1j * skew.to_dense()
    w, vecs = np.linalg.eigh(hermitian)
    matrix = (vecs * np.exp(-1j * w)) @ vecs.conj().T
    return ShiftUnitary(kind="dense", lattice=lat, flavor="exponential", matrix=matrix)


def coin_matrix(theta: float, variant: str = COIN_ROTATION) -> np.ndarray:
    """Per-site 2x2 coin for mass angle theta.

    'rotation' is the exponential of the anti-Hermitian mass generator
    (determinant +1); 'reflection' is the Hermitian involution variant
    (determinant -1), gapless at k = 0.
    """
    c, s = np.cos(theta), np.sin(theta)
    if variant == COIN_ROTATION:
        return np.array([[c, -1j * s], [-1j * s, c]])
    if variant == COIN_REFLECTION:
        return np.array([[c, -1j * s], [1j * s, -c]])
    raise ValueError(f"unknown coin variant {variant!r}")


@dataclass(frozen=True)
class StepUnitary:
    """One full walk step: per-component shift unitaries followed by the
    site-wise coin with per-site mass angles."""

    u_minus: ShiftUnitary
    u_plus: ShiftUnitary
    coin_angles: np.ndarray
    coin_variant: str

    def apply(self, phi_minus: np.ndarray, phi_plus: np.ndarray):
        fm = self.u_minus.apply(phi_minus)
        fp = self.u_plus.apply(phi_plus)
        c = np.cos(self.coin_angles)
        s = np.sin(self.coin_angles)
        if self.coin_variant == COIN_ROTATION:
            return c * fm - 1j * s * fp, -1j * s * fm + c * fp
        return c * fm - 1j * s * fp, 1j * s * fm - c * fp

    def unitarity_defect(self) -> float:
        return max(self.u_minus.unitarity_defect(), self.u_plus.unitarity_defect())


def build_step_unitary(
    a_minus,
    a_plus,
    coin_angles,
    lattice: LatticeSpec,
    coin_variant: str = COIN_ROTATION,
    strategy="auto",
    dense_cap: int = DENSE_CAP_DEFAULT,
    force_dense: bool = False,
) -> StepUnitary:
    """Assemble the two upwind stencils and unitarize each component.

    strategy may be a single name or a (minus, plus) pair.
    """
    if coin_variant not in COIN_VARIANTS:
        raise ValueError(f"unknown coin variant {coin_variant!r}")
    if isinstance(strategy, str):
        s_minus = s_plus = strategy
    else:
        s_minus, s_plus = strategy
    angles = np.broadcast_to(np.asarray(coin_angles, dtype=float), (lattice.n_sites,))
    u_minus = unitarize(assemble_stencil(a_minus, lattice), s_minus,
                        dense_cap=dense_cap, force_dense=force_dense)
    u_plus = unitarize(assemble_stencil(a_plus, lattice), s_plus,
                       dense_cap=dense_cap, force_dense=force_dense)
    return StepUnitary(u_minus=u_minus, u_plus=u_plus,
                       coin_angles=angles.copy(), coin_variant=coin_variant)


def flat_step_symbol(k: float, eps: float, mass: float,
                     coin_variant: str = COIN_ROTATION) -> np.ndarray:
    """2x2 one-step matrix of the exponential-flavor flat walk at
    wavenumber k: coin(eps*mass) @ diag(exp(+i sin k), exp(-i sin k))."""
    s = np.sin(k)
    shifts = np.diag([np.exp(1j * s), np.exp(-1j * s)])
    return coin_matrix(eps * mass, coin_variant) @ shifts


def write_operator_txt(matrix: np.ndarray, path) -> None:
    """Diagnostic dump: one row per line, complex entries as 're im' pairs."""
    m = np.asarray(matrix, dtype=complex)
    with open(path, "w") as fh:
        for row in m:
            fh.write(" ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row))
            fh.write("\n")
