"""Exactly unitary quantum walks reproducing Dirac dynamics on curved
(1+1)D backgrounds: metric frames, one-sided stencils with unitarized
transport, a shift-then-coin engine, and independent analytic references.
"""

__version__ = "0.1.0"

from .geometry import (
    GaugeConditionError,
    GemPotentials,
    GeometryFrame,
    MetricField,
    ScalarField,
    SignatureError,
    field_strength,
    frame_at,
    gem_gauge_transform,
    spinor_rescale,
    spinor_unrescale,
    zweibein_residual,
)
from .operators import (
    COIN_REFLECTION,
    COIN_ROTATION,
    COIN_VARIANTS,
    LatticeSpec,
    MixedSignError,
    SizeError,
    SkewBandedOperator,
    StencilOperator,
    StepUnitary,
    affine_is_unitary,
    antisymmetrize,
    assemble_stencil,
    build_step_unitary,
    coin_matrix,
    flat_step_symbol,
    unitarize,
    write_operator_txt,
)
from .engine import (
    EmptyComponentError,
    PacketSpec,
    PacketTooWideError,
    RecorderConfig,
    RunRecord,
    StepOptions,
    Walk,
    WalkState,
    centroid,
    evolve,
    init_packet,
    probability_density,
    step,
    write_density_pgm,
    write_density_txt,
    write_record_csv,
)
from .oracles import (
    CharacteristicCurve,
    ConfigMismatchError,
    FourierState,
    characteristic_position,
    characteristic_velocity,
    dispersion_omega,
    evolve_fourier,
    gem_fourier_step,
    integrate_characteristic,
    lattice_vs_fourier,
    write_oracle_csv,
)
from .validation import CheckResult, SuiteReport, run_suite

__all__ = [
    "__version__",
    # geometry
    "GaugeConditionError", "GemPotentials", "GeometryFrame", "MetricField",
    "ScalarField", "SignatureError", "field_strength", "frame_at",
    "gem_gauge_transform", "spinor_rescale", "spinor_unrescale",
    "zweibein_residual",
    # operators
    "COIN_REFLECTION", "COIN_ROTATION", "COIN_VARIANTS", "LatticeSpec",
    "MixedSignError", "SizeError", "SkewBandedOperator", "StencilOperator",
    "StepUnitary", "affine_is_unitary", "antisymmetrize", "assemble_stencil",
    "build_step_unitary", "coin_matrix", "flat_step_symbol", "unitarize",
    "write_operator_txt",
    # engine
    "EmptyComponentError", "PacketSpec", "PacketTooWideError",
    "RecorderConfig", "RunRecord", "StepOptions", "Walk", "WalkState",
    "centroid", "evolve", "init_packet", "probability_density", "step",
    "write_density_pgm", "write_density_txt", "write_record_csv",
    # oracles
    "CharacteristicCurve", "ConfigMismatchError", "FourierState",
    "characteristic_position", "characteristic_velocity", "dispersion_omega",
    "evolve_fourier", "gem_fourier_step", "integrate_characteristic",
    "lattice_vs_fourier", "write_oracle_csv",
    # validation
    "CheckResult", "SuiteReport", "run_suite",
]
