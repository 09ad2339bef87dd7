"""Damped string with a point damper: transfer functions, norms, sweeps."""

from ._wavedamp import (
    Damper,
    Error,
    FeedthroughNonzero,
    InvalidArgument,
    InvalidGrid,
    LimitCase,
    NoConvergence,
    NormConfig,
    NormDiverged,
    PoleEncountered,
    SecondOrderSystem,
    SingularPencil,
    SingularPoint,
    StringParams,
    TailDecay,
    UnstableSystem,
    boundary_h,
    convergence_study,
    default_norm_config,
    discrete_h2_lyapunov,
    discrete_tf,
    discretize,
    displacement_g,
    limit_h,
    minimize,
    norm,
    output_h,
    sweep,
    uniform_h,
)

__version__ = "1.0.0"
