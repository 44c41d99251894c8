"""Diffusive molecular-communication channels with fully-absorbing
spherical receivers.

Four ways to get absorbed-molecule counts, from fastest to slowest:
closed-form single-receiver analytics and a two-receiver reflection
series (`analytic`), a linear system for the eventual counts
(`asymptotic`), a coupled integral-equation solver for the full
transient (`volterra`), and a particle-based Monte Carlo reference
(`montecarlo`). `geometry` builds and validates the scenarios; `cli`
wraps everything in a batch front-end.
"""

from .analytic import (
    HittingKernel,
    SitoGeometry,
    cumulative_siso,
    hitting_rate,
    kernel_laplace,
    siso_asymptote,
    sito_asymptote,
    sito_series,
)
from .asymptotic import AsymptoticSolution, build_system, far_field_check, solve
from .errors import (
    ConfigError,
    ModelBreakdownWarning,
    NumericalError,
    TopologyError,
    UnderResolvedWarning,
)
from .geometry import (
    Point3,
    Receiver,
    Topology,
    build_mimo_scenario,
    build_sito_scenario,
    pair_distances,
    require_valid,
    validate,
)
from .montecarlo import McConfig, McEstimate, assign_absorption, simulate
from .volterra import (
    AbsorptionSeries,
    TimeGrid,
    convolve_step,
    recommended_dt,
    solve_transient,
)

__version__ = "0.1.0"

__all__ = [
    "AbsorptionSeries",
    "AsymptoticSolution",
    "ConfigError",
    "HittingKernel",
    "McConfig",
    "McEstimate",
    "ModelBreakdownWarning",
    "NumericalError",
    "Point3",
    "Receiver",
    "SitoGeometry",
    "TimeGrid",
    "Topology",
    "TopologyError",
    "UnderResolvedWarning",
    "assign_absorption",
    "build_mimo_scenario",
    "build_sito_scenario",
    "build_system",
    "convolve_step",
    "cumulative_siso",
    "far_field_check",
    "hitting_rate",
    "kernel_laplace",
    "pair_distances",
    "recommended_dt",
    "require_valid",
    "simulate",
    "sito_asymptote",
    "sito_series",
    "siso_asymptote",
    "solve",
    "solve_transient",
    "validate",
]
