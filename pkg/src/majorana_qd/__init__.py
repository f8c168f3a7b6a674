"""Open-system dynamics of a quantum dot coupled to Majorana or regular fermion pairs."""

from ._accel import backend
from .bath import (
    BathParams,
    MemoryCoefficients,
    advance_memory,
    correlation,
    correlation_quadrature,
    hurwitz_zeta,
    spectral_density,
)
from .fock import (
    ModelParams,
    OccupationState,
    Species,
    Spectrum,
    analytic_spectrum,
    build_hamiltonian,
    diagonalize,
    ladder_operator,
)
from .propagator import (
    DensityMatrix,
    InvariantBreach,
    JumpMatrices,
    StepTooCoarse,
    Trajectory,
    evolve,
    jump_matrices,
    master_rhs,
)
from .resources import (
    TwoBodyState,
    concurrence,
    l1_coherence,
    occupations,
    pair_resources,
    partial_trace_pair,
)
from .experiments import (
    ScenarioConfig,
    figure_preset,
    load_config,
    parse_config,
    preset_initial_state,
    run_scenario,
)

__all__ = [
    "BathParams",
    "DensityMatrix",
    "InvariantBreach",
    "JumpMatrices",
    "MemoryCoefficients",
    "ModelParams",
    "OccupationState",
    "ScenarioConfig",
    "Species",
    "Spectrum",
    "StepTooCoarse",
    "Trajectory",
    "TwoBodyState",
    "advance_memory",
    "analytic_spectrum",
    "backend",
    "build_hamiltonian",
    "concurrence",
    "correlation",
    "correlation_quadrature",
    "diagonalize",
    "evolve",
    "figure_preset",
    "hurwitz_zeta",
    "jump_matrices",
    "l1_coherence",
    "ladder_operator",
    "load_config",
    "master_rhs",
    "occupations",
    "pair_resources",
    "parse_config",
    "partial_trace_pair",
    "preset_initial_state",
    "run_scenario",
    "spectral_density",
]

__version__ = "0.1.0"
