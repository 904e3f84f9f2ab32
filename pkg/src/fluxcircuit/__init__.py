"""Flux-circuit spectra: three- and four-junction superconducting loops.

Build the circuit Hamiltonian in a truncated plane-wave basis, compute
energy spectra versus applied flux, extract qubit/qutrit parameters and
evaluate magnetic-dipole transition matrix elements and selection rules.
"""

from .analysis import (
    AdiabaticReport,
    LevelClassification,
    QubitParams,
    adiabatic_check,
    classify_levels,
    compare_two_level,
    extract_qubit,
    two_level_gap,
)
from .circuit import (
    PHI0,
    CircuitParams,
    OscillatorReport,
    PhasePoint,
    Regime,
    TransformCoefficients,
    Variant,
    WellReport,
    compute_transform,
    current_3j,
    current_4j,
    find_minima,
    map_phases,
    mass_matrix,
    oscillator_frequency,
    phase_star,
    potential,
    potential_3j,
    potential_4j,
)
from .spectrum import (
    BasisSpec,
    ConvergenceReport,
    Cube,
    Ellipsoid,
    HamiltonianOperator,
    SolverError,
    SpectrumResult,
    SweepTable,
    TransitionTable,
    assemble_current,
    assemble_hamiltonian,
    converge,
    eigensolve,
    enumerate_basis,
    solve_circuit,
    sweep_flux,
    sweep_transitions,
    transition_elements,
)

__version__ = "0.1.0"

__all__ = [
    "AdiabaticReport",
    "BasisSpec",
    "CircuitParams",
    "ConvergenceReport",
    "Cube",
    "Ellipsoid",
    "HamiltonianOperator",
    "LevelClassification",
    "OscillatorReport",
    "PHI0",
    "PhasePoint",
    "QubitParams",
    "Regime",
    "SolverError",
    "SpectrumResult",
    "SweepTable",
    "TransformCoefficients",
    "TransitionTable",
    "Variant",
    "WellReport",
    "adiabatic_check",
    "assemble_current",
    "assemble_hamiltonian",
    "classify_levels",
    "compare_two_level",
    "compute_transform",
    "converge",
    "current_3j",
    "current_4j",
    "eigensolve",
    "enumerate_basis",
    "extract_qubit",
    "find_minima",
    "map_phases",
    "mass_matrix",
    "oscillator_frequency",
    "phase_star",
    "potential",
    "potential_3j",
    "potential_4j",
    "solve_circuit",
    "sweep_flux",
    "sweep_transitions",
    "transition_elements",
    "two_level_gap",
    "__version__",
]
