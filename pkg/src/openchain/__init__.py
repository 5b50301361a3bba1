"""openchain: excitation transport and clocked computation on disordered chains.

Closed-system propagation is exact (spectral decomposition); open-system
dynamics uses nearest-level thermal jump rates in the energy eigenbasis, with
populations advanced by the matrix exponential of the classical master
equation and coherences by their closed-form decay.
"""

__version__ = "0.1.0"

from .chains import (
    ChainSpec,
    DisorderRealization,
    EigenSystem,
    HamiltonianOperator,
    PotentialProfile,
    assemble_hamiltonian,
    build_chain_hamiltonian,
    build_free_chain,
    build_linear_potential,
    diagonalize,
    free_eigensystem,
    localization_length_bloch,
    localization_length_gaussian,
    participation_ratio,
    sample_disorder,
)
from .config import ConfigError, ExperimentConfig, load_config, validate_config
from .feynman import (
    BlockDensity,
    CircuitLayout,
    PathCoordinateMap,
    PeresBasis,
    bell_fidelity,
    build_cnot_layout,
    check_subspace_conservation,
    coordinate_map,
    peres_basis,
    reduced_chain_hamiltonian,
    register_reduced_state,
    run_classical_input,
    run_superposed_input,
    von_neumann_entropy,
)
from .lindblad import (
    BathSpec,
    DegenerateGapError,
    EnergyRepDensity,
    TransitionRates,
    density_observables,
    dissipative_transport_run,
    population_generator,
    propagate_coherences,
    propagate_populations,
    thermal_fixed_point,
    to_energy_representation,
    to_position_representation,
    transition_rates,
)
from .runner import run_scenario, sweep
from .series import ObservableSeries
from .unitary import (
    PureState,
    arrival_peak,
    evolve_pure,
    position_moments,
    site_probability,
    unitary_observable_series,
)

__all__ = [
    "__version__",
    "ChainSpec",
    "DisorderRealization",
    "PotentialProfile",
    "HamiltonianOperator",
    "EigenSystem",
    "build_free_chain",
    "free_eigensystem",
    "sample_disorder",
    "build_linear_potential",
    "assemble_hamiltonian",
    "build_chain_hamiltonian",
    "diagonalize",
    "localization_length_gaussian",
    "localization_length_bloch",
    "participation_ratio",
    "PureState",
    "evolve_pure",
    "position_moments",
    "site_probability",
    "arrival_peak",
    "unitary_observable_series",
    "ObservableSeries",
    "BathSpec",
    "TransitionRates",
    "DegenerateGapError",
    "EnergyRepDensity",
    "transition_rates",
    "population_generator",
    "propagate_populations",
    "propagate_coherences",
    "thermal_fixed_point",
    "to_position_representation",
    "to_energy_representation",
    "density_observables",
    "dissipative_transport_run",
    "CircuitLayout",
    "PathCoordinateMap",
    "PeresBasis",
    "BlockDensity",
    "build_cnot_layout",
    "coordinate_map",
    "peres_basis",
    "reduced_chain_hamiltonian",
    "check_subspace_conservation",
    "run_classical_input",
    "run_superposed_input",
    "register_reduced_state",
    "von_neumann_entropy",
    "bell_fidelity",
    "ExperimentConfig",
    "ConfigError",
    "validate_config",
    "load_config",
    "run_scenario",
    "sweep",
]
