"""mesobath: desk-scale checks that a mesoscopically coupled reservoir
acts on its system like an explicit bath of ground-state oscillators.

Three independent routes to the reduced dynamics (exact finite-M,
truncated-Fock oscillator bath, pairing-sum series) plus closed-form
correlation functions and dephasing laws, all cross-checkable.
"""

from .analytics import (
    NonDemolitionSpec,
    decoherence_modulus,
    entanglement_trajectory,
    minimum_transition_period,
    population_drift,
    short_time_gaussian,
)
from .correlations import (
    DressedOperator,
    bosonic_kernel,
    clt_convergence,
    multitime_finite,
    pairings,
    reservoir_kernel,
    set_partitions,
    two_point_bosonic,
    two_point_reservoir,
    wick_sum,
)
from .dyson import DysonConfig, dyson_propagate, truncation_bound
from .errors import (
    DimensionMismatchError,
    DimensionOverflowError,
    EmptyKeepSetError,
    GridMismatchError,
    MesobathError,
    NoConvergenceError,
    NotHermitianError,
    NotSimultaneouslyDiagonalizableError,
    OrderTooHighError,
    ParseError,
    QuadratureUnderResolvedError,
    SchemaError,
)
from .finite_m import (
    FiniteMConfig,
    build_hamiltonian_terms,
    convergence_scan,
    coupling_prefactor,
    reduce_dynamics_finite,
)
from .fluctuation import (
    FluctuationModel,
    FockConfig,
    NotRepresentable,
    ThermalModes,
    build_fluctuation_model,
    build_fock_hamiltonian,
    build_mode_set,
    destroy,
    reduce_dynamics_bosonic,
    thermal_representation,
    thermal_two_point,
)
from .model import (
    ComponentSpec,
    ComponentSpectrum,
    ModelSpec,
    SystemSpec,
    ValidationReport,
    centralize,
    spectral_decompose,
    validate,
)
from .numerics import (
    KronTerm,
    apply_generator,
    dense_generator,
    kron,
    krylov_step,
    negativity,
    partial_trace,
    partial_transpose,
    propagator,
    reduced_state_from_vector,
    trace_distance,
)
from .tolerances import DEFAULT_TOLERANCES, TOLERANCE_KEYS, Tolerances
from .trajectory import ErrorTable, Trajectory, max_trace_distance, time_grid

__version__ = "0.1.0"
