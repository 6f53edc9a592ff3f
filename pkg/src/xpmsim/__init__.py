"""Steady-state models of EIT-enhanced cross-phase-modulation nonlinearities.

The package computes closed-form steady-state coherences for three
multilevel atom-laser systems, checks them against an independent linear
solve and a Lindblad density-matrix solver, and tests the central symmetry
claims: equal |Im chi| across the fields sharing one multiphoton process,
and equal photon flux drawn from each of those fields.
"""

from ._version import __version__
from .errors import (
    CaseError,
    ConfigError,
    DegenerateSteadyStateError,
    GridMismatchError,
    NonConvergenceError,
    PoleError,
    SignatureMismatch,
    SingularMatrixError,
    XpmError,
)
from .model import (
    Case,
    DecayChannel,
    FieldDrive,
    FieldId,
    LevelScheme,
    PhysicalConstants,
    Role,
    RwaSystem,
    SystemId,
    SystemParams,
    make_params,
    make_scheme,
    rwa_matrix,
)
from .analytic import (
    ORACLE_BRANCH,
    SIMULATION_BRANCH,
    CoherenceResult,
    MultiphotonTerm,
    chi3_s2,
    chi5_symmetric_magnitude,
    coherences_s2,
    coupling_coherence_s1,
    d_factor,
    flux_closed_form_s1,
    perturbed_coherences_s3,
    photon_flux,
    probe_coherence_s1,
    signal_coherence_s1,
    signal_coherence_s1_cpt,
    steady_amplitudes_cpt,
    steady_amplitudes_s1,
)
from .steady import (
    DensityState,
    Liouvillian,
    build_hamiltonian,
    build_liouvillian,
    evolve,
    liouvillian_for,
    solve_amplitudes,
    steady_state,
)
from .symmetry import (
    ClassifyContext,
    ProcessHypothesis,
    ProcessLabel,
    SymmetryReport,
    Verdict,
    check_field_symmetry,
    classify_process,
    flux_balance,
    flux_equal,
    reverse_process_present,
    shared_species_terms_s1,
    squeezing_capability,
)
from .sweep import (
    ComparisonMetrics,
    Policy,
    SweepResult,
    SweepRow,
    SweepSpec,
    compare,
    emit,
    parse_csv,
    point_params,
    run_sweep,
    select_method,
)

__all__ = [name for name in dir() if not name.startswith("_")]
