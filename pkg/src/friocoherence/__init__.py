"""Coherence, correlation, and private-randomness accounting for the
discrimination of equiprobable symmetric quantum states with a fixed rate of
inconclusive outcomes.

The package covers the full pipeline: symmetric ensembles and their
distinguishability, the probabilistic separation step and its system-ancilla
coupling, the measurement families (deterministic identification, standard
fixed-inconclusive-rate, and its concatenated variant), the generic
POVM-coherence evaluator with its closed forms, discord via numerical
maximization, and a CLI that emits the figure-style datasets as CSV with
optional rendered figures.
"""

from .analysis import (
    BoundsReport,
    CoherenceReport,
    RESIDUAL_TOLERANCES,
    bounds_check,
    build_report,
    conc_coherence_closed,
    decomposition_residuals,
    frio_coherence_closed,
    me_coherence_closed,
    private_randomness,
)
from .correlations import (
    AncillaProjectorPair,
    OptimizationFailure,
    classical_correlation,
    closed_form_max_j,
    max_classical_correlation,
    mutual_information,
    quantum_discord,
)
from .ensemble import (
    EnsembleSpec,
    coefficient_family,
    distinguishability,
    input_density_matrix,
    iter_random_specs,
    p_correct,
    sample_random_spec,
    symmetric_states,
)
from .linalg import (
    DensityMatrix,
    NotHermitianError,
    ProbabilityVector,
    binary_entropy,
    hermitian_eigen,
    partial_trace,
    shannon_entropy,
    von_neumann_entropy,
)
from .povm import (
    Povm,
    concatenated_povm,
    frio_povm,
    me_povm,
    measure,
    povm_coherence,
    uniform_phase_states,
)
from .separation import (
    NoFailureBranchError,
    SeparationProfile,
    ancilla_coherence,
    ancilla_eigenvalues,
    ancilla_state,
    bipartite_state,
    failure_coefficients,
    output_density_matrices,
    output_entropies,
    separation_coherence,
    separation_detection_operators,
    separation_profile,
    success_coefficients,
    success_failure_probabilities,
)
from .sweep import CSV_COLUMNS, SweepConfig, run_sample, run_sweep
from .verify import VerifyReport, run_verify

__version__ = "0.1.0"
