"""Two-way conversion between lossy evolution operators and USD POVMs.

Construct the measurement set induced by a passive evolution operator,
rebuild an operator realizing a given rank-one POVM, embed passive
operators in unitaries, and reproduce two optical reference scenarios
with closed-form expectations.
"""

from .discrimination import (
    DiscriminationReport,
    OutcomeStats,
    RandomSource,
    StateEnsemble,
    density_matrix,
    post_measurement_state,
    sample_outcomes,
    state_ensemble,
    usd_report,
)
from .duality import (
    DualSet,
    PovmSet,
    StateSet,
    ValidationReport,
    build_usd_povm,
    dual_set,
    outcome_probabilities,
    state_set,
    subspace_reduce,
    validate_povm,
)
from .equivalence import (
    LossyEvolution,
    ProjectiveBasis,
    computational_basis,
    dilate_unitary,
    discriminable_states,
    dyadic_form,
    inconclusive_rank,
    lossy_from_povm,
    make_lossy,
    normalize_passive,
    povm_from_lossy,
    projective_basis,
    reduced_evolution,
)
from .linalg import (
    HermitianEigen,
    ToleranceContext,
    adjoint,
    gram_schmidt,
    hermitian_eigen,
    inverse,
    matmul,
    psd_sqrt,
    singular_values,
    spectral_norm,
    unitary_exp,
)
from .scenarios import (
    Fig2Params,
    Scenario,
    build_scenario,
    fig1_as_embedding,
    fig1_scenario,
    fig2_scenario,
)

__all__ = [
    "DiscriminationReport",
    "DualSet",
    "Fig2Params",
    "HermitianEigen",
    "LossyEvolution",
    "OutcomeStats",
    "PovmSet",
    "ProjectiveBasis",
    "RandomSource",
    "Scenario",
    "StateEnsemble",
    "StateSet",
    "ToleranceContext",
    "ValidationReport",
    "adjoint",
    "build_scenario",
    "build_usd_povm",
    "computational_basis",
    "density_matrix",
    "dilate_unitary",
    "discriminable_states",
    "dual_set",
    "dyadic_form",
    "fig1_as_embedding",
    "fig1_scenario",
    "fig2_scenario",
    "gram_schmidt",
    "hermitian_eigen",
    "inconclusive_rank",
    "inverse",
    "lossy_from_povm",
    "make_lossy",
    "matmul",
    "normalize_passive",
    "outcome_probabilities",
    "post_measurement_state",
    "povm_from_lossy",
    "projective_basis",
    "psd_sqrt",
    "reduced_evolution",
    "sample_outcomes",
    "singular_values",
    "spectral_norm",
    "state_ensemble",
    "state_set",
    "subspace_reduce",
    "unitary_exp",
    "usd_report",
    "validate_povm",
]

__version__ = "0.1.0"
