"""Categorical matrix completion.

Recovers a real low-rank matrix from partially observed categorical
entries by maximizing the categorical log-likelihood under a nuclear-norm
and entry-box constraint, with multinomial-logit link functions mapping
matrix entries to category probabilities.
"""

__version__ = "0.1.0"

from .constraints import ConstraintSpec
from .divergence import (
    DivergenceKind,
    avg_matrix_divergence,
    hellinger_lb_gap,
    hellinger_sq,
    kl_categorical,
    kl_upper_bound,
)
from .errors import (
    CatmcError,
    DegenerateFamilyError,
    InvalidInputError,
    NumericError,
    UnsupportedOperationError,
)
from .evaluation import (
    BoundReport,
    RatingReport,
    baseline_real_completion,
    bound_report,
    mse_per_entry,
    predict_categories,
    rating_report,
    round_to_labels,
)
from .fitting import FitConfig, TrainingPairs, fit_logit, loglik_of_fit
from .links import (
    MultinomialLogitFamily,
    SmoothnessReport,
    TabularLinkFamily,
    adjacent_confusion_family,
    default_logit_family,
    eval_derivs,
    eval_probs,
    family_from_json,
    family_to_json,
    smoothness_constants,
)
from .sampling import (
    GroundTruth,
    ObservationSet,
    sample_mask,
    sample_observations,
    synth_low_rank,
)
from .solver import (
    Estimate,
    SolverConfig,
    log_likelihood,
    log_likelihood_grad,
    project_box,
    project_constraint_set,
    project_nuclear_ball,
    solve,
)

__all__ = [
    "__version__",
    "ConstraintSpec",
    "DivergenceKind",
    "avg_matrix_divergence",
    "hellinger_lb_gap",
    "hellinger_sq",
    "kl_categorical",
    "kl_upper_bound",
    "CatmcError",
    "DegenerateFamilyError",
    "InvalidInputError",
    "NumericError",
    "UnsupportedOperationError",
    "BoundReport",
    "RatingReport",
    "baseline_real_completion",
    "bound_report",
    "mse_per_entry",
    "predict_categories",
    "rating_report",
    "round_to_labels",
    "FitConfig",
    "TrainingPairs",
    "fit_logit",
    "loglik_of_fit",
    "MultinomialLogitFamily",
    "SmoothnessReport",
    "TabularLinkFamily",
    "adjacent_confusion_family",
    "default_logit_family",
    "eval_derivs",
    "eval_probs",
    "family_from_json",
    "family_to_json",
    "smoothness_constants",
    "GroundTruth",
    "ObservationSet",
    "sample_mask",
    "sample_observations",
    "synth_low_rank",
    "Estimate",
    "SolverConfig",
    "log_likelihood",
    "log_likelihood_grad",
    "project_box",
    "project_constraint_set",
    "project_nuclear_ball",
    "solve",
]
