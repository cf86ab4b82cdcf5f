"""mdlb: description-length generalization bounds, exact symmetric-prior
machinery, desk-scale bottleneck training, and numerical verification suites.
"""

from .bounds import (
    BoundInputs,
    BoundReport,
    empirical_gap,
    estimate_latent_kl,
    expected_gap_bound,
    expected_risk,
    label_tail_bounds,
    population_risk_bound,
    representation_gap_bound,
    representation_tail_bound,
    vc_complexity_term,
)
from .combinat import (
    BinomialSandwich,
    b_max,
    binomial_entropy_sandwich,
    bucket,
    log_choose,
)
from .divergences import DiagGaussian, kl_categorical, kl_diag_gaussian
from .special import (
    BINARY_JSD2_MAX,
    LogBase,
    binary_entropy,
    binary_jsd2,
    binary_jsd2_inverse,
)
from .symmetry import (
    DiscreteConditional,
    PermutationSpec,
    RearrangementJoint,
    check_symmetry,
    conditional_mutual_information,
    infimum_kl_over_symmetric,
    symmetrize,
)

__version__ = "0.1.0"

__all__ = [
    "LogBase",
    "binary_entropy",
    "binary_jsd2",
    "binary_jsd2_inverse",
    "BINARY_JSD2_MAX",
    "log_choose",
    "bucket",
    "b_max",
    "BinomialSandwich",
    "binomial_entropy_sandwich",
    "DiagGaussian",
    "kl_diag_gaussian",
    "kl_categorical",
    "DiscreteConditional",
    "PermutationSpec",
    "RearrangementJoint",
    "check_symmetry",
    "symmetrize",
    "conditional_mutual_information",
    "infimum_kl_over_symmetric",
    "BoundInputs",
    "BoundReport",
    "expected_gap_bound",
    "label_tail_bounds",
    "population_risk_bound",
    "representation_gap_bound",
    "representation_tail_bound",
    "vc_complexity_term",
    "estimate_latent_kl",
    "empirical_gap",
    "expected_risk",
]
