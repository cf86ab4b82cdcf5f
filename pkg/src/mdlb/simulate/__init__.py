"""Independent numerical verification suites and covering/compression demos."""

from .bucket_checks import (
    verify_b_max_level,
    verify_bucket_asymptotics,
    verify_bucket_vandermonde,
)
from .covering import (
    CodebookSpec,
    CoveragePoint,
    block_divergence_stats,
    covering_simulation,
    verify_covering_monotonicity,
)
from .end_to_end import pair_kernel_table, paired_threshold_experiment
from .geometric import GeometricCompressionReport, geometric_compression_demo
from .hd_checks import (
    exp_jsd2_sum,
    verify_binomial_sandwich,
    verify_exp_jsd2_sum,
    verify_jsd2_lemma,
)
from .l1_check import exact_log_mgf_binary, l1_moment_bound, verify_l1_moment
from .mi_checks import verify_mi_identities
from .report import VerificationReport

__all__ = [
    "VerificationReport",
    "verify_jsd2_lemma",
    "exp_jsd2_sum",
    "verify_exp_jsd2_sum",
    "verify_binomial_sandwich",
    "verify_bucket_vandermonde",
    "verify_b_max_level",
    "verify_bucket_asymptotics",
    "verify_mi_identities",
    "verify_l1_moment",
    "exact_log_mgf_binary",
    "l1_moment_bound",
    "CodebookSpec",
    "CoveragePoint",
    "covering_simulation",
    "block_divergence_stats",
    "verify_covering_monotonicity",
    "GeometricCompressionReport",
    "geometric_compression_demo",
    "pair_kernel_table",
    "paired_threshold_experiment",
]
