"""Randomized verification of the symmetric-prior / mutual-information identities.

The pair-swap identity holds for every conditional table.  The subset
identity additionally needs the table to be exchangeable within its train
and ghost halves (the invariance any symmetric learning algorithm on
i.i.d. samples induces), so those trials draw exchangeable tables.
"""

from __future__ import annotations

import numpy as np

from ..symmetry import (
    PermutationSpec,
    RearrangementJoint,
    conditional_mutual_information,
    exchangeable_random_conditional,
    infimum_kl_over_symmetric,
    random_conditional,
)
from .report import VerificationReport

__all__ = ["verify_mi_identities"]


def verify_mi_identities(
    trials: int = 100, seed: int = 0, tol: float = 1e-9
) -> VerificationReport:
    """|infimum over symmetric priors - exact conditional MI| <= tol.

    Each trial draws a random binary table at n in {1, 2}, a random i.i.d.
    label distribution, and compares both identities plus the group-nesting
    inequality (the subset infimum can never fall below the pair-swap one).
    """
    rng = np.random.default_rng(seed)
    worst_gap = 0.0
    worst_nesting = float("inf")
    for trial in range(trials):
        n = 1 + (trial % 2)
        p_label = float(rng.uniform(0.2, 0.8))
        label_dist = np.array([p_label, 1.0 - p_label])

        raw = random_conditional(n, rng)
        inf1 = infimum_kl_over_symmetric(raw, label_dist, PermutationSpec("type1", n))
        mi_j = conditional_mutual_information(
            RearrangementJoint(raw, tuple(label_dist)), "J"
        )
        worst_gap = max(worst_gap, abs(inf1 - mi_j))

        exch = exchangeable_random_conditional(n, rng)
        inf1e = infimum_kl_over_symmetric(exch, label_dist, PermutationSpec("type1", n))
        inf2e = infimum_kl_over_symmetric(exch, label_dist, PermutationSpec("type2", n))
        mi_t = conditional_mutual_information(
            RearrangementJoint(exch, tuple(label_dist)), "T"
        )
        worst_gap = max(worst_gap, abs(inf2e - mi_t))
        worst_nesting = min(worst_nesting, inf2e - inf1e)
    return VerificationReport.from_margin(
        "symmetric-prior-mi-identities",
        {"trials": trials, "seed": seed, "tol": tol},
        tol - worst_gap,
        0.0,
        worst_identity_gap=worst_gap,
        worst_nesting_margin=worst_nesting,
        nesting_ok=bool(worst_nesting >= -1e-12),
    )
