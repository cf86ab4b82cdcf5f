"""Generalization-bound formulas and their empirical counterparts.

Every bound takes a description-length term in nats (a KL divergence between
the conditional law of predictions or latents and a symmetric prior, or any
upper bound on it such as the Sauer-Shelah budget) and returns an upper
bound on a [0, 1] generalization gap or population risk.  Vacuous values
(> 1) are returned verbatim; callers decide how to flag them.

Empirical quantities (latent description length, generalization gap) are
estimated from datasets and a trained encoder/decoder pair.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .special import binary_jsd2, binary_jsd2_inverse
from .validation import check_natural, check_probability, check_unit_interval

__all__ = [
    "BoundInputs",
    "BoundReport",
    "expected_gap_bound",
    "TailBoundPair",
    "label_tail_bounds",
    "PopulationRiskBound",
    "population_risk_bound",
    "representation_gap_bound",
    "representation_tail_bound",
    "vc_complexity_term",
    "LatentKLEstimate",
    "estimate_latent_kl",
    "empirical_gap",
    "expected_risk",
]

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class BoundInputs:
    """Inputs shared by the bound formulas for one experiment."""

    n: int
    n_classes: int
    kl_term: float
    epsilon: float = 0.0
    delta: float = 0.05
    lam: Optional[float] = None

    def __post_init__(self):
        check_natural(self.n, "n", minimum=1)
        check_natural(self.n_classes, "n_classes", minimum=2)
        if not np.isfinite(self.kl_term) or self.kl_term < 0.0:
            raise ValueError(f"kl_term must be finite and >= 0, got {self.kl_term!r}")
        if self.epsilon < 0.0:
            raise ValueError("epsilon must be >= 0")
        check_unit_interval(self.delta, "delta", open_ends=True)
        if self.lam is not None and self.lam <= 0.0:
            raise ValueError("lam must be positive when given")


def expected_gap_bound(kl_term: float, n: int, epsilon: float = 0.0) -> float:
    """In-expectation gap bound ``sqrt(2 * kl_term / n) + epsilon``.

    ``epsilon`` is the distortion slack of a lossy (noise-compressed) model;
    zero recovers the lossless form.
    """
    if kl_term < 0.0 or epsilon < 0.0:
        raise ValueError("kl_term and epsilon must be >= 0")
    check_natural(n, "n", minimum=1)
    return math.sqrt(2.0 * kl_term / n) + epsilon


class TailBoundPair(NamedTuple):
    """High-probability bounds on the ghost-sample gap.

    ``plain`` bounds the train/ghost empirical-risk difference directly;
    ``lossy`` adds the distortion slack (under the square root) and a
    Hoeffding term converting the ghost risk into the population risk.
    """

    plain: float
    lossy: float


def label_tail_bounds(
    kl_value: float, n: int, delta: float, epsilon: float = 0.0
) -> TailBoundPair:
    """Tail bounds from the prediction description length, at level ``delta``.

    plain: ``sqrt(4/(2n-1) * (kl + log(sqrt(2n)/delta)))``
    lossy: ``sqrt(log(2/delta)/(2n))
            + sqrt(4/(2n-1) * (kl + log(sqrt(8n)/delta)) + epsilon)``

    A non-finite ``kl_value`` propagates to infinite (vacuous) bounds.
    """
    check_natural(n, "n", minimum=1)
    check_unit_interval(delta, "delta", open_ends=True)
    if epsilon < 0.0:
        raise ValueError("epsilon must be >= 0")
    if kl_value < 0.0:
        raise ValueError("kl_value must be >= 0")
    if not np.isfinite(kl_value):
        return TailBoundPair(float("inf"), float("inf"))
    coeff = 4.0 / (2 * n - 1)
    plain = math.sqrt(coeff * (kl_value + math.log(math.sqrt(2 * n) / delta)))
    lossy = math.sqrt(math.log(2.0 / delta) / (2 * n)) + math.sqrt(
        coeff * (kl_value + math.log(math.sqrt(8 * n) / delta)) + epsilon
    )
    return TailBoundPair(plain=plain, lossy=lossy)


class PopulationRiskBound(NamedTuple):
    """Population (or ghost) risk bound from the doubled-JSD inequality.

    ``risk`` inverts ``n * jsd2(L, L_hat) <= budget``; ``linear`` is the
    realizable-case simplification ``budget / n`` (only set when the
    empirical risk is zero).  In nats the linear form understates the
    invertible bound by up to a factor ``1/ln 2``:
    ``linear <= risk <= linear / ln 2``.
    """

    risk: float
    linear: Optional[float]
    vacuous: bool


def population_risk_bound(
    kl_value: float,
    n: int,
    empirical_risk: float,
    delta: Optional[float] = None,
) -> PopulationRiskBound:
    """Largest risk consistent with ``n * jsd2(risk, empirical_risk) <= budget``.

    ``budget = kl_value + log n`` for the in-expectation form, plus
    ``log(1/delta)`` when ``delta`` is given (tail form).  Requires
    ``n >= 10`` in theory; smaller ``n`` only warns.  If the budget exceeds
    ``jsd2(1, empirical_risk)`` the bound is vacuous and reported as 1.
    """
    check_natural(n, "n", minimum=1)
    if n < 10:
        warnings.warn(
            f"population_risk_bound is stated for n >= 10, got n={n}", stacklevel=2
        )
    empirical_risk = check_probability(empirical_risk, "empirical_risk")
    if kl_value < 0.0:
        raise ValueError("kl_value must be >= 0")
    budget = kl_value + math.log(n)
    if delta is not None:
        check_unit_interval(delta, "delta", open_ends=True)
        budget += math.log(1.0 / delta)
    target = budget / n
    linear = target if empirical_risk == 0.0 else None
    if not np.isfinite(target) or target > binary_jsd2(1.0, empirical_risk):
        return PopulationRiskBound(risk=1.0, linear=linear, vacuous=True)
    risk = binary_jsd2_inverse(empirical_risk, target)
    return PopulationRiskBound(risk=risk, linear=linear, vacuous=risk > 1.0)


def representation_gap_bound(
    latent_kl: float, n: int, n_classes: int, epsilon: float = 0.0
) -> float:
    """Encoder-only gap bound ``2 sqrt((2 kl + K + 2)/n) + epsilon``."""
    if latent_kl < 0.0 or epsilon < 0.0:
        raise ValueError("latent_kl and epsilon must be >= 0")
    check_natural(n, "n", minimum=1)
    check_natural(n_classes, "n_classes", minimum=2)
    return 2.0 * math.sqrt((2.0 * latent_kl + n_classes + 2.0) / n) + epsilon


def representation_tail_bound(
    latent_kl: float,
    n: int,
    n_classes: int,
    delta: float,
    lam: Optional[float] = None,
) -> float:
    """Tail version of the encoder-only bound at level ``delta``.

    With ``A = latent_kl + (K + 2)/2 + log(2/delta)`` the bound is
    ``A / lam + 2 lam / n + sqrt(log(2/delta)/n)``; when ``lam`` is omitted
    the minimizer ``lam* = sqrt(n A / 2)`` gives ``2 sqrt(2 A / n)`` plus the
    Hoeffding term.
    """
    if latent_kl < 0.0:
        raise ValueError("latent_kl must be >= 0")
    check_natural(n, "n", minimum=1)
    check_natural(n_classes, "n_classes", minimum=2)
    check_unit_interval(delta, "delta", open_ends=True)
    a = latent_kl + (n_classes + 2.0) / 2.0 + math.log(2.0 / delta)
    hoeffding = math.sqrt(math.log(2.0 / delta) / n)
    if lam is None:
        return 2.0 * math.sqrt(2.0 * a / n) + hoeffding
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    return a / lam + 2.0 * lam / n + hoeffding


def vc_complexity_term(n: int, d: int) -> float:
    """Sauer-Shelah description-length budget ``d * log(2 e n / d)`` in nats.

    Counts the distinct labelings a VC-dimension-``d`` class can produce on
    ``2n`` points; plugging the result into :func:`expected_gap_bound`
    recovers the classical ``O(sqrt(d log n / n))`` rate.
    """
    check_natural(n, "n", minimum=1)
    check_natural(d, "d", minimum=1)
    if d > 2 * n:
        raise ValueError(f"d must be <= 2n, got d={d}, n={n}")
    return d * math.log(2.0 * math.e * n / d)


class LatentKLEstimate(NamedTuple):
    """Closed-form latent description length over train + ghost samples."""

    total: float
    per_sample_mean: float
    stderr: float  # standard error of the per-sample mean
    n_samples: int


def estimate_latent_kl(train, ghost, encoder_params, bank) -> LatentKLEstimate:
    """Sum of per-sample closed-form KLs from the encoder output to its
    assigned prior-bank center, over the concatenated train and ghost sets.

    ``bank=None`` measures against the standard-normal prior.  The bank's
    mode selects the assignment/divergence rule (full KL for the lossless
    bank, mean + variance split for the lossy bank), matching the rule used
    during training.
    """
    from .training.bank import per_sample_kl  # local import to avoid a cycle
    from .training.network import encoder_forward

    values = []
    for ds in (train, ghost):
        if ds.n == 0:
            raise ValueError("datasets must be nonempty")
        mean, var = encoder_forward(encoder_params, ds.features)
        values.append(per_sample_kl(mean, var, ds.labels, bank))
    per = np.concatenate(values)
    total = float(per.sum())
    stderr = float(per.std(ddof=1) / math.sqrt(per.size)) if per.size > 1 else 0.0
    return LatentKLEstimate(
        total=total,
        per_sample_mean=float(per.mean()),
        stderr=stderr,
        n_samples=int(per.size),
    )


def expected_risk(params, dataset, latent_samples: int = 12, seed: int = 0) -> float:
    """Mean expected 0-1 loss ``1 - P(correct class | x)`` over a dataset.

    The class-posterior is averaged over ``latent_samples`` reparameterized
    latent draws (deterministic given ``seed``).
    """
    from .training.network import predict_proba

    proba = predict_proba(params, dataset.features, latent_samples, seed)
    return float(np.mean(1.0 - proba[np.arange(dataset.n), dataset.labels]))


def empirical_gap(
    params, train, test, latent_samples: int = 12, seed: int = 0
) -> float:
    """Mean expected 0-1 loss on ``test`` minus the same on ``train``."""
    return expected_risk(params, test, latent_samples, seed) - expected_risk(
        params, train, latent_samples, seed
    )


_REPORT_FIELDS = (
    "expected_gap_bound",
    "label_tail_bound",
    "lossy_label_tail_bound",
    "population_risk_bound",
    "representation_gap_bound",
    "representation_tail_bound",
    "ghost_risk_bound",
    "empirical_gap",
)


@dataclass
class BoundReport:
    """Every bound evaluated for one experiment, next to the measured gap.

    Bounds above 1 are meaningful for a [0, 1] loss only as evidence of
    vacuousness; they are kept verbatim and flagged, never clipped.
    """

    inputs: BoundInputs
    expected_gap_bound: float
    label_tail_bound: float
    lossy_label_tail_bound: float
    population_risk_bound: float
    representation_gap_bound: float
    representation_tail_bound: float
    ghost_risk_bound: float
    empirical_gap: float
    empirical_risk: float
    seed: int = 0
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_inputs(
        cls,
        inputs: BoundInputs,
        empirical_risk: float,
        empirical_gap: float,
        seed: int = 0,
        **extra,
    ) -> "BoundReport":
        tails = label_tail_bounds(inputs.kl_term, inputs.n, inputs.delta, inputs.epsilon)
        pop = population_risk_bound(inputs.kl_term, inputs.n, empirical_risk)
        ghost = population_risk_bound(
            inputs.kl_term, inputs.n, empirical_risk, delta=inputs.delta
        )
        return cls(
            inputs=inputs,
            expected_gap_bound=expected_gap_bound(
                inputs.kl_term, inputs.n, inputs.epsilon
            ),
            label_tail_bound=tails.plain,
            lossy_label_tail_bound=tails.lossy,
            population_risk_bound=pop.risk,
            representation_gap_bound=representation_gap_bound(
                inputs.kl_term, inputs.n, inputs.n_classes, inputs.epsilon
            ),
            representation_tail_bound=representation_tail_bound(
                inputs.kl_term, inputs.n, inputs.n_classes, inputs.delta, inputs.lam
            ),
            ghost_risk_bound=ghost.risk,
            empirical_gap=empirical_gap,
            empirical_risk=empirical_risk,
            seed=seed,
            extra=dict(extra),
        )

    def bound_items(self) -> list[tuple[str, float, bool]]:
        """(name, value, vacuous flag) for each bound column."""
        out = []
        for name in _REPORT_FIELDS[:-1]:
            value = getattr(self, name)
            out.append((name, value, not value <= 1.0))
        return out

    def to_dict(self) -> dict:
        d = {
            "n": self.inputs.n,
            "n_classes": self.inputs.n_classes,
            "kl_term": self.inputs.kl_term,
            "epsilon": self.inputs.epsilon,
            "delta": self.inputs.delta,
            "lambda": self.inputs.lam,
            "empirical_risk": self.empirical_risk,
            "empirical_gap": self.empirical_gap,
            "seed": self.seed,
        }
        for name in _REPORT_FIELDS[:-1]:
            d[name] = getattr(self, name)
        d.update(self.extra)
        return d

    def csv_header(self) -> str:
        return ",".join(self.to_dict().keys())

    def csv_row(self) -> str:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, float):
                return repr(v)
            return str(v)

        return ",".join(fmt(v) for v in self.to_dict().values())
