"""Closed-form KL divergences for diagonal Gaussians and finite categoricals.

Values are in nats throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import check_prob_vector

__all__ = ["DiagGaussian", "kl_diag_gaussian", "kl_categorical"]


@dataclass(frozen=True)
class DiagGaussian:
    """A Gaussian with diagonal covariance, stored as mean and variance vectors."""

    mean: np.ndarray
    var: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        var = np.asarray(self.var, dtype=float)
        if mean.ndim != 1 or var.ndim != 1:
            raise ValueError("mean and var must be one-dimensional")
        if mean.shape != var.shape:
            raise ValueError(
                f"mean and var must share a shape, got {mean.shape} vs {var.shape}"
            )
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(var))):
            raise ValueError("mean and var must be finite")
        if np.any(var <= 0.0):
            raise ValueError("variances must be strictly positive")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "var", var)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    @classmethod
    def standard(cls, dim: int) -> "DiagGaussian":
        return cls(mean=np.zeros(dim), var=np.ones(dim))


def kl_diag_gaussian(p: DiagGaussian, q: DiagGaussian) -> float:
    """KL(p || q) between diagonal Gaussians, in nats.

    ``sum_j [(var_p + (mu_p - mu_q)^2) / (2 var_q) - 1/2 + ln(sigma_q / sigma_p)]``
    """
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
    ratio = p.var / q.var
    val = 0.5 * float(
        np.sum(ratio + (p.mean - q.mean) ** 2 / q.var - 1.0 - np.log(ratio))
    )
    return max(val, 0.0)


def kl_categorical(p, q) -> float:
    """KL(p || q) between probability vectors, in nats.

    Uses ``0 * log(0/q) := 0``.  Returns ``inf`` when p puts mass where q
    does not (support violation).  Both inputs must be normalized to 1
    within 1e-12 and share a length.
    """
    p = check_prob_vector(p, "p")
    q = check_prob_vector(q, "q")
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    support = p > 0.0
    if np.any(q[support] == 0.0):
        return float("inf")
    val = float(np.sum(p[support] * (np.log(p[support]) - np.log(q[support]))))
    return max(val, 0.0)
