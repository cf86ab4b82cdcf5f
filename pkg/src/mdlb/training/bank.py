"""Per-class banks of diagonal Gaussian prior centers with moving-average updates.

The bank keeps ``centers_per_class`` centers for each label.  Each training
sample is matched to the closest same-class center and the matched centers
drift toward the batch statistics:

    mean  <- (1 - alpha * count) * mean + alpha * sum(sample means)
    std   <- sqrt((1 - alpha * count) * std^2 + alpha * sum(sample variances))

which is a convex combination whenever ``alpha * count <= 1`` (enforced),
so variances stay strictly positive.

Two matching/divergence rules exist:

* ``lossless``: full KL between the encoder Gaussian and the center.
* ``lossy``: the regularizer of the noise-perturbed latent splits into a
  mean part (unit variances on both sides) plus a variance part (zero means
  on both sides); matching minimizes that sum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..validation import check_labels, check_natural

__all__ = ["PriorBank", "assign_centers", "update_bank", "per_sample_kl"]

MODES = ("lossless", "lossy")


@dataclass
class PriorBank:
    """K x M diagonal Gaussian centers; means start at 0, stds at 1."""

    means: np.ndarray  # (K, M, m)
    stds: np.ndarray  # (K, M, m)
    alpha: float
    mode: str

    def __post_init__(self):
        self.means = np.asarray(self.means, dtype=float)
        self.stds = np.asarray(self.stds, dtype=float)
        if self.means.shape != self.stds.shape or self.means.ndim != 3:
            raise ValueError("means and stds must share a (K, M, m) shape")
        if np.any(self.stds <= 0.0):
            raise ValueError("center standard deviations must stay positive")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")

    @classmethod
    def initial(
        cls, n_classes: int, centers_per_class: int, latent_dim: int, alpha: float, mode: str
    ) -> "PriorBank":
        check_natural(n_classes, "n_classes", minimum=1)
        check_natural(centers_per_class, "centers_per_class", minimum=1)
        check_natural(latent_dim, "latent_dim", minimum=1)
        shape = (n_classes, centers_per_class, latent_dim)
        return cls(means=np.zeros(shape), stds=np.ones(shape), alpha=alpha, mode=mode)

    @property
    def n_classes(self) -> int:
        return self.means.shape[0]

    @property
    def centers_per_class(self) -> int:
        return self.means.shape[1]

    @property
    def latent_dim(self) -> int:
        return self.means.shape[2]

    def copy(self) -> "PriorBank":
        return PriorBank(self.means.copy(), self.stds.copy(), self.alpha, self.mode)


def _center_divergences(mean, var, labels, bank: PriorBank) -> np.ndarray:
    """(batch, M) divergence from each sample to each same-class center."""
    c_mean = bank.means[labels]  # (b, M, m)
    c_var = bank.stds[labels] ** 2  # (b, M, m)
    mean = mean[:, None, :]
    var = var[:, None, :]
    if bank.mode == "lossless":
        ratio = var / c_var
        return 0.5 * np.sum(
            ratio + (mean - c_mean) ** 2 / c_var - 1.0 - np.log(ratio), axis=-1
        )
    mean_part = 0.5 * np.sum((mean - c_mean) ** 2, axis=-1)
    ratio = var / c_var
    var_part = 0.5 * np.sum(ratio - 1.0 - np.log(ratio), axis=-1)
    return mean_part + var_part


def assign_centers(mean, var, labels, bank: PriorBank) -> np.ndarray:
    """Index of the divergence-minimizing same-class center per sample.

    Ties resolve to the lowest index (argmin semantics).
    """
    mean = np.asarray(mean, dtype=float)
    var = np.asarray(var, dtype=float)
    labels = check_labels(labels, bank.n_classes)
    if mean.shape != var.shape or mean.ndim != 2 or mean.shape[1] != bank.latent_dim:
        raise ValueError("mean/var must have shape (batch, latent_dim)")
    return np.argmin(_center_divergences(mean, var, labels, bank), axis=1)


def per_sample_kl(mean, var, labels, bank: PriorBank | None) -> np.ndarray:
    """The divergence each sample contributes to the training regularizer.

    ``bank=None`` measures the plain KL to the standard normal prior.
    """
    mean = np.asarray(mean, dtype=float)
    var = np.asarray(var, dtype=float)
    if bank is None:
        return 0.5 * np.sum(var + mean**2 - 1.0 - np.log(var), axis=-1)
    labels = check_labels(labels, bank.n_classes)
    div = _center_divergences(mean, var, labels, bank)
    return div[np.arange(div.shape[0]), np.argmin(div, axis=1)]


def update_bank(
    bank: PriorBank, mean, var, labels, assignments, alpha: float | None = None
) -> PriorBank:
    """Moving-average update of the touched centers; untouched ones are kept.

    Raises ``ValueError`` when ``alpha * count`` exceeds 1 for any center,
    since the update would then leave the convex hull (and could produce a
    negative variance).  ``alpha * count == 1`` replaces the center exactly.
    """
    alpha = bank.alpha if alpha is None else float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    mean = np.asarray(mean, dtype=float)
    var = np.asarray(var, dtype=float)
    labels = check_labels(labels, bank.n_classes)
    assignments = np.asarray(assignments, dtype=np.int64)
    if alpha == 0.0 or labels.size == 0:
        return bank.copy()

    new_means = bank.means.copy()
    new_vars = bank.stds.copy() ** 2
    counts = np.zeros((bank.n_classes, bank.centers_per_class), dtype=np.int64)
    np.add.at(counts, (labels, assignments), 1)
    if np.any(alpha * counts > 1.0 + 1e-12):
        worst = int(counts.max())
        raise ValueError(
            f"alpha * count = {alpha * worst:.4f} exceeds 1; lower alpha or batch size"
        )
    mean_sums = np.zeros_like(new_means)
    var_sums = np.zeros_like(new_vars)
    np.add.at(mean_sums, (labels, assignments), mean)
    np.add.at(var_sums, (labels, assignments), var)
    touched = counts > 0
    keep = 1.0 - alpha * counts[touched][:, None]
    new_means[touched] = keep * new_means[touched] + alpha * mean_sums[touched]
    new_vars[touched] = keep * new_vars[touched] + alpha * var_sums[touched]
    return PriorBank(new_means, np.sqrt(new_vars), bank.alpha, bank.mode)
