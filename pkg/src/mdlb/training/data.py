"""Synthetic labeled datasets with closed-form Bayes-accuracy oracles."""

from __future__ import annotations

from dataclasses import dataclass
from statistics import NormalDist
from typing import Optional

import numpy as np

from ..validation import check_feature_matrix, check_labels, check_natural

__all__ = ["Dataset", "GeneratorSpec", "synth_dataset", "bayes_accuracy"]

_NORMAL = NormalDist()


@dataclass(frozen=True)
class Dataset:
    """A labeled feature matrix with integer labels in [0, n_classes)."""

    features: np.ndarray
    labels: np.ndarray
    n_classes: int

    def __post_init__(self):
        features = check_feature_matrix(self.features)
        check_natural(self.n_classes, "n_classes", minimum=1)
        labels = check_labels(self.labels, self.n_classes)
        if features.shape[0] != labels.shape[0]:
            raise ValueError("features and labels must have equal length")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class GeneratorSpec:
    """Configuration of an i.i.d. synthetic generator.

    kinds:
      blobs     -- ``classes`` unit-covariance Gaussians; for 2 classes the
                   means sit at ``(+-separation/2, 0, ...)``, otherwise they
                   are spread on a circle of radius ``separation/2``.
      quadrant  -- 4 unit-covariance Gaussians at ``(+-c, +-c)`` in 2-D with
                   ``c`` tuned so the Bayes accuracy equals
                   ``bayes_target`` exactly (``Phi(c)^2``).
      rings     -- concentric noisy rings, radius ``1 + separation * k``
                   with radial noise 0.25 (no closed-form oracle).
    """

    kind: str = "blobs"
    classes: int = 2
    dim: int = 2
    separation: float = 4.0
    bayes_target: float = 0.85
    weights: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in ("blobs", "quadrant", "rings"):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        check_natural(self.classes, "classes", minimum=2)
        check_natural(self.dim, "dim", minimum=1)
        if self.kind == "quadrant":
            if self.classes != 4 or self.dim != 2:
                raise ValueError("quadrant generator requires classes=4, dim=2")
            if not 0.25 < self.bayes_target < 1.0:
                raise ValueError("bayes_target must lie in (0.25, 1)")
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
            if len(self.weights) != self.classes:
                raise ValueError("weights length must equal classes")

    def class_means(self) -> np.ndarray:
        if self.kind == "quadrant":
            c = _NORMAL.inv_cdf(np.sqrt(self.bayes_target))
            return np.array([[c, c], [-c, c], [-c, -c], [c, -c]])
        r = self.separation / 2.0
        if self.classes == 2:
            means = np.zeros((2, self.dim))
            means[0, 0] = +r
            means[1, 0] = -r
            return means
        angles = 2.0 * np.pi * np.arange(self.classes) / self.classes
        means = np.zeros((self.classes, self.dim))
        means[:, 0] = r * np.cos(angles)
        means[:, 1] = r * np.sin(angles) if self.dim > 1 else 0.0
        return means


def synth_dataset(spec: GeneratorSpec, n: int, seed: int) -> Dataset:
    """Draw ``n`` i.i.d. samples; identical inputs yield identical datasets."""
    check_natural(n, "n", minimum=0)
    rng = np.random.default_rng(seed)
    weights = (
        np.full(spec.classes, 1.0 / spec.classes)
        if spec.weights is None
        else np.asarray(spec.weights) / np.sum(spec.weights)
    )
    labels = rng.choice(spec.classes, size=n, p=weights)
    if spec.kind == "rings":
        radius = 1.0 + spec.separation * labels
        noise = 0.25 * rng.standard_normal(n)
        theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
        features = np.zeros((n, spec.dim))
        features[:, 0] = (radius + noise) * np.cos(theta)
        if spec.dim > 1:
            features[:, 1] = (radius + noise) * np.sin(theta)
    else:
        means = spec.class_means()
        features = means[labels] + rng.standard_normal((n, means.shape[1]))
        if spec.dim > means.shape[1]:
            pad = rng.standard_normal((n, spec.dim - means.shape[1]))
            features = np.hstack([features, pad])
    return Dataset(features=features, labels=labels, n_classes=spec.classes)


def bayes_accuracy(spec: GeneratorSpec) -> float:
    """Closed-form Bayes accuracy where available.

    quadrant: the optimal rule reads off the coordinate signs, so accuracy
    is ``Phi(c)^2`` (both coordinates on the right side independently).
    blobs with 2 classes: ``Phi(separation / 2)`` for unit covariance and
    equal weights.  Other generators raise ``ValueError``.
    """
    if spec.kind == "quadrant":
        return float(_NORMAL.cdf(_NORMAL.inv_cdf(np.sqrt(spec.bayes_target))) ** 2)
    if spec.kind == "blobs" and spec.classes == 2 and spec.weights is None:
        return float(_NORMAL.cdf(spec.separation / 2.0))
    raise ValueError(f"no closed-form Bayes oracle for {spec.kind!r}/{spec.classes}")
