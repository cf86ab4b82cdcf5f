"""Exact symmetric conditional priors on tiny discrete spaces.

A :class:`DiscreteConditional` stores the full table of a conditional
distribution over prediction vectors of length ``2n`` given label vectors of
length ``2n``.  Three permutation groups act on the positions:

* type-I: per-pair swaps of positions ``i`` and ``i + n`` (size ``2^n``),
* type-II: all permutations of the ``2n`` positions (size ``(2n)!``),
* type-III: permutations preserving a given label vector.

Group-averaging a conditional yields the KL-closest symmetric prior, and the
averaged divergence equals an exactly enumerable conditional mutual
information between the pair/subset rearrangement variable and the
predictions.  Everything here is exact (full enumeration), so sizes are
capped: ``n <= 3`` and ``pred_alphabet ** (2n) <= 2**20``.

For the subset rearrangement ("T"), the table must be exchangeable within
its first ``n`` (training) and last ``n`` (ghost) positions for the
mutual-information identity to hold; tables induced by a learning algorithm
run on i.i.d. samples have this property, and
:func:`exchangeable_random_conditional` generates synthetic ones.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .validation import check_natural, check_prob_vector

__all__ = [
    "DiscreteConditional",
    "PermutationSpec",
    "RearrangementJoint",
    "SymmetryCheck",
    "check_symmetry",
    "symmetrize",
    "conditional_mutual_information",
    "infimum_kl_over_symmetric",
    "random_conditional",
    "exchangeable_random_conditional",
]

_TABLE_CAP = 2**20
_PERM_CAP = 720  # (2n)! for 2n = 6


def _vectors(alphabet: int, length: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(alphabet), repeat=length))


def _apply(vec: Sequence[int], perm: Sequence[int]) -> tuple[int, ...]:
    """Position permutation: result[i] = vec[perm[i]]."""
    return tuple(vec[p] for p in perm)


@dataclass
class DiscreteConditional:
    """Dense conditional P(prediction vector | label vector) on length-2n vectors.

    ``table`` maps each label vector (tuple of ints in [0, label_alphabet))
    to a probability row over all ``pred_alphabet ** (2n)`` prediction
    vectors, indexed in lexicographic order.
    """

    n: int
    label_alphabet: int
    pred_alphabet: int
    table: dict = field(repr=False)

    def __post_init__(self):
        self.n = check_natural(self.n, "n", minimum=1)
        self.label_alphabet = check_natural(self.label_alphabet, "label_alphabet", 1)
        self.pred_alphabet = check_natural(self.pred_alphabet, "pred_alphabet", 1)
        if self.pred_alphabet ** (2 * self.n) > _TABLE_CAP:
            raise ValueError(
                f"pred_alphabet ** (2n) exceeds the {_TABLE_CAP} enumeration cap"
            )
        size = self.pred_alphabet ** (2 * self.n)
        fixed = {}
        for y in _vectors(self.label_alphabet, 2 * self.n):
            if y not in self.table:
                raise ValueError(f"missing table row for labels {y}")
            row = np.asarray(self.table[y], dtype=float)
            if row.shape != (size,):
                raise ValueError(f"row for {y} must have length {size}")
            if np.any(row < 0.0) or abs(float(row.sum()) - 1.0) > 1e-12:
                raise ValueError(f"row for {y} must be a probability vector")
            fixed[tuple(int(c) for c in y)] = row
        self.table = fixed

    @property
    def length(self) -> int:
        return 2 * self.n

    def pred_vectors(self) -> list[tuple[int, ...]]:
        return _vectors(self.pred_alphabet, self.length)

    def label_vectors(self) -> list[tuple[int, ...]]:
        return _vectors(self.label_alphabet, self.length)

    def pred_index(self, vec: Sequence[int]) -> int:
        idx = 0
        for c in vec:
            idx = idx * self.pred_alphabet + int(c)
        return idx

    def perm_index_map(self, perm: Sequence[int]) -> np.ndarray:
        """Index array m with row_perm[j] = row[m[j]] for prediction rows."""
        return np.array(
            [self.pred_index(_apply(v, perm)) for v in self.pred_vectors()],
            dtype=np.int64,
        )

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "label_alphabet": self.label_alphabet,
            "pred_alphabet": self.pred_alphabet,
            "table": {
                ",".join(map(str, y)): row.tolist() for y, row in sorted(self.table.items())
            },
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DiscreteConditional":
        payload = json.loads(text)
        table = {
            tuple(int(c) for c in key.split(",")): np.asarray(row, dtype=float)
            for key, row in payload["table"].items()
        }
        return cls(
            n=payload["n"],
            label_alphabet=payload["label_alphabet"],
            pred_alphabet=payload["pred_alphabet"],
            table=table,
        )


@dataclass(frozen=True)
class PermutationSpec:
    """Selects one of the three position-permutation groups.

    ``labels`` restricts type-III operations to the row with that label
    vector; when omitted, type-III operations run per row with each row's
    own label-preserving group.
    """

    kind: str
    n: int
    labels: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if self.kind not in ("type1", "type2", "type3"):
            raise ValueError(f"unknown symmetry kind {self.kind!r}")
        check_natural(self.n, "n", minimum=1)
        if self.kind == "type2" and math.factorial(2 * self.n) > _PERM_CAP:
            raise ValueError(f"type2 requires (2n)! <= {_PERM_CAP}, got n={self.n}")
        if self.kind in ("type1", "type3") and self.n > 3:
            raise ValueError(f"{self.kind} enumeration is capped at n <= 3")
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(int(c) for c in self.labels))
            if len(self.labels) != 2 * self.n:
                raise ValueError("labels must have length 2n")

    def permutations(self, labels: Optional[Sequence[int]] = None) -> list[tuple[int, ...]]:
        """Enumerate the group as position permutations (result[i] = vec[p[i]])."""
        two_n = 2 * self.n
        if self.kind == "type1":
            out = []
            for mask in range(2**self.n):
                p = list(range(two_n))
                for i in range(self.n):
                    if (mask >> i) & 1:
                        p[i], p[i + self.n] = p[i + self.n], p[i]
                out.append(tuple(p))
            return out
        if self.kind == "type2":
            return [tuple(p) for p in itertools.permutations(range(two_n))]
        labels = self.labels if labels is None else tuple(int(c) for c in labels)
        if labels is None:
            raise ValueError("type3 permutations need a label vector")
        perms = [
            tuple(p)
            for p in itertools.permutations(range(two_n))
            if all(labels[p[i]] == labels[i] for i in range(two_n))
        ]
        if len(perms) > _PERM_CAP:
            raise ValueError("type3 group too large to enumerate")
        return perms


class SymmetryCheck(NamedTuple):
    ok: bool
    max_violation: float


def _rows_for(spec: PermutationSpec, cond: DiscreteConditional):
    """Yield (label row, group) pairs selected by ``spec``."""
    if spec.kind == "type3":
        rows = [spec.labels] if spec.labels is not None else cond.label_vectors()
        for y in rows:
            yield tuple(y), spec.permutations(y)
    else:
        group = spec.permutations()
        for y in cond.label_vectors():
            yield y, group


def check_symmetry(
    cond: DiscreteConditional, spec: PermutationSpec, atol: float = 1e-12
) -> SymmetryCheck:
    """Whether ``cond`` is invariant under the group: Q(yhat_p | y_p) == Q(yhat | y).

    Returns the decision together with the largest absolute violation found.
    """
    if spec.n != cond.n:
        raise ValueError(f"spec.n={spec.n} does not match table n={cond.n}")
    worst = 0.0
    for y, group in _rows_for(spec, cond):
        base = cond.table[y]
        for perm in group:
            y_p = _apply(y, perm)
            permuted = cond.table[y_p][cond.perm_index_map(perm)]
            worst = max(worst, float(np.max(np.abs(permuted - base))))
    return SymmetryCheck(ok=worst <= atol, max_violation=worst)


def symmetrize(cond: DiscreteConditional, spec: PermutationSpec) -> DiscreteConditional:
    """Group average ``(1/|G|) sum_p Q(yhat_p | y_p)``.

    The result passes :func:`check_symmetry` for the same spec, is idempotent,
    and preserves row normalization.  Among all group-symmetric priors it
    minimizes the label-averaged KL divergence from ``cond`` whenever labels
    are i.i.d. (any per-symbol distribution).
    """
    if spec.n != cond.n:
        raise ValueError(f"spec.n={spec.n} does not match table n={cond.n}")
    new_table = {y: row.copy() for y, row in cond.table.items()}
    for y, group in _rows_for(spec, cond):
        acc = np.zeros_like(cond.table[y])
        for perm in group:
            y_p = _apply(y, perm)
            acc += cond.table[y_p][cond.perm_index_map(perm)]
        new_table[y] = acc / len(group)
    return DiscreteConditional(
        n=cond.n,
        label_alphabet=cond.label_alphabet,
        pred_alphabet=cond.pred_alphabet,
        table=new_table,
    )


def _kl_rows(p_row: np.ndarray, q_row: np.ndarray) -> float:
    mask = p_row > 0.0
    if np.any(q_row[mask] <= 0.0):
        return float("inf")
    return float(np.sum(p_row[mask] * (np.log(p_row[mask]) - np.log(q_row[mask]))))


def _label_weights(cond: DiscreteConditional, label_dist) -> dict:
    label_dist = check_prob_vector(label_dist, "label_dist")
    if label_dist.shape[0] != cond.label_alphabet:
        raise ValueError("label_dist length must equal the label alphabet size")
    return {
        y: float(np.prod([label_dist[c] for c in y])) for y in cond.label_vectors()
    }


@dataclass(frozen=True)
class RearrangementJoint:
    """Joint distribution of (rearrangement variable, labels, predictions).

    The base conditional gives predictions for the canonical arrangement
    (training samples at positions ``0..n-1``, ghosts at ``n..2n-1``).  A
    rearrangement ``c`` places them elsewhere; its kernel is
    ``P_c(yhat | y) = base(yhat o c | y o c)``.  Labels are i.i.d. from
    ``label_dist``.
    """

    base: DiscreteConditional
    label_dist: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "label_dist", tuple(check_prob_vector(self.label_dist, "label_dist"))
        )
        if len(self.label_dist) != self.base.label_alphabet:
            raise ValueError("label_dist length must equal the label alphabet size")

    def rearrangements(self, kind: str) -> list[tuple[int, ...]]:
        n = self.base.n
        if kind == "J":
            return PermutationSpec("type1", n).permutations()
        if kind == "T":
            out = []
            for subset in itertools.combinations(range(2 * n), n):
                comp = tuple(i for i in range(2 * n) if i not in subset)
                out.append(subset + comp)
            return out
        raise ValueError(f"kind must be 'J' or 'T', got {kind!r}")


def conditional_mutual_information(joint: RearrangementJoint, kind: str) -> float:
    """Exact I(rearrangement; predictions | labels) by full enumeration.

    ``kind='J'`` uses the ``2^n`` per-pair swaps; ``kind='T'`` uses the
    ``C(2n, n)`` training-position subsets (train and ghost halves each kept
    in sorted order, which is lossless for within-half exchangeable tables).
    """
    cond = joint.base
    if cond.n > 3:
        raise ValueError("exact enumeration is capped at n <= 3")
    perms = joint.rearrangements(kind)
    weights = _label_weights(cond, np.asarray(joint.label_dist))
    index_maps = [cond.perm_index_map(p) for p in perms]
    total = 0.0
    for y, w in weights.items():
        if w == 0.0:
            continue
        kernels = np.stack(
            [cond.table[_apply(y, p)][m] for p, m in zip(perms, index_maps)]
        )
        mix = kernels.mean(axis=0)
        for row in kernels:
            total += w / len(perms) * _kl_rows(row, mix)
    return max(total, 0.0)


def infimum_kl_over_symmetric(
    cond: DiscreteConditional, label_dist, spec: PermutationSpec
) -> float:
    """Smallest label-averaged KL(cond || Q) over group-symmetric priors Q.

    The minimizer is the group average of ``cond``, so the value is
    ``E_Y[KL(cond(.|Y) || symmetrize(cond)(.|Y))]`` with labels i.i.d. from
    ``label_dist``.  For type-I it equals I(J; predictions | labels) of the
    induced joint for any table; for type-II it equals the subset-variable
    mutual information when the table is within-half exchangeable.
    """
    avg = symmetrize(cond, spec)
    weights = _label_weights(cond, label_dist)
    return max(
        sum(
            w * _kl_rows(cond.table[y], avg.table[y])
            for y, w in weights.items()
            if w > 0.0
        ),
        0.0,
    )


def random_conditional(
    n: int, rng: np.random.Generator, label_alphabet: int = 2, pred_alphabet: int = 2
) -> DiscreteConditional:
    """A dense random conditional: each row is an independent Dirichlet(1) draw."""
    size = pred_alphabet ** (2 * n)
    table = {}
    for y in _vectors(label_alphabet, 2 * n):
        row = rng.gamma(1.0, 1.0, size=size)
        table[y] = row / row.sum()
    return DiscreteConditional(n, label_alphabet, pred_alphabet, table)


def exchangeable_random_conditional(
    n: int, rng: np.random.Generator, label_alphabet: int = 2, pred_alphabet: int = 2
) -> DiscreteConditional:
    """A random conditional exchangeable within its train and ghost halves.

    Produced by averaging a :func:`random_conditional` over simultaneous
    permutations of positions ``0..n-1`` and of positions ``n..2n-1`` --
    the invariance every symmetric learning algorithm run on i.i.d. samples
    induces on its prediction table.
    """
    raw = random_conditional(n, rng, label_alphabet, pred_alphabet)
    table = {y: np.zeros_like(row) for y, row in raw.table.items()}
    count = 0
    for pt in itertools.permutations(range(n)):
        for pg in itertools.permutations(range(n, 2 * n)):
            perm = tuple(pt) + tuple(pg)
            imap = raw.perm_index_map(perm)
            count += 1
            for y in raw.table:
                table[y] += raw.table[_apply(y, perm)][imap]
    for y in table:
        table[y] /= count
    return DiscreteConditional(n, label_alphabet, pred_alphabet, table)
