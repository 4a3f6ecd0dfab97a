"""Spearman rank correlation and the Mantel permutation test.

The Mantel statistic here is the Spearman correlation of the two condensed
upper-triangle vectors (i < j, row-major).  The null distribution relabels
the nodes of the second matrix (simultaneous row+column permutation) with a
fresh seeded permutation per replicate, and the p-value uses the add-one
rule, so 999 permutations give a floor of exactly 0.001.  The test is
two-sided on |r|: metrics with inverted scales should not change
significance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteMetricError
from .metrics import DistanceMatrix
from .rng import hash_fields, permutation


@dataclass(frozen=True)
class MantelResult:
    statistic_r: float
    p_value: float
    permutations: int
    seed: int
    tail: str = "two_sided"

    def to_json(self, metric_a: str = "", metric_b: str = "") -> str:
        return json.dumps(
            {
                "metric_a": metric_a,
                "metric_b": metric_b,
                "r": self.statistic_r,
                "p": self.p_value,
                "permutations": self.permutations,
                "seed": self.seed,
            },
            indent=2,
        ) + "\n"


def rankdata(x: np.ndarray) -> np.ndarray:
    """Average ranks (1-based); ties get the mean of their rank span."""
    x = np.asarray(x)
    order = np.argsort(x, kind="stable")
    sorted_x = x[order]
    ranks = np.empty(len(x))
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and sorted_x[j + 1] == sorted_x[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    """Pearson correlation of the average-ranked vectors."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 3:
        raise ValueError("need two equal-length vectors of length >= 3")
    rx = rankdata(x)
    ry = rankdata(y)
    rx -= rx.mean()
    ry -= ry.mean()
    # np.dot throughout so that spearman(x, x) is exactly 1.0
    denom = np.sqrt(np.dot(rx, rx) * np.dot(ry, ry))
    if denom == 0.0:
        raise NonFiniteMetricError("constant vector has no rank correlation")
    return float(np.dot(rx, ry) / denom)


def _condensed(values: np.ndarray) -> np.ndarray:
    iu = np.triu_indices(values.shape[0], k=1)
    return values[iu]


def mantel(
    a: DistanceMatrix,
    b: DistanceMatrix,
    permutations: int = 999,
    seed: int = 0,
) -> MantelResult:
    """Two-sided Mantel test between two same-size symmetric matrices.

    Each replicate draws its own node relabeling from a seed derived from
    (seed, replicate index), so results do not depend on evaluation order.
    """
    n = a.size
    if b.size != n:
        raise ValueError(f"matrix size mismatch: {n} vs {b.size}")
    if n < 4:
        raise ValueError("Mantel test needs matrices of size >= 4")
    if permutations < 1:
        raise ValueError("need at least one permutation")
    if not (
        np.array_equal(a.values, a.values.T, equal_nan=True)
        and np.array_equal(b.values, b.values.T, equal_nan=True)
    ):
        raise ValueError("Mantel test expects symmetric matrices")

    va = _condensed(a.values)
    r_obs = spearman(va, _condensed(b.values))

    exceed = 0
    for k in range(permutations):
        perm = permutation(hash_fields(seed, "mantel-replicate", k), n)
        shuffled = b.values[np.ix_(perm, perm)]
        r_perm = spearman(va, _condensed(shuffled))
        if abs(r_perm) >= abs(r_obs):
            exceed += 1
    p = (1 + exceed) / (1 + permutations)
    return MantelResult(r_obs, p, permutations, seed)
