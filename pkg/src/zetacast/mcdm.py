"""AHP criterion weights and TOPSIS-style model rankings.

Three scorers are provided because the published comparison is ambiguous:
``score_row_sum`` reproduces the printed scores (sums of already-weighted
criterion values), ``score_linear_gap`` applies the printed linear formula
``C_i = sum_j w_j (d-_j - d_ij) / (d-_j - d+_j)``, and
``score_standard_topsis`` is the usual closeness coefficient.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

# Saaty's random consistency indices for n = 1..9
RANDOM_INDEX = {1: 0.0, 2: 0.0, 3: 0.58, 4: 0.90, 5: 1.12, 6: 1.24, 7: 1.32, 8: 1.41, 9: 1.45}

Method = Literal["row-sum", "linear-gap", "standard-topsis"]


class McdmError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PairwiseMatrix:
    values: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.values, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise McdmError("pairwise matrix must be square")
        if np.any(m <= 0):
            raise McdmError("pairwise comparisons must be positive")
        if not np.allclose(np.diag(m), 1.0, atol=1e-9):
            raise McdmError("pairwise matrix diagonal must be 1")
        if not np.allclose(m * m.T, 1.0, atol=1e-9):
            raise McdmError("pairwise matrix is not reciprocal")
        object.__setattr__(self, "values", m)

    @classmethod
    def from_upper(cls, upper: Sequence[Sequence[float]]) -> PairwiseMatrix:
        """Build from the strictly-upper judgements, row by row (row i has n-1-i entries)."""
        n = len(upper) + 1
        m = np.ones((n, n))
        for i, row in enumerate(upper):
            if len(row) != n - 1 - i:
                raise McdmError(f"row {i} of the upper triangle needs {n - 1 - i} entries")
            for k, v in enumerate(row):
                j = i + 1 + k
                m[i, j], m[j, i] = v, 1.0 / v
        return cls(m)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def ahp_weights(
    matrix: PairwiseMatrix | Sequence[Sequence[float]], tol: float = 1e-13, max_iter: int = 10_000
) -> tuple[np.ndarray, float]:
    """Principal-eigenvector weights (summing to 1) and Saaty's consistency ratio."""
    pm = matrix if isinstance(matrix, PairwiseMatrix) else PairwiseMatrix(np.asarray(matrix))
    a, n = pm.values, pm.n
    if not 2 <= n <= 9:
        raise McdmError(f"AHP supports 2..9 criteria, got {n}")
    w = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = a @ w
        nxt /= nxt.sum()
        if np.abs(nxt - w).max() < tol:
            w = nxt
            break
        w = nxt
    else:
        raise McdmError("power iteration did not converge")
    lam = float(np.mean((a @ w) / w))
    ri = RANDOM_INDEX[n]
    cr = 0.0 if ri == 0 else max((lam - n) / (n - 1), 0.0) / ri
    return w, cr


@dataclass(frozen=True, eq=False)
class DecisionMatrix:
    models: tuple[str, ...]
    criteria: tuple[str, ...]
    values: np.ndarray
    weights: np.ndarray | None = None
    benefit: tuple[bool, ...] | None = None

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=float)
        if v.shape != (len(self.models), len(self.criteria)):
            raise McdmError(f"values shape {v.shape} does not match models x criteria")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise McdmError("criterion values must be finite and nonnegative")
        w = np.full(len(self.criteria), 1.0 / len(self.criteria)) if self.weights is None else np.array(self.weights, dtype=float)
        if w.shape != (len(self.criteria),) or np.any(w < 0):
            raise McdmError("weights must be nonnegative, one per criterion")
        b = (True,) * len(self.criteria) if self.benefit is None else tuple(self.benefit)
        if len(b) != len(self.criteria):
            raise McdmError("need one benefit flag per criterion")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "benefit", b)

    @classmethod
    def from_csv(cls, path: str | Path, weights: Sequence[float] | None = None) -> DecisionMatrix:
        with Path(path).open(newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r]
        if len(rows) < 2:
            raise McdmError(f"{path}: no models")
        header = rows[0]
        models, values = [], []
        for row_no, row in enumerate(rows[1:], start=2):
            if len(row) != len(header):
                raise McdmError(f"{path} row {row_no}: expected {len(header)} fields")
            models.append(row[0])
            try:
                values.append([float(x) for x in row[1:]])
            except ValueError:
                raise McdmError(f"{path} row {row_no}: non-numeric criterion value") from None
        return cls(tuple(models), tuple(header[1:]), np.array(values), weights)


@dataclass(frozen=True)
class RankingReport:
    models: tuple[str, ...]
    scores: tuple[float, ...]
    ranks: tuple[int, ...]
    method: Method
    extra: dict = field(default_factory=dict)

    @property
    def order(self) -> list[str]:
        """Model labels from rank 1 downward."""
        return [m for _, m in sorted(zip(self.ranks, self.models))]

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "models": [
                {"model": m, "score": s, "rank": r} for m, s, r in zip(self.models, self.scores, self.ranks)
            ],
            **self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def write_bar_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["model", "score", "rank", "method"])
            for m, s, r in zip(self.models, self.scores, self.ranks):
                w.writerow([m, repr(s), r, self.method])


def _rank(models: Sequence[str], scores: np.ndarray, method: Method, **extra) -> RankingReport:
    order = np.argsort(-scores, kind="stable")
    ranks = np.empty(len(scores), dtype=int)
    ranks[order] = np.arange(1, len(scores) + 1)
    return RankingReport(
        tuple(models), tuple(float(s) for s in scores), tuple(int(r) for r in ranks), method, extra
    )


def score_row_sum(matrix: DecisionMatrix) -> RankingReport:
    return _rank(matrix.models, matrix.values.sum(axis=1), "row-sum")


def score_linear_gap(
    matrix: DecisionMatrix,
    dplus: Sequence[float] | None = None,
    dminus: Sequence[float] | None = None,
) -> RankingReport:
    """Linear closeness ``sum_j w_j (d-_j - d_ij) / (d-_j - d+_j)``.

    ``dplus``/``dminus`` default to each criterion's best and worst observed
    value (max/min for benefit criteria).
    """
    v = matrix.values
    ben = np.array(matrix.benefit)
    best = np.where(ben, v.max(axis=0), v.min(axis=0))
    worst = np.where(ben, v.min(axis=0), v.max(axis=0))
    dp = best if dplus is None else np.asarray(dplus, dtype=float)
    dm = worst if dminus is None else np.asarray(dminus, dtype=float)
    span = dm - dp
    if np.any(span == 0):
        bad = [c for c, s in zip(matrix.criteria, span) if s == 0]
        raise McdmError(f"degenerate criterion (d- == d+): {bad}")
    scores = ((dm - v) / span) @ matrix.weights
    return _rank(matrix.models, scores, "linear-gap")


def score_standard_topsis(matrix: DecisionMatrix) -> RankingReport:
    """Vector-normalised, weighted TOPSIS closeness ``D- / (D+ + D-)``.

    When a model is equally far from both ideals (e.g. a single model) its
    closeness is defined as 1.
    """
    v = matrix.values
    norms = np.sqrt((v**2).sum(axis=0))
    if np.any(norms == 0):
        bad = [c for c, s in zip(matrix.criteria, norms) if s == 0]
        raise McdmError(f"all-zero criterion column(s): {bad}")
    z = v / norms * matrix.weights
    ben = np.array(matrix.benefit)
    ideal = np.where(ben, z.max(axis=0), z.min(axis=0))
    anti = np.where(ben, z.min(axis=0), z.max(axis=0))
    d_plus = np.sqrt(((z - ideal) ** 2).sum(axis=1))
    d_minus = np.sqrt(((z - anti) ** 2).sum(axis=1))
    total = d_plus + d_minus
    closeness = np.divide(d_minus, total, out=np.ones_like(total), where=total > 0)
    return _rank(
        matrix.models, closeness, "standard-topsis",
        d_plus=d_plus.tolist(), d_minus=d_minus.tolist(),
    )


SCORERS = {
    "row-sum": score_row_sum,
    "linear-gap": score_linear_gap,
    "standard-topsis": score_standard_topsis,
}
