"""Contemporaneous pairwise relation scores.

Three metrics over same-time-index samples: Pearson (linear), Spearman rank
(monotonic), and a Euclidean similarity defined as ``1 / (1 + d / sqrt(T))``
on z-scored series, which makes it scale-free, length-invariant, and bounded
in (0, 1] with a diagonal of exactly 1 like the other two.

Zero-variance series raise :class:`DegenerateSeriesError` at the scalar
level; the matrix assembler maps them to flagged 0 scores instead so one dead
sensor cannot abort a whole-plant analysis.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

from .errors import DegenerateSeriesError, SchemaError, SeriesTooShortError
from .table import TimeSeriesTable

METHODS = ("pearson", "spearman", "euclidean")

MIN_SAMPLES = 3


def _as_pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
        raise SchemaError("inputs must be 1-d series of equal length")
    if x.size < MIN_SAMPLES:
        raise SeriesTooShortError(f"need at least {MIN_SAMPLES} observations")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise SchemaError("inputs must be fully observed and finite")
    return x, y


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson coefficient: covariance over the product of sample SDs."""
    x, y = _as_pair(x, y)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateSeriesError("zero variance input")
    denom = math.sqrt(sxx * syy)
    if denom == 0.0 or math.isinf(denom):
        # the product under/overflowed; normalize each factor separately
        r = float((dx / math.sqrt(sxx)) @ (dy / math.sqrt(syy)))
    else:
        r = float(dx @ dy) / denom
    return min(1.0, max(-1.0, r))


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson coefficient of rank vectors; ties get average ranks."""
    x, y = _as_pair(x, y)
    return pearson(rankdata(x, method="average"), rankdata(y, method="average"))


def _zscore(x: np.ndarray) -> np.ndarray:
    sd = float(x.std())  # population convention; zero-variance maps to zeros
    if sd == 0.0:
        return np.zeros_like(x)
    return (x - x.mean()) / sd


def euclidean_similarity(x: Sequence[float], y: Sequence[float]) -> float:
    """``1 / (1 + d / sqrt(T))`` for the distance d between z-scored series."""
    x, y = _as_pair(x, y)
    d = float(np.linalg.norm(_zscore(x) - _zscore(y)))
    return 1.0 / (1.0 + d / math.sqrt(x.size))


_SCALAR = {"pearson": pearson, "spearman": spearman, "euclidean": euclidean_similarity}


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric pairwise scores for one method, diagonal exactly 1.

    ``degenerate`` lists zero-variance columns; their off-diagonal scores are
    0 and any pair touching them is flagged rather than scored.
    """

    method: str
    names: tuple[str, ...]
    scores: tuple[tuple[float, ...], ...]
    degenerate: frozenset[str]

    def score(self, a: str, b: str) -> float:
        i, j = self.names.index(a), self.names.index(b)
        return self.scores[i][j]

    def is_flagged(self, a: str, b: str) -> bool:
        return a in self.degenerate or b in self.degenerate

    def to_json_dict(self) -> dict:
        return {
            "method": self.method,
            "names": list(self.names),
            "scores": [list(row) for row in self.scores],
            "degenerate": sorted(self.degenerate),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def correlation_matrix(table: TimeSeriesTable, method: str) -> CorrelationMatrix:
    """Score every column pair of a fully numeric, complete table."""
    if method not in METHODS:
        raise SchemaError(f"method must be one of {METHODS}, got {method!r}")
    if len(table.columns) < 2:
        raise SchemaError("correlation matrix needs at least 2 columns")
    data = table.numeric_matrix()
    if data.shape[0] < MIN_SAMPLES:
        raise SeriesTooShortError(f"need at least {MIN_SAMPLES} rows")
    names = table.names
    degenerate = frozenset(
        n for j, n in enumerate(names) if float(data[:, j].std()) == 0.0
    )
    scalar = _SCALAR[method]
    n = len(names)
    scores = [[0.0] * n for _ in range(n)]
    for i in range(n):
        scores[i][i] = 1.0
        for j in range(i + 1, n):
            if names[i] in degenerate or names[j] in degenerate:
                value = 0.0
            else:
                value = scalar(data[:, i], data[:, j])
            scores[i][j] = scores[j][i] = value
    return CorrelationMatrix(
        method=method,
        names=names,
        scores=tuple(tuple(row) for row in scores),
        degenerate=degenerate,
    )


@dataclass(frozen=True)
class NormalitySummary:
    """Advisory shape summary used as the graphical normality check."""

    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]
    skewness: float
    excess_kurtosis: float

    def to_json_dict(self) -> dict:
        return {
            "bin_edges": list(self.bin_edges),
            "counts": list(self.counts),
            "skewness": self.skewness,
            "excess_kurtosis": self.excess_kurtosis,
        }


def normality_summary(x: Sequence[float], bins: int = 20) -> NormalitySummary:
    """Equal-width histogram plus moment-based skewness and excess kurtosis."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 8:
        raise SeriesTooShortError("need at least 8 observations")
    if not np.isfinite(x).all():
        raise SchemaError("input must be fully observed and finite")
    if bins < 1:
        raise SchemaError("bins must be positive")
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        raise DegenerateSeriesError("degenerate range: min equals max")
    counts, edges = np.histogram(x, bins=bins, range=(lo, hi))
    centered = x - x.mean()
    m2 = float(np.mean(centered**2))
    m3 = float(np.mean(centered**3))
    m4 = float(np.mean(centered**4))
    return NormalitySummary(
        bin_edges=tuple(float(e) for e in edges),
        counts=tuple(int(c) for c in counts),
        skewness=m3 / m2**1.5,
        excess_kurtosis=m4 / m2**2 - 3.0,
    )
