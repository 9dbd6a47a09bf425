"""Vector-autoregression estimation by multivariate least squares.

A VAR(p) over K variables is the regression system

    z_t = nu + A_1 z_{t-1} + ... + A_p z_{t-p} + u_t

estimated equation by equation.  Zero constraints on individual lag
coefficients are imposed exactly, by deleting the matching regressor
columns for the affected equation and re-inserting literal zeros into the
stored coefficient matrices.  That shortcut is algebraically identical to
equality-constrained least squares with zero right-hand sides, and it is
what makes the restricted fits cheap and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import RankDeficiencyError, SchemaError, SeriesTooShortError
from .table import TimeSeriesTable

RANK_RTOL = 1e-10

CRITERIA = ("aic", "bic")


@dataclass(frozen=True)
class Constraint:
    """Force source -> target coefficients to zero at the given lags."""

    target: str
    source: str
    lags: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "lags", frozenset(int(l) for l in self.lags))
        if any(l < 1 for l in self.lags):
            raise SchemaError("constraint lags must be >= 1")


@dataclass(frozen=True, eq=False)
class VarModel:
    names: tuple[str, ...]
    p: int
    t_eff: int
    intercepts: np.ndarray  # (K,)
    coefficients: np.ndarray  # (p, K, K); [lag-1, target, source]
    constraints: tuple[Constraint, ...]
    residuals: np.ndarray  # (t_eff, K)
    ss: np.ndarray  # (K,) per-equation residual sum of squares
    residual_covariance: np.ndarray  # (K, K), normalized by t_eff

    @property
    def k(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise SchemaError(f"unknown column {name!r}") from None

    def coefficient(self, target: str, source: str, lag: int) -> float:
        if not 1 <= lag <= self.p:
            raise SchemaError(f"lag {lag} outside 1..{self.p}")
        return float(self.coefficients[lag - 1, self.index(target), self.index(source)])

    def equation_ss(self, target: str) -> float:
        return float(self.ss[self.index(target)])


def build_design(table: TimeSeriesTable, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Targets and lagged regressors for a VAR(p).

    Row t of the targets holds the values at time t+p; the matching
    regressor row is [1, z_{t+p-1}, ..., z_{t+p-p}] with variables in table
    order inside each lag block.
    """
    if p < 1:
        raise SchemaError("lag order must be >= 1")
    z = table.numeric_matrix()
    t, k = z.shape
    t_eff = t - p
    cols = 1 + k * p
    if t_eff < cols:
        raise SeriesTooShortError(
            f"{t} rows cannot identify a VAR({p}) over {k} variables "
            f"({t_eff} usable rows < {cols} parameters per equation)"
        )
    targets = z[p:, :]
    blocks = [np.ones((t_eff, 1))]
    for lag in range(1, p + 1):
        blocks.append(z[p - lag : t - lag, :])
    return targets, np.hstack(blocks)


def _column_label(names: tuple[str, ...], col: int) -> str:
    if col == 0:
        return "intercept"
    k = len(names)
    lag, j = divmod(col - 1, k)
    return f"{names[j]}[t-{lag + 1}]"


def _diagnose_rank(table: TimeSeriesTable, names, keep) -> list[str]:
    # name the offending columns: constants collide with the intercept,
    # duplicated tags collide with each other
    offenders: list[str] = []
    z = table.numeric_matrix()
    for j, name in enumerate(table.names):
        if float(z[:, j].std()) == 0.0:
            offenders.append(name)
    for a in range(z.shape[1]):
        for b in range(a + 1, z.shape[1]):
            if np.allclose(z[:, a], z[:, b], rtol=1e-12, atol=1e-12):
                offenders.append(table.names[a])
                offenders.append(table.names[b])
    if not offenders:
        offenders = [_column_label(names, c) for c in keep if c != 0]
    seen: list[str] = []
    for name in offenders:
        if name not in seen:
            seen.append(name)
    return seen


def fit_var(
    table: TimeSeriesTable,
    p: int,
    constraints: tuple[Constraint, ...] | list[Constraint] = (),
) -> VarModel:
    """Least-squares VAR(p) fit with exact zero constraints."""
    names = table.names
    k = len(names)
    targets, x = build_design(table, p)
    t_eff = x.shape[0]
    constraints = tuple(constraints)

    banned: dict[int, set[int]] = {}  # equation index -> design columns forced out
    for c in constraints:
        if c.target not in names or c.source not in names:
            raise SchemaError(f"constraint references unknown column: {c.target!r}/{c.source!r}")
        if any(l > p for l in c.lags):
            raise SchemaError(f"constraint lag exceeds model order {p}")
        i = names.index(c.target)
        j = names.index(c.source)
        cols = banned.setdefault(i, set())
        for lag in c.lags:
            cols.add(1 + (lag - 1) * k + j)

    intercepts = np.zeros(k)
    coeffs = np.zeros((p, k, k))
    residuals = np.empty((t_eff, k))
    for i in range(k):
        keep = [c for c in range(x.shape[1]) if c not in banned.get(i, set())]
        xi = x[:, keep]
        sv = np.linalg.svd(xi, compute_uv=False)
        if sv.size == 0 or sv[-1] <= RANK_RTOL * sv[0]:
            raise RankDeficiencyError(_diagnose_rank(table, names, keep))
        beta, _, _, _ = np.linalg.lstsq(xi, targets[:, i], rcond=None)
        full = np.zeros(x.shape[1])
        full[keep] = beta
        intercepts[i] = full[0]
        for lag in range(1, p + 1):
            coeffs[lag - 1, i, :] = full[1 + (lag - 1) * k : 1 + lag * k]
        residuals[:, i] = targets[:, i] - xi @ beta

    ss = np.einsum("ti,ti->i", residuals, residuals)
    sigma = residuals.T @ residuals / t_eff
    return VarModel(
        names=names,
        p=p,
        t_eff=t_eff,
        intercepts=intercepts,
        coefficients=coeffs,
        constraints=constraints,
        residuals=residuals,
        ss=ss,
        residual_covariance=sigma,
    )


def companion_matrix(coefficients: np.ndarray) -> np.ndarray:
    p, k, _ = coefficients.shape
    top = np.hstack([coefficients[l] for l in range(p)])
    if p == 1:
        return top
    lower = np.hstack([np.eye(k * (p - 1)), np.zeros((k * (p - 1), k))])
    return np.vstack([top, lower])


def stability(model: VarModel) -> tuple[bool, float]:
    """Spectral radius of the companion matrix; stable below 1 - 1e-8."""
    radius = float(np.max(np.abs(np.linalg.eigvals(companion_matrix(model.coefficients)))))
    return radius < 1.0 - 1e-8, radius


def select_lag(table: TimeSeriesTable, p_max: int, criterion: str = "bic") -> int:
    """Pick the VAR order in 1..p_max minimizing AIC or BIC.

    All candidate orders are fitted on the common sample implied by p_max
    so the criteria are comparable; ties break to the smaller order.
    """
    if criterion not in CRITERIA:
        raise SchemaError(f"criterion must be one of {CRITERIA}")
    if p_max < 1:
        raise SchemaError("p_max must be >= 1")
    names = table.names
    k = len(names)
    targets, x = build_design(table, p_max)
    n = targets.shape[0]

    best_p, best_score = 1, math.inf
    for p in range(1, p_max + 1):
        cols = list(range(1 + k * p))
        xi = x[:, cols]
        sv = np.linalg.svd(xi, compute_uv=False)
        if sv[-1] <= RANK_RTOL * sv[0]:
            raise RankDeficiencyError(_diagnose_rank(table, names, cols))
        beta, _, _, _ = np.linalg.lstsq(xi, targets, rcond=None)
        resid = targets - xi @ beta
        sigma = resid.T @ resid / n
        sign, logdet = np.linalg.slogdet(sigma)
        if sign <= 0:
            logdet = -math.inf  # perfect fit; smallest possible criterion
        params = k * (1 + k * p)
        penalty = 2.0 * params / n if criterion == "aic" else math.log(n) * params / n
        score = logdet + penalty
        if score < best_score - 1e-12:
            best_p, best_score = p, score
    return best_p
