"""Unit-root testing and differencing to the order of integration.

The augmented Dickey-Fuller regression (constant, no trend)

    dx_t = c + rho * x_{t-1} + sum_{i=1..k} phi_i * dx_{t-i} + e_t

is fitted by least squares; the test statistic is the t-ratio on ``rho``.
Augmentation lags are selected by BIC over ``0..max_lags`` on a common
sample, then the chosen regression is refitted on the full usable sample.
Critical values come from the published constant-only response-surface
approximation embedded below; no simulation happens at runtime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSeriesError, SchemaError, SeriesTooShortError

ALPHAS = (0.01, 0.05, 0.10)

# Response-surface coefficients (b0, b1, b2, b3) for the constant-only test
# statistic: cv(n) = b0 + b1/n + b2/n^2 + b3/n^3 with n the regression sample
# size.  Published univariate values; b0 is the asymptotic critical value.
CRITICAL_SURFACE: dict[float, tuple[float, float, float, float]] = {
    0.01: (-3.43035, -6.5393, -16.786, -79.433),
    0.05: (-2.86154, -2.8903, -4.234, -40.040),
    0.10: (-2.56677, -1.5384, -2.809, 0.0),
}

MIN_REGRESSION_ROWS = 20


def critical_value(alpha: float, nobs: int) -> float:
    b0, b1, b2, b3 = CRITICAL_SURFACE[alpha]
    return b0 + b1 / nobs + b2 / nobs**2 + b3 / nobs**3


def schwert_lag_bound(t: int) -> int:
    """The customary upper bound ``floor(12 * (T/100)^(1/4))`` on lag count."""
    return int(math.floor(12.0 * (t / 100.0) ** 0.25))


@dataclass(frozen=True)
class AdfResult:
    statistic: float
    lags_used: int
    constant_only: bool
    critical_values: dict[float, float]
    alpha: float
    reject_unit_root: bool
    nobs: int

    def to_json_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "lags_used": self.lags_used,
            "constant_only": self.constant_only,
            "critical_values": {f"{int(a * 100)}%": v for a, v in sorted(self.critical_values.items())},
            "alpha": self.alpha,
            "reject_unit_root": self.reject_unit_root,
            "nobs": self.nobs,
        }


@dataclass(frozen=True)
class ColumnIntegration:
    """Per-column outcome: order found, the ADF chain, and the series kept.

    ``series`` holds the values differenced to the order the whole system
    settles on (the differencing grid is shared across columns downstream),
    while ``order`` is what this column's own ADF sequence determined.
    ``saturated`` flags a column that never rejected within ``max_order``.
    """

    name: str
    order: int
    tests: tuple[AdfResult, ...]
    series: tuple[float, ...]
    saturated: bool

    def to_json_dict(self, include_series: bool = False) -> dict:
        out = {
            "name": self.name,
            "order": self.order,
            "tests": [t.to_json_dict() for t in self.tests],
            "saturated": self.saturated,
        }
        if include_series:
            out["series"] = list(self.series)
        return out


@dataclass(frozen=True)
class IntegrationReport:
    columns: tuple[ColumnIntegration, ...]
    common_order: int
    guard: bool  # lag-guard contract: fit one extra unconstrained lag downstream

    def entry(self, name: str) -> ColumnIntegration:
        for c in self.columns:
            if c.name == name:
                return c
        raise SchemaError(f"no integration entry for {name!r}")

    def to_json_dict(self, include_series: bool = False) -> dict:
        return {
            "columns": [c.to_json_dict(include_series) for c in self.columns],
            "common_order": self.common_order,
            "guard": self.guard,
        }


def difference(x, order: int) -> np.ndarray:
    """d-fold first difference; order 0 is the identity."""
    x = np.asarray(x, dtype=float)
    if order < 0:
        raise SchemaError("order must be non-negative")
    if x.size <= order:
        raise SeriesTooShortError(f"cannot difference {x.size} points {order} times")
    for _ in range(order):
        x = x[1:] - x[:-1]
    return x


def _ols(y: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, float]:
    beta, _, _, _ = np.linalg.lstsq(x, y, rcond=None)
    resid = y - x @ beta
    return beta, float(resid @ resid)


def adf_test(x, max_lags: int | None = None, alpha: float = 0.05) -> AdfResult:
    """Augmented Dickey-Fuller test, constant-only regression.

    Rejecting the unit root (statistic below the critical value) supports
    treating the series as stationary.
    """
    if alpha not in ALPHAS:
        raise SchemaError(f"alpha must be one of {ALPHAS}")
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise SchemaError("input must be a 1-d series")
    t = x.size
    if float(x.std()) == 0.0:
        raise DegenerateSeriesError("zero-variance series")

    bound = schwert_lag_bound(t) if max_lags is None else int(max_lags)
    if bound < 0:
        raise SchemaError("max_lags must be non-negative")
    # keep enough rows on the selection sample: n = t - 1 - k, params = k + 2
    bound = min(bound, t - 1 - MIN_REGRESSION_ROWS)
    if t - 1 - max(bound, 0) < MIN_REGRESSION_ROWS:
        raise SeriesTooShortError(
            f"need at least {MIN_REGRESSION_ROWS} regression rows, "
            f"series of length {t} is too short"
        )
    bound = max(bound, 0)

    dx = x[1:] - x[:-1]

    def design(k: int, start: int) -> tuple[np.ndarray, np.ndarray]:
        # rows are times start..t-2 of dx (predicting dx at that time)
        rows = np.arange(start, dx.size)
        cols = [np.ones(rows.size), x[rows]]  # x[rows] = level at time rows (lag 1)
        for i in range(1, k + 1):
            cols.append(dx[rows - i])
        return dx[rows], np.column_stack(cols)

    # lag selection by BIC on the common sample starting at `bound`
    best_k, best_bic = 0, math.inf
    for k in range(bound + 1):
        y, xm = design(k, bound)
        n = y.size
        _, ssr = _ols(y, xm)
        if ssr <= 0.0:
            bic = -math.inf
        else:
            bic = n * math.log(ssr / n) + (k + 2) * math.log(n)
        if bic < best_bic - 1e-12:
            best_k, best_bic = k, bic

    y, xm = design(best_k, best_k)
    n = y.size
    beta, ssr = _ols(y, xm)
    dof = n - xm.shape[1]
    if dof <= 0 or ssr <= 0.0:
        raise DegenerateSeriesError("degenerate Dickey-Fuller regression")
    sigma2 = ssr / dof
    xtx_inv = np.linalg.inv(xm.T @ xm)
    se_rho = math.sqrt(sigma2 * xtx_inv[1, 1])
    statistic = float(beta[1] / se_rho)

    cvs = {a: critical_value(a, n) for a in ALPHAS}
    return AdfResult(
        statistic=statistic,
        lags_used=best_k,
        constant_only=True,
        critical_values=cvs,
        alpha=alpha,
        reject_unit_root=statistic < cvs[alpha],
        nobs=n,
    )


def integration_order(
    x,
    max_order: int = 2,
    alpha: float = 0.05,
    max_lags: int | None = None,
    name: str = "",
) -> ColumnIntegration:
    """Difference until the unit root is rejected, up to ``max_order``."""
    x = np.asarray(x, dtype=float)
    tests: list[AdfResult] = []
    current = x
    order = 0
    saturated = False
    while True:
        result = adf_test(current, max_lags=max_lags, alpha=alpha)
        tests.append(result)
        if result.reject_unit_root:
            break
        if order == max_order:
            saturated = True
            break
        current = difference(current, 1)
        order += 1
    return ColumnIntegration(
        name=name,
        order=order,
        tests=tuple(tests),
        series=tuple(float(v) for v in current),
        saturated=saturated,
    )
