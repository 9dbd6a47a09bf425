"""Pairwise Granger-noncausality testing over a numeric table.

For an ordered pair (source, target) the full model regresses the target
on p lags of both variables; the constrained model forces the source's
lag coefficients to zero.  The test statistic compares the two residual
sums of squares on the target equation:

    F = ((ss_c - ss_f) / p) / (ss_f / (T - p + 1))

with T the length of the (possibly differenced) table.  Under the null
of noncausality F follows an F(p, T - p + 1) distribution, large values
rejecting the null.  ``discover`` sweeps all ordered pairs, handles
nonstationary inputs by differencing to a common integration order with
a one-extra-lag safeguard, and optionally controls the false discovery
rate across the sweep.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from itertools import product

from scipy.special import betainc

from .errors import DeterministicRelationError, KgforgeError, SchemaError
from .stationarity import ColumnIntegration, IntegrationReport, integration_order
from .table import TimeSeriesTable, from_numeric
from .var import CRITERIA, Constraint, fit_var, select_lag

LAG_POLICIES = ("fixed", "information_criterion", "scan_best")
MULTIPLE_TESTING = ("none", "benjamini_hochberg")
DF_CONVENTIONS = ("horizon", "residual")
CONDITIONING = ("pairwise", "full")

F_CLAMP_RTOL = 1e-12


def f_statistic(ss_c: float, ss_f: float, p: int, t: int) -> float:
    """F ratio of constrained vs full residual sums of squares."""
    if ss_f < 0.0 or ss_c < 0.0:
        raise SchemaError("sums of squares must be non-negative")
    if p < 1:
        raise SchemaError("lag count must be >= 1")
    if t - p + 1 <= 0:
        raise SchemaError(f"denominator degrees of freedom {t - p + 1} <= 0")
    if ss_f == 0.0:
        raise DeterministicRelationError(
            "full model fits exactly; F ratio undefined (deterministic relation)"
        )
    diff = ss_c - ss_f
    if diff < 0.0:
        # LS under restriction cannot beat the full model; tiny negatives are rounding
        if -diff <= F_CLAMP_RTOL * ss_f:
            diff = 0.0
        else:
            raise SchemaError("constrained fit beats the full fit; models mismatched")
    return (diff / p) / (ss_f / (t - p + 1))


def f_pvalue(f: float, df1: int, df2: int) -> float:
    """Upper-tail probability of the F(df1, df2) distribution."""
    if f < 0.0:
        raise SchemaError("F statistic must be non-negative")
    if df1 < 1 or df2 < 1:
        raise SchemaError("degrees of freedom must be >= 1")
    if f == 0.0:
        return 1.0
    x = df2 / (df2 + df1 * f)
    return float(betainc(df2 / 2.0, df1 / 2.0, x))


def benjamini_hochberg(p_values: list[float]) -> list[float]:
    """Step-up adjusted p-values controlling the false discovery rate."""
    m = len(p_values)
    order = sorted(range(m), key=lambda i: p_values[i])
    adjusted = [0.0] * m
    running = 1.0
    for rank in range(m - 1, -1, -1):
        i = order[rank]
        running = min(running, p_values[i] * m / (rank + 1))
        adjusted[i] = running
    return adjusted


@dataclass(frozen=True)
class GrangerResult:
    source: str
    target: str
    p: int  # tested lag span (constrained lags 1..p)
    ss_full: float
    ss_constrained: float
    f_statistic: float
    df: tuple[int, int]
    p_value: float
    significant: bool
    fitted_on: int  # order of differencing applied to the data
    extra_lag_guard: bool
    p_adjusted: float | None = None
    selection_biased: bool = False
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    def effective_p_value(self) -> float:
        return self.p_value if self.p_adjusted is None else self.p_adjusted

    def to_json_dict(self) -> dict:
        def num(v):
            return None if isinstance(v, float) and math.isnan(v) else v

        return {
            "source": self.source,
            "target": self.target,
            "p": self.p,
            "ss_full": num(self.ss_full),
            "ss_constrained": num(self.ss_constrained),
            "f_statistic": num(self.f_statistic),
            "df": list(self.df),
            "p_value": num(self.p_value),
            "p_adjusted": self.p_adjusted,
            "significant": self.significant,
            "fitted_on": self.fitted_on,
            "extra_lag_guard": self.extra_lag_guard,
            "selection_biased": self.selection_biased,
            "error": self.error,
        }


def _failed_result(source: str, target: str, p: int, fitted_on: int, guard: bool, message: str) -> GrangerResult:
    return GrangerResult(
        source=source,
        target=target,
        p=p,
        ss_full=math.nan,
        ss_constrained=math.nan,
        f_statistic=math.nan,
        df=(0, 0),
        p_value=math.nan,
        significant=False,
        fitted_on=fitted_on,
        extra_lag_guard=guard,
        error=message,
    )


@dataclass(frozen=True)
class DiscoveryConfig:
    """Knobs for the all-pairs causality sweep.

    lag_policy:
      fixed                 test every pair at ``fixed_p``
      information_criterion pick the order per pair by ``criterion``
      scan_best             test 1..p_max, keep the minimum p-value
    p_max of None resolves to min(10, T // 20) at run time.
    denominator_df "horizon" uses df2 = T - p + 1; "residual" swaps in the
    textbook residual degrees of freedom of the full equation.
    conditioning "full" fits one VAR over all columns and constrains the
    source's lags there, instead of the default bivariate fits.
    """

    alpha: float = 0.05
    p_max: int | None = None
    lag_policy: str = "scan_best"
    fixed_p: int = 1
    criterion: str = "bic"
    multiple_testing: str = "none"
    auto_stationarity: bool = True
    adf_alpha: float = 0.05
    max_integration_order: int = 2
    denominator_df: str = "horizon"
    conditioning: str = "pairwise"

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise SchemaError("alpha must lie in (0, 1)")
        if self.p_max is not None and self.p_max < 1:
            raise SchemaError("p_max must be >= 1")
        if self.lag_policy not in LAG_POLICIES:
            raise SchemaError(f"lag_policy must be one of {LAG_POLICIES}")
        if self.lag_policy == "fixed" and self.fixed_p < 1:
            raise SchemaError("fixed_p must be >= 1")
        if self.criterion not in CRITERIA:
            raise SchemaError(f"criterion must be one of {CRITERIA}")
        if self.multiple_testing not in MULTIPLE_TESTING:
            raise SchemaError(f"multiple_testing must be one of {MULTIPLE_TESTING}")
        if self.denominator_df not in DF_CONVENTIONS:
            raise SchemaError(f"denominator_df must be one of {DF_CONVENTIONS}")
        if self.conditioning not in CONDITIONING:
            raise SchemaError(f"conditioning must be one of {CONDITIONING}")

    def resolved_p_max(self, t: int) -> int:
        if self.p_max is not None:
            return self.p_max
        return max(1, min(10, t // 20))

    def to_json_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "p_max": self.p_max,
            "lag_policy": self.lag_policy,
            "fixed_p": self.fixed_p,
            "criterion": self.criterion,
            "multiple_testing": self.multiple_testing,
            "auto_stationarity": self.auto_stationarity,
            "adf_alpha": self.adf_alpha,
            "max_integration_order": self.max_integration_order,
            "denominator_df": self.denominator_df,
            "conditioning": self.conditioning,
        }


def _test_pair(
    table: TimeSeriesTable,
    source: str,
    target: str,
    p: int,
    guard: bool,
    alpha: float,
    fitted_on: int,
    denominator_df: str = "horizon",
    conditioning: str = "pairwise",
) -> GrangerResult:
    order = p + 1 if guard else p
    if conditioning == "full" and len(table.names) > 2 and source != target:
        sub = table
    else:
        cols = [n for n in table.names if n in (source, target)]
        sub = table.select(cols)
    constraint = Constraint(target=target, source=source, lags=frozenset(range(1, p + 1)))
    full = fit_var(sub, order)
    restricted = fit_var(sub, order, constraints=(constraint,))
    ss_f = full.equation_ss(target)
    ss_c = restricted.equation_ss(target)
    # least squares leaves rounding dust where the fit is exact; treat a
    # residual that small relative to the restricted fit as a perfect fit
    if ss_f <= F_CLAMP_RTOL * ss_c:
        ss_f = 0.0
    t = sub.t
    f = f_statistic(ss_c, ss_f, p, t)
    if denominator_df == "horizon":
        df = (p, t - p + 1)
    else:
        k = len(sub.names)
        df = (p, full.t_eff - (1 + k * order))
    p_value = f_pvalue(f, df[0], df[1])
    return GrangerResult(
        source=source,
        target=target,
        p=p,
        ss_full=ss_f,
        ss_constrained=ss_c,
        f_statistic=f,
        df=df,
        p_value=p_value,
        significant=p_value < alpha,
        fitted_on=fitted_on,
        extra_lag_guard=guard,
    )


def granger_test(
    table: TimeSeriesTable,
    source: str,
    target: str,
    p: int,
    guard: bool = False,
    alpha: float = 0.05,
    denominator_df: str = "horizon",
) -> GrangerResult:
    """Test whether ``source`` Granger-causes ``target`` at lag span p.

    The caller is responsible for stationarity.  source == target runs the
    self-predictability variant: an AR(p) against an intercept-only model.
    """
    if denominator_df not in DF_CONVENTIONS:
        raise SchemaError(f"denominator_df must be one of {DF_CONVENTIONS}")
    if p < 1:
        raise SchemaError("lag span must be >= 1")
    for name in (source, target):
        if name not in table.names:
            raise SchemaError(f"unknown column {name!r}")
    return _test_pair(table, source, target, p, guard, alpha, fitted_on=0,
                      denominator_df=denominator_df)


@dataclass(frozen=True)
class DiscoveryOutcome:
    results: tuple[GrangerResult, ...]
    integration: IntegrationReport
    config: DiscoveryConfig

    def significant_edges(self) -> tuple[GrangerResult, ...]:
        return tuple(r for r in self.results if not r.failed and r.significant)

    def to_json_dict(self) -> dict:
        return {
            "results": [r.to_json_dict() for r in self.results],
            "integration": self.integration.to_json_dict(),
            "config": self.config.to_json_dict(),
        }


def _difference_table(table: TimeSeriesTable, order: int) -> TimeSeriesTable:
    if order == 0:
        return table
    out = table.numeric_matrix()
    for _ in range(order):
        out = out[1:] - out[:-1]
    return from_numeric(
        index=table.index[order:],
        names=table.names,
        matrix=out,
        index_kind=table.index_kind,
        source=table.source,
    )


def _stationarize(table: TimeSeriesTable, config: DiscoveryConfig) -> tuple[TimeSeriesTable, IntegrationReport]:
    if not config.auto_stationarity:
        report = IntegrationReport(columns=(), common_order=0, guard=False)
        return table, report
    entries = []
    for name in table.names:
        try:
            entries.append(
                integration_order(
                    table.series(name),
                    max_order=config.max_integration_order,
                    alpha=config.adf_alpha,
                    name=name,
                )
            )
        except KgforgeError:
            # untestable column (constant, too short): leave it undifferenced and
            # let the per-pair fits surface the problem as error markers
            entries.append(
                ColumnIntegration(
                    name=name,
                    order=0,
                    tests=(),
                    series=tuple(float(v) for v in table.series(name)),
                    saturated=False,
                )
            )
    common = max((e.order for e in entries), default=0)
    worked = _difference_table(table, common)
    final = tuple(
        dataclasses.replace(e, series=tuple(float(v) for v in worked.series(e.name)))
        for e in entries
    )
    report = IntegrationReport(columns=final, common_order=common, guard=common > 0)
    return worked, report


def discover(table: TimeSeriesTable, config: DiscoveryConfig | None = None) -> DiscoveryOutcome:
    """All ordered pairs, lag policy applied, optional FDR control.

    A failing pair is recorded with an error marker instead of aborting
    the sweep.  Single-column tables yield no pairs (self-predictability
    alone carries no cross-column information).
    """
    config = config or DiscoveryConfig()
    table.numeric_matrix()  # raises on categorical or missing cells
    worked, report = _stationarize(table, config)
    guard = report.guard
    fitted_on = report.common_order
    names = worked.names

    if len(names) < 2:
        return DiscoveryOutcome(results=(), integration=report, config=config)

    p_max = config.resolved_p_max(worked.t)
    scan = config.lag_policy == "scan_best"

    pairs = sorted(product(names, names))  # result order: lexicographic

    # candidate results per pair; scan_best keeps one per lag until adjusted
    candidates: dict[tuple[str, str], list[GrangerResult]] = {}
    failures: dict[tuple[str, str], GrangerResult] = {}
    for pair in pairs:
        source, target = pair
        try:
            if config.lag_policy == "fixed":
                lags = [config.fixed_p]
            elif config.lag_policy == "information_criterion":
                cols = [n for n in names if n in pair]
                chosen = select_lag(worked.select(cols), p_max, config.criterion)
                lags = [chosen]
            else:
                lags = list(range(1, p_max + 1))
            candidates[pair] = [
                _test_pair(
                    worked, source, target, p, guard, config.alpha, fitted_on,
                    config.denominator_df, config.conditioning,
                )
                for p in lags
            ]
        except KgforgeError as exc:
            attempted = config.fixed_p if config.lag_policy == "fixed" else 1
            failures[pair] = _failed_result(source, target, attempted, fitted_on, guard, str(exc))

    correct = config.multiple_testing == "benjamini_hochberg"
    flat = [r for tests in candidates.values() for r in tests]
    if correct and flat:
        adjusted = benjamini_hochberg([r.p_value for r in flat])
        flat = [
            dataclasses.replace(r, p_adjusted=adj, significant=adj < config.alpha)
            for r, adj in zip(flat, adjusted)
        ]
        rebuilt: dict[tuple[str, str], list[GrangerResult]] = {}
        i = 0
        for pair, tests in candidates.items():
            rebuilt[pair] = flat[i : i + len(tests)]
            i += len(tests)
        candidates = rebuilt

    results: list[GrangerResult] = []
    for pair in pairs:
        if pair in failures:
            results.append(failures[pair])
            continue
        tests = candidates[pair]
        best = min(tests, key=lambda r: (r.p_value, r.p))
        if scan and not correct:
            best = dataclasses.replace(best, selection_biased=True)
        results.append(best)
    return DiscoveryOutcome(results=tuple(results), integration=report, config=config)
