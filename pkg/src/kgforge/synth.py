"""Synthetic processes with planted dependence structure.

Data are simulated from a linear lag-equation system (a VAR in disguise)
plus optional contemporaneous links.  A contemporaneous link mixes one
shared latent white-noise stream into both endpoints at the same time
index, which creates same-tick correlation without introducing any
lagged predictive value in either direction.  Generation is driven by
numpy's default_rng (the versioned PCG64 stream), so a (spec, seed) pair
reproduces byte-identical tables on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SchemaError, UnstableSpecError
from .table import TimeSeriesTable, from_numeric
from .var import companion_matrix

BURN_IN = 500
STABILITY_MARGIN = 1e-8


@dataclass(frozen=True)
class Term:
    source: str
    lag: int
    coefficient: float

    def __post_init__(self):
        if self.lag < 1:
            raise SchemaError("equation lags must be >= 1")


@dataclass(frozen=True)
class Equation:
    intercept: float = 0.0
    terms: tuple[Term, ...] = ()
    noise_std: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.noise_std < 0.0:
            raise SchemaError("noise_std must be non-negative")


@dataclass(frozen=True)
class ContemporaneousLink:
    a: str
    b: str
    coefficient: float


@dataclass(frozen=True, eq=False)
class ProcessSpec:
    variables: tuple[str, ...]
    equations: dict[str, Equation]
    contemporaneous_links: tuple[ContemporaneousLink, ...] = ()
    t: int = 1000
    seed: int = 0
    name: str = "synthetic"

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "contemporaneous_links", tuple(self.contemporaneous_links))
        if not self.variables:
            raise SchemaError("spec needs at least one variable")
        if len(set(self.variables)) != len(self.variables):
            raise SchemaError("duplicate variable names")
        if self.t < 1:
            raise SchemaError("t must be >= 1")
        missing = [v for v in self.variables if v not in self.equations]
        if missing:
            raise SchemaError("no equation for: " + ", ".join(missing))
        unknown = [k for k in self.equations if k not in self.variables]
        if unknown:
            raise SchemaError("equation for unknown variable: " + ", ".join(unknown))
        for v in self.variables:
            for term in self.equations[v].terms:
                if term.source not in self.variables:
                    raise SchemaError(f"equation of {v!r} references unknown {term.source!r}")
        for link in self.contemporaneous_links:
            if link.a not in self.variables or link.b not in self.variables:
                raise SchemaError("contemporaneous link references unknown variable")
            if link.a == link.b:
                raise SchemaError("contemporaneous link endpoints must differ")
        radius = self.spectral_radius()
        if radius >= 1.0 - STABILITY_MARGIN:
            raise UnstableSpecError(f"implied VAR is unstable (spectral radius {radius:.6f})")

    @property
    def max_lag(self) -> int:
        return max((t.lag for v in self.variables for t in self.equations[v].terms), default=0)

    def coefficient_tensor(self) -> np.ndarray:
        """(max_lag, K, K) array; entry [l-1, i, j] is source j -> target i at lag l."""
        k = len(self.variables)
        p = self.max_lag
        a = np.zeros((max(p, 1), k, k))
        idx = {v: i for i, v in enumerate(self.variables)}
        for v in self.variables:
            for term in self.equations[v].terms:
                a[term.lag - 1, idx[v], idx[term.source]] += term.coefficient
        return a

    def spectral_radius(self) -> float:
        if self.max_lag == 0:
            return 0.0
        comp = companion_matrix(self.coefficient_tensor())
        return float(np.max(np.abs(np.linalg.eigvals(comp))))

    def ground_truth(self) -> dict:
        """Planted edges for harness comparison, in spec order."""
        causal = [
            {"source": t.source, "target": v, "lag": t.lag, "coefficient": t.coefficient}
            for v in self.variables
            for t in self.equations[v].terms
            if t.coefficient != 0.0
        ]
        correlation = [
            {"a": l.a, "b": l.b, "coefficient": l.coefficient}
            for l in self.contemporaneous_links
            if l.coefficient != 0.0
        ]
        return {"name": self.name, "causal": causal, "correlation": correlation}


def generate(spec: ProcessSpec, initial: dict[str, float] | None = None) -> TimeSeriesTable:
    """Simulate a process description; deterministic for a fixed (spec, seed).

    A 500-step burn-in from zero initial conditions is discarded so the
    emitted sample starts near the stationary distribution.  ``initial``
    optionally pins chosen variables' values on the first emitted row
    (useful for noise-free closed-form checks).
    """
    variables = spec.variables
    k = len(variables)
    idx = {v: i for i, v in enumerate(variables)}
    if initial:
        for name in initial:
            if name not in idx:
                raise SchemaError(f"initial override for unknown variable {name!r}")

    total = BURN_IN + spec.t
    rng = np.random.default_rng(spec.seed)
    noise = rng.standard_normal((total, k))
    noise *= np.array([spec.equations[v].noise_std for v in variables])
    for link in spec.contemporaneous_links:
        latent = rng.standard_normal(total)
        noise[:, idx[link.a]] += link.coefficient * latent
        noise[:, idx[link.b]] += link.coefficient * latent

    intercepts = np.array([spec.equations[v].intercept for v in variables])
    p = spec.max_lag
    a = spec.coefficient_tensor() if p else None

    vals = np.zeros((total, k))
    for t in range(total):
        row = intercepts + noise[t]
        if a is not None:
            for lag in range(1, min(p, t) + 1):
                row = row + a[lag - 1] @ vals[t - lag]
        vals[t] = row
        if t == BURN_IN and initial:
            for name, value in initial.items():
                vals[t, idx[name]] = float(value)

    return from_numeric(
        index=tuple(range(spec.t)),
        names=variables,
        matrix=vals[BURN_IN:],
        index_kind="tick",
        source=f"{spec.name}:seed={spec.seed}",
    )


def electrostatic_spec(seed: int = 0, t: int = 2000) -> ProcessSpec:
    """Fixed analog of an electrostatic particle-transfer line.

    Planted structure: plate_distance (lag 2), field_strength (lag 1),
    field_frequency (lag 1) and the line's own previous quality (lag 1)
    drive upcoming quality; funnel_width is contemporaneously correlated
    with quality through a shared latent stream; belt_speed is pure noise
    and serves as the true negative.

    The setpoint variables jitter as independent white noise.  That keeps
    every bivariate (driver, quality) subsystem an exact finite-order VAR,
    so the planted lags are identifiable rather than smeared across
    neighboring orders by autocorrelated leftovers.
    """
    white = Equation(terms=(), noise_std=1.0)
    equations = {
        "plate_distance": white,
        "field_strength": white,
        "field_frequency": white,
        "funnel_width": white,
        "belt_speed": white,
        "quality": Equation(
            terms=(
                Term("quality", 1, 0.5),
                Term("plate_distance", 2, 0.45),
                Term("field_strength", 1, 0.4),
                Term("field_frequency", 1, 0.35),
            ),
            noise_std=1.0,
        ),
    }
    return ProcessSpec(
        variables=(
            "plate_distance",
            "field_strength",
            "field_frequency",
            "funnel_width",
            "belt_speed",
            "quality",
        ),
        equations=equations,
        contemporaneous_links=(ContemporaneousLink("funnel_width", "quality", 0.9),),
        t=t,
        seed=seed,
        name="electrostatic",
    )


BUILTIN_SPECS = {"electrostatic": electrostatic_spec}
