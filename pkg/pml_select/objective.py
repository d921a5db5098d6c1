"""Average discrete reflectivity and the datasets built on it.

The objective is

    avg|R| = (2/pi) * integral_0^{pi/2} |R(theta)| dtheta,

evaluated with a Gauss-Legendre rule whose nodes avoid the grazing
endpoint. All angles of one evaluation are solved as a single batch.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Optional, Sequence

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from pml_select.errors import DomainError, NumericFailure, PmlSelectError
from pml_select.numerics import QuadratureRule, gauss_legendre
from pml_select.optimizer import PENALTY, OptResult, SimplexConfig, nelder_mead
from pml_select.profiles import (
    CoefficientVector,
    Family,
    ProfileClass,
    RationalMinus,
    from_values,
    vector_length,
)
from pml_select.reflectivity import HALF_PI, GridSpec, reflection_coefficients

logger = logging.getLogger(__name__)

DEFAULT_QUAD_NODES = 100
INITIAL_LEAD_COEFFICIENT = 50.0
DEFAULT_SCAN_MARKER = (23.3, 121.3)


# ==================== OBJECTIVE ====================

@dataclass(frozen=True)
class ObjectiveSpec:
    grid: GridSpec
    quad: QuadratureRule
    family: Family = Family.RATIONAL_MINUS
    p: int = 5

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not (self.quad.a >= 0.0 and self.quad.b <= HALF_PI):
            raise DomainError("quadrature must live on a sub-interval of (0, pi/2)")
        if np.any(self.quad.nodes <= 0.0) or np.any(self.quad.nodes >= HALF_PI):
            raise DomainError("quadrature nodes must lie strictly inside (0, pi/2)")

    @classmethod
    def default(
        cls,
        grid: GridSpec,
        family: Family = Family.RATIONAL_MINUS,
        p: int = 5,
        quad_nodes: int = DEFAULT_QUAD_NODES,
    ) -> ObjectiveSpec:
        return cls(grid=grid, quad=gauss_legendre(quad_nodes, 0.0, HALF_PI), family=family, p=p)

    @property
    def dimension(self) -> int:
        return vector_length(self.family, self.p)


def abs_reflectivity(profile: ProfileClass, spec: ObjectiveSpec) -> NDArray[np.float64]:
    """|R| at the quadrature nodes."""
    return np.abs(reflection_coefficients(profile, spec.grid, spec.quad.nodes))


def average_reflectivity(profile: ProfileClass, spec: ObjectiveSpec) -> float:
    values = abs_reflectivity(profile, spec)
    return float((2.0 / math.pi) * np.dot(spec.quad.weights, values))


def make_objective(spec: ObjectiveSpec) -> Callable[[NDArray[np.float64]], float]:
    """Objective over raw coefficient vectors; library failures map to the penalty."""

    def objective(x: NDArray[np.float64]) -> float:
        try:
            profile = from_values(spec.family, spec.p, x)
            return average_reflectivity(profile, spec)
        except PmlSelectError as e:
            logger.debug("Penalizing %s: %s", list(x), e)
            return PENALTY

    return objective


def initial_point(family: Family, p: int) -> tuple[float, ...]:
    """(0, ..., 0, 50) in the family's coefficient layout."""
    n = vector_length(family, p)
    return (0.0,) * (n - 1) + (INITIAL_LEAD_COEFFICIENT,)


@dataclass(frozen=True)
class ProfileOptimum:
    """Outcome of optimizing one family/order, coefficients made non-negative."""

    family: Family
    p: int
    coefficients: CoefficientVector
    result: OptResult

    @property
    def profile(self) -> ProfileClass:
        return from_values(self.family, self.p, self.coefficients.values)

    @property
    def avg_reflectivity(self) -> float:
        return self.result.best_value


def optimize_profile(
    family: Family,
    p: int,
    grid: GridSpec,
    quad: QuadratureRule,
    config: Optional[SimplexConfig] = None,
    callback=None,
) -> ProfileOptimum:
    spec = ObjectiveSpec(grid=grid, quad=quad, family=family, p=p)
    x0 = initial_point(spec.family, p)
    logger.info("Optimizing %s p=%d from %s", spec.family.value, p, list(x0))
    result = nelder_mead(make_objective(spec), x0, config, callback=callback)
    coefficients = CoefficientVector(result.best_point, spec.family, p).absolute()
    return ProfileOptimum(family=spec.family, p=p, coefficients=coefficients, result=result)


def baseline_search(
    grid: GridSpec,
    quad: QuadratureRule,
    orders: Iterable[int] = range(2, 6),
    config: Optional[SimplexConfig] = None,
) -> tuple[ProfileOptimum, list[ProfileOptimum]]:
    """Best S for sigma = S tau^p at each p, and the overall winner."""
    runs = [optimize_profile(Family.POWER, p, grid, quad, config) for p in orders]
    if not runs:
        raise DomainError("baseline search needs at least one order p")
    best = min(runs, key=lambda r: r.avg_reflectivity)
    return best, runs


# ==================== SWEEPS ====================

@dataclass(frozen=True)
class SweepRow:
    theta_frac: float
    abs_R: float


def theta_sweep(
    profile: ProfileClass,
    grid: GridSpec,
    n_points: int,
    theta_min_frac: float,
    theta_max_frac: float,
) -> list[SweepRow]:
    """|R| on a uniform grid in theta/(pi/2), endpoints included."""
    if n_points < 2:
        raise DomainError(f"sweep needs at least 2 points, got {n_points}")
    if not 0.0 < theta_min_frac < theta_max_frac <= 1.0:
        raise DomainError(
            f"sweep range must satisfy 0 < min < max <= 1, got ({theta_min_frac}, {theta_max_frac})"
        )
    fracs = np.linspace(theta_min_frac, theta_max_frac, n_points)
    values = np.abs(reflection_coefficients(profile, grid, fracs * HALF_PI))
    return [SweepRow(float(t), float(v)) for t, v in zip(fracs, values)]


def sweep_table(
    profiles: Sequence[tuple[str, ProfileClass]],
    grid: GridSpec,
    n_points: int,
    theta_min_frac: float,
    theta_max_frac: float,
) -> pd.DataFrame:
    """One ``theta_frac`` column plus one |R| column per named profile."""
    table: dict[str, Any] = {}
    for name, profile in profiles:
        rows = theta_sweep(profile, grid, n_points, theta_min_frac, theta_max_frac)
        table.setdefault("theta_frac", [r.theta_frac for r in rows])
        table[name] = [r.abs_R for r in rows]
    return pd.DataFrame(table)


# ==================== 2-D COEFFICIENT SCAN ====================

@dataclass(frozen=True)
class ScanRange:
    lo: float
    hi: float
    steps: int

    def __post_init__(self):
        if self.steps < 2 or not self.lo < self.hi:
            raise DomainError(f"scan range needs lo < hi and steps >= 2, got {self}")

    def axis(self, marker: Optional[float] = None) -> NDArray[np.float64]:
        """Uniform samples, plus ``marker`` when it falls inside the range."""
        values = np.linspace(self.lo, self.hi, self.steps)
        if marker is not None and self.lo <= marker <= self.hi:
            values = np.union1d(values, [marker])
        return values


def _scan_cell(args) -> float:
    a2, ap, p, spec = args
    try:
        return average_reflectivity(RationalMinus(a2=a2, ap=ap, p=p), spec)
    except PmlSelectError as e:
        logger.warning("⚠️  scan cell (%g, %g) failed: %s", a2, ap, e)
        return float("nan")


def map_ordered(func, items: Sequence, workers: int = 1) -> list:
    """``map`` over a process pool when workers > 1; results stay in input order."""
    if workers <= 1 or len(items) < 2:
        return [func(item) for item in items]
    chunk = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=chunk))


def scan2d(
    p: int,
    a2_range: ScanRange,
    ap_range: ScanRange,
    spec: ObjectiveSpec,
    marker: Optional[tuple[float, float]] = DEFAULT_SCAN_MARKER,
    workers: int = 1,
) -> pd.DataFrame:
    """avg|R| of the rminus family over an (a2, ap) grid, a2-major order."""
    if p < 3:
        raise DomainError("scan2d needs the two-coefficient rminus family (p >= 3)")
    a2_marker, ap_marker = marker if marker is not None else (None, None)
    a2_axis = a2_range.axis(a2_marker)
    ap_axis = ap_range.axis(ap_marker)
    cells = [(float(a2), float(ap), p, spec) for a2 in a2_axis for ap in ap_axis]
    logger.info("Scanning %d x %d grid for rminus p=%d", len(a2_axis), len(ap_axis), p)
    values = map_ordered(_scan_cell, cells, workers)
    return pd.DataFrame({
        "a2": [c[0] for c in cells],
        "ap": [c[1] for c in cells],
        "avg_R": values,
    })


def scan_summary(frame: pd.DataFrame, marker: Optional[tuple[float, float]]) -> dict[str, Any]:
    if not frame["avg_R"].notna().any():
        raise NumericFailure(f"every one of the {len(frame)} scan cells failed")
    best = frame.loc[frame["avg_R"].idxmin()]
    summary: dict[str, Any] = {
        "cells": int(len(frame)),
        "min_a2": float(best["a2"]),
        "min_ap": float(best["ap"]),
        "min_avg_R": float(best["avg_R"]),
    }
    if marker is not None:
        hit = frame[(frame["a2"] == marker[0]) & (frame["ap"] == marker[1])]
        if len(hit):
            value = float(hit["avg_R"].iloc[0])
            summary["marker"] = list(marker)
            summary["marker_avg_R"] = value
            summary["marker_to_min_ratio"] = value / summary["min_avg_R"]
    return summary
