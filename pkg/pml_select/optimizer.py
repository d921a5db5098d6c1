"""Nelder-Mead simplex direct search.

Plain textbook variant: reflection, expansion, outside and inside
contraction, shrink toward the best vertex. No restarts, no adaptive
coefficients, no randomness; identical inputs give identical results.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

logger = logging.getLogger(__name__)

PENALTY = 1e6
NONZERO_DELTA = 0.05
ZERO_DELTA = 0.00025

Objective = Callable[[NDArray[np.float64]], float]
IterationCallback = Callable[["IterationRecord"], None]


class Termination(str, Enum):
    CONVERGED = "Converged"
    MAX_EVALS = "MaxEvals"


@dataclass(frozen=True)
class SimplexConfig:
    reflection_coeff: float = 1.0
    expansion_coeff: float = 2.0
    contraction_coeff: float = 0.5
    shrink_coeff: float = 0.5
    max_evals: int = 2000
    tol_x: float = 1e-4
    tol_f: float = 1e-4

    def __post_init__(self):
        if not self.reflection_coeff > 0:
            raise ValueError("reflection coefficient must be positive")
        if not self.expansion_coeff > max(1.0, self.reflection_coeff):
            raise ValueError("expansion coefficient must exceed max(1, reflection)")
        if not 0 < self.contraction_coeff < 1:
            raise ValueError("contraction coefficient must lie in (0, 1)")
        if not 0 < self.shrink_coeff < 1:
            raise ValueError("shrink coefficient must lie in (0, 1)")
        if self.max_evals < 1 or self.tol_x < 0 or self.tol_f < 0:
            raise ValueError("max_evals must be >= 1 and tolerances non-negative")


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    evals: int
    step: str
    best_point: tuple[float, ...]
    best_value: float


@dataclass(frozen=True)
class OptResult:
    """Outcome of one search.

    ``best_point`` is the raw, signed vertex the search ended on; the
    optimizer knows nothing about profiles. Absolute values are applied when
    the point becomes a profile, see ``ProfileOptimum.coefficients``.
    """

    best_point: tuple[float, ...]
    best_value: float
    iterations: int
    evals: int
    termination: Termination
    history: tuple[float, ...] = field(default=(), repr=False)


def initial_simplex(x0: ArrayLike) -> NDArray[np.float64]:
    """Vertex 0 is x0; vertex k+1 moves coordinate k by +5%, or to 0.00025 if zero."""
    x0 = np.asarray(x0, dtype=np.float64).reshape(-1)
    n = x0.shape[0]
    simplex = np.tile(x0, (n + 1, 1))
    for k in range(n):
        if x0[k] != 0.0:
            simplex[k + 1, k] = (1.0 + NONZERO_DELTA) * x0[k]
        else:
            simplex[k + 1, k] = ZERO_DELTA
    return simplex


class _CountingObjective:
    def __init__(self, f: Objective):
        self._f = f
        self.calls = 0

    def __call__(self, x: NDArray[np.float64]) -> float:
        self.calls += 1
        value = float(self._f(np.array(x, dtype=np.float64)))
        if not np.isfinite(value):
            return PENALTY
        return value


def _order(simplex: NDArray, values: NDArray):
    idx = np.argsort(values, kind="stable")
    return simplex[idx], values[idx]


def _converged(simplex: NDArray, values: NDArray, config: SimplexConfig) -> bool:
    f_best = values[0]
    x_best = simplex[0]
    f_spread = np.max(np.abs(values[1:] - f_best))
    x_spread = np.max(np.abs(simplex[1:] - x_best))
    return bool(
        f_spread < config.tol_f * (1.0 + abs(f_best))
        and x_spread < config.tol_x
    )


def nelder_mead(
    f: Objective,
    x0: Sequence[float],
    config: Optional[SimplexConfig] = None,
    callback: Optional[IterationCallback] = None,
) -> OptResult:
    """Minimize ``f`` from ``x0``.

    ``f`` should be total over real vectors; callers map their own failures
    to :data:`PENALTY`. Non-finite returns are mapped to the penalty here.
    Stops with ``Converged`` once the value spread falls under
    ``tol_f * (1 + |f_best|)`` and every vertex coordinate lies within
    ``tol_x`` of the best vertex, otherwise with ``MaxEvals`` when the
    evaluation budget is spent.
    """
    config = config or SimplexConfig()
    func = _CountingObjective(f)
    rho = config.reflection_coeff
    chi = config.expansion_coeff
    psi = config.contraction_coeff
    shrink = config.shrink_coeff

    simplex = initial_simplex(x0)
    n = simplex.shape[1]
    values = np.array([func(v) for v in simplex])
    simplex, values = _order(simplex, values)

    history = [float(values[0])]
    iterations = 0
    termination = Termination.MAX_EVALS

    while True:
        # an all-penalty simplex is never reported as converged
        if values[0] < PENALTY and _converged(simplex, values, config):
            termination = Termination.CONVERGED
            break
        if func.calls >= config.max_evals:
            break

        iterations += 1
        centroid = simplex[:-1].sum(axis=0) / n
        worst = simplex[-1]

        xr = (1.0 + rho) * centroid - rho * worst
        fr = func(xr)
        step = "reflect"
        do_shrink = False

        if fr < values[0]:
            xe = (1.0 + rho * chi) * centroid - rho * chi * worst
            fe = func(xe)
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
                step = "expand"
            else:
                simplex[-1], values[-1] = xr, fr
        elif fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
        elif fr < values[-1]:
            xc = (1.0 + psi * rho) * centroid - psi * rho * worst
            fc = func(xc)
            if fc <= fr:
                simplex[-1], values[-1] = xc, fc
                step = "contract-outside"
            else:
                do_shrink = True
        else:
            xcc = (1.0 - psi) * centroid + psi * worst
            fcc = func(xcc)
            if fcc < values[-1]:
                simplex[-1], values[-1] = xcc, fcc
                step = "contract-inside"
            else:
                do_shrink = True

        if do_shrink:
            step = "shrink"
            for j in range(1, n + 1):
                simplex[j] = simplex[0] + shrink * (simplex[j] - simplex[0])
                values[j] = func(simplex[j])

        simplex, values = _order(simplex, values)
        history.append(float(values[0]))
        logger.debug(
            "iteration %d: %s, evals=%d, best=%.6g",
            iterations, step, func.calls, values[0],
        )
        if callback is not None:
            callback(IterationRecord(
                iteration=iterations,
                evals=func.calls,
                step=step,
                best_point=tuple(float(v) for v in simplex[0]),
                best_value=float(values[0]),
            ))

    result = OptResult(
        best_point=tuple(float(v) for v in simplex[0]),
        best_value=float(values[0]),
        iterations=iterations,
        evals=func.calls,
        termination=termination,
        history=tuple(history),
    )
    logger.info(
        "Nelder-Mead finished: %s after %d iterations / %d evaluations, best=%.6g",
        result.termination.value, result.iterations, result.evals, result.best_value,
    )
    return result
