"""Exact discrete reflection coefficient of a finite, discretized PML.

The 1-D transverse equation

    (1/s) d/dx ( (1/s) du/dx ) + alpha^2 u = 0,   s = 1 + i sigma,

is discretized with the three-point stencil on nodes x_j = D + j h,
j = 0..m, with u_0 = 0 at the wall D and x_m = H at the interface. For
j >= m the medium is uniform and the solution is the discrete plane-wave
pair

    u_j = exp(-i ah (x_j - H)) + R exp(+i ah (x_j - H)),

where ah is the discrete wavenumber, so the pair solves the uniform
difference equation exactly and R carries only the layer's reflection.
Eliminating the ghost value u_{m+1} with this ansatz and adding the
matching row u_m = 1 + R gives an (m+1) x (m+1) bordered system in
(u_1, ..., u_m, R).

Angles are measured from the interface plane: alpha = k0 n0 sin(theta),
beta = k0 n0 cos(theta), so theta -> 0 is grazing incidence.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray

from pml_select.errors import (
    DegenerateBasis,
    DomainError,
    NumericFailure,
    UnresolvableWave,
)
from pml_select.numerics import DenseComplexSystem, solve_dense_batch
from pml_select.profiles import ProfileClass, sigma

logger = logging.getLogger(__name__)

HALF_PI = 0.5 * math.pi
BASIS_TOLERANCE = 1e-14
_GAUSS_OFFSET = 0.5 / math.sqrt(3.0)


class Sampling(str, Enum):
    """How s is sampled between nodes."""

    MIDPOINT = "midpoint"
    CELL_AVERAGE = "cell-average"


# ==================== DOMAIN TYPES ====================

@dataclass(frozen=True)
class GridSpec:
    lambda0: float = 1.0
    n0: float = 1.0
    h: float = 0.05
    m: int = 5
    sampling: Sampling = Sampling.MIDPOINT

    def __post_init__(self):
        object.__setattr__(self, "sampling", Sampling(self.sampling))
        if not (self.lambda0 > 0 and self.n0 > 0 and self.h > 0):
            raise DomainError(
                f"lambda0, n0 and h must be positive: {self.lambda0}, {self.n0}, {self.h}"
            )
        if isinstance(self.m, bool) or int(self.m) != self.m or self.m < 1:
            raise DomainError(f"PML thickness m must be a positive integer, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))

    @property
    def k0(self) -> float:
        return 2.0 * math.pi / self.lambda0

    @property
    def wavenumber(self) -> float:
        """k0 * n0."""
        return self.k0 * self.n0

    @property
    def thickness(self) -> float:
        return self.m * self.h


@dataclass(frozen=True)
class Incidence:
    theta: float
    alpha: float
    beta: float
    alpha_hat: float

    @classmethod
    def from_angle(cls, theta: float, grid: GridSpec) -> Incidence:
        _check_angles(theta)
        k = grid.wavenumber
        alpha = k * math.sin(theta)
        return cls(
            theta=float(theta),
            alpha=alpha,
            beta=k * math.cos(theta),
            alpha_hat=float(discrete_wavenumber(alpha, grid.h)),
        )


@dataclass(frozen=True)
class ReflectionResult:
    R: complex
    abs_R: float
    theta: float

    @classmethod
    def from_value(cls, R: complex, theta: float) -> ReflectionResult:
        R = complex(R)
        return cls(R=R, abs_R=abs(R), theta=float(theta))


# ==================== DISCRETE DISPERSION ====================

def discrete_wavenumber(alpha: ArrayLike, h: float):
    """Wavenumber ah with (2 - 2 cos(ah h)) / h^2 = alpha^2.

    Raises:
        UnresolvableWave: if alpha h / 2 > 1.
    """
    a = np.asarray(alpha, dtype=np.float64)
    ratio = a * h / 2.0
    if np.any(np.abs(ratio) > 1.0):
        raise UnresolvableWave(
            f"alpha*h/2 = {np.max(np.abs(ratio)):.6g} exceeds 1; refine the grid"
        )
    result = (2.0 / h) * np.arcsin(ratio)
    if result.ndim == 0:
        return float(result)
    return result


def _check_angles(theta: ArrayLike) -> NDArray[np.float64]:
    t = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    if np.any(~np.isfinite(t)) or np.any(t <= 0.0) or np.any(t > HALF_PI):
        raise DomainError(f"incidence angle must lie in (0, pi/2]: {theta!r}")
    return t


# ==================== ASSEMBLY ====================

def _half_cell_sigma(profile: ProfileClass, grid: GridSpec) -> NDArray[np.float64]:
    """sigma on the m cells between nodes 0..m, wall side first."""
    m = grid.m
    centers = (m - np.arange(m) - 0.5) / m
    if grid.sampling is Sampling.MIDPOINT:
        return sigma(profile, centers)
    offset = _GAUSS_OFFSET / m
    return 0.5 * (sigma(profile, centers + offset) + sigma(profile, centers - offset))


def stencil(profile: ProfileClass, grid: GridSpec):
    """Stencil weights of rows j = 1..m, already multiplied by h^2.

    Returns (lower, upper): row j reads
    lower_j u_{j-1} - (lower_j + upper_j) u_j + upper_j u_{j+1} + (alpha h)^2 u_j.
    """
    m = grid.m
    s_half = np.ones(m + 1, dtype=np.complex128)
    s_half[:m] = 1.0 + 1j * _half_cell_sigma(profile, grid)
    node_tau = (m - np.arange(1, m + 1)) / m
    s_node = 1.0 + 1j * sigma(profile, node_tau)
    lower = 1.0 / (s_node * s_half[:m])
    upper = 1.0 / (s_node * s_half[1:])
    return lower, upper


def _assemble_batch(
    profile: ProfileClass,
    grid: GridSpec,
    alpha: NDArray[np.float64],
    alpha_hat: NDArray[np.float64],
    reference_shift: float = 0.0,
):
    m = grid.m
    n = m + 1
    lower, upper = stencil(profile, grid)

    base = np.zeros((n, n), dtype=np.complex128)
    rows = np.arange(m)
    base[rows, rows] = -(lower + upper)
    base[rows[1:], rows[1:] - 1] = lower[1:]
    base[rows[:-1], rows[:-1] + 1] = upper[:-1]
    base[m, m - 1] = 1.0

    batch = alpha.shape[0]
    matrices = np.broadcast_to(base, (batch, n, n)).copy()
    rhs = np.zeros((batch, n), dtype=np.complex128)
    matrices[:, rows, rows] += ((alpha * grid.h) ** 2)[:, None]

    # ghost node m+1 sits (1 - c) h past the reference point H + c h
    ghost = alpha_hat * grid.h * (1.0 - reference_shift)
    matrices[:, m - 1, m] = upper[m - 1] * np.exp(1j * ghost)
    rhs[:, m - 1] = -upper[m - 1] * np.exp(-1j * ghost)

    at_interface = alpha_hat * grid.h * reference_shift
    matrices[:, m, m] = -np.exp(-1j * at_interface)
    rhs[:, m] = np.exp(1j * at_interface)
    return matrices, rhs


def assemble_system(
    profile: ProfileClass,
    grid: GridSpec,
    inc: Incidence,
    reference_shift: float = 0.0,
) -> DenseComplexSystem:
    """Bordered system for unknowns (u_1, ..., u_m, R).

    ``reference_shift`` moves the phase reference of the ansatz from H to
    H + c h; it changes arg(R) but not |R|.
    """
    matrices, rhs = _assemble_batch(
        profile,
        grid,
        np.array([inc.alpha]),
        np.array([inc.alpha_hat]),
        reference_shift,
    )
    return DenseComplexSystem(matrix=matrices[0], rhs=rhs[0])


# ==================== REFLECTION ====================

def reflection_coefficients(
    profile: ProfileClass,
    grid: GridSpec,
    thetas: ArrayLike,
    reference_shift: float = 0.0,
) -> NDArray[np.complex128]:
    """Complex R at every angle of ``thetas``, solved as one batch."""
    t = _check_angles(thetas)
    alpha = grid.wavenumber * np.sin(t)
    alpha_hat = np.atleast_1d(discrete_wavenumber(alpha, grid.h))
    matrices, rhs = _assemble_batch(profile, grid, alpha, alpha_hat, reference_shift)
    if not (np.all(np.isfinite(matrices)) and np.all(np.isfinite(rhs))):
        raise NumericFailure("non-finite entry while assembling the PML system")
    R = solve_dense_batch(matrices, rhs)[:, grid.m]
    if not np.all(np.isfinite(R)):
        raise NumericFailure("reflection coefficient is not finite")
    return R


def reflection(
    profile: ProfileClass,
    grid: GridSpec,
    theta: float,
    reference_shift: float = 0.0,
) -> ReflectionResult:
    R = reflection_coefficients(profile, grid, [theta], reference_shift)[0]
    return ReflectionResult.from_value(R, theta)


def reflection_oracle(
    profile: ProfileClass, grid: GridSpec, theta: float
) -> ReflectionResult:
    """R by shooting from the wall instead of solving the bordered system.

    Start from u_0 = 0, u_1 = 1, march the row recurrence up to u_{m+1},
    then split (u_m, u_{m+1}) into the incident/reflected plane waves.
    """
    inc = Incidence.from_angle(theta, grid)
    lower, upper = stencil(profile, grid)
    diag = -(lower + upper) + (inc.alpha * grid.h) ** 2

    u_prev, u_curr = 0.0 + 0.0j, 1.0 + 0.0j
    for j in range(grid.m):
        u_next = -(lower[j] * u_prev + diag[j] * u_curr) / upper[j]
        u_prev, u_curr = u_curr, u_next
    u_m, u_ghost = u_prev, u_curr

    phase = inc.alpha_hat * grid.h
    det = 2j * math.sin(phase)
    if abs(det) <= BASIS_TOLERANCE:
        raise DegenerateBasis(
            f"plane-wave basis is singular at theta={theta} (alpha_hat*h={phase:.3e})"
        )
    reflected = (u_ghost - u_m * np.exp(-1j * phase)) / det
    incident = u_m - reflected
    if incident == 0 or not np.isfinite(incident) or not np.isfinite(reflected):
        raise NumericFailure(f"shooting produced no incident wave at theta={theta}")
    return ReflectionResult.from_value(reflected / incident, theta)
