"""Numerical kernels: small dense complex solves and Gauss-Legendre rules.

The bordered reflection systems are tiny ((m+1) x (m+1) with m of a few
tens at most), so a direct elimination with partial pivoting is all that
is needed. ``solve_dense_batch`` runs the same elimination over a stack
of systems at once, which is how the objective evaluates all quadrature
angles in one pass.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from pml_select.errors import InvalidInterval, NumericFailure, SingularMatrix

logger = logging.getLogger(__name__)

ComplexScalar = complex

PIVOT_RELATIVE_TOLERANCE = 1e-14
NEWTON_TOLERANCE = 1e-15
NEWTON_MAX_ITERATIONS = 100

__all__ = [
    "ComplexScalar",
    "DenseComplexSystem",
    "QuadratureRule",
    "gauss_legendre",
    "solve_dense",
    "solve_dense_batch",
]


# ==================== DENSE COMPLEX SYSTEMS ====================

@dataclass(frozen=True)
class DenseComplexSystem:
    """A x = b with A an n x n complex matrix."""

    matrix: NDArray[np.complex128]
    rhs: NDArray[np.complex128]

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.complex128)
        rhs = np.array(self.rhs, dtype=np.complex128).reshape(-1)
        n = rhs.shape[0]
        if n < 1 or matrix.shape != (n, n):
            raise ValueError(
                f"matrix shape {matrix.shape} does not match rhs length {n}"
            )
        if not (np.all(np.isfinite(matrix)) and np.all(np.isfinite(rhs))):
            raise NumericFailure("non-finite entry in linear system")
        matrix.setflags(write=False)
        rhs.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "rhs", rhs)

    @property
    def dimension(self) -> int:
        return self.rhs.shape[0]

    def residual(self, x: NDArray[np.complex128]) -> float:
        """Max-norm of A x - b."""
        return float(np.max(np.abs(self.matrix @ x - self.rhs)))


def solve_dense_batch(
    matrices: NDArray[np.complex128], rhs: NDArray[np.complex128]
) -> NDArray[np.complex128]:
    """Solve a stack of systems ``matrices[k] @ x[k] = rhs[k]``.

    Gaussian elimination with partial pivoting, vectorized over the leading
    axis. Inputs are copied, never modified.

    Raises:
        SingularMatrix: if any pivot magnitude falls to or below
            ``1e-14`` times the largest initial entry of its system.
    """
    a = np.array(matrices, dtype=np.complex128, copy=True)
    b = np.array(rhs, dtype=np.complex128, copy=True)
    if a.ndim != 3 or a.shape[1] != a.shape[2] or b.shape != a.shape[:2]:
        raise ValueError(
            f"expected (B, n, n) matrices and (B, n) rhs, got {a.shape} and {b.shape}"
        )
    batch, n, _ = a.shape
    rows = np.arange(batch)
    threshold = PIVOT_RELATIVE_TOLERANCE * np.max(np.abs(a), axis=(1, 2))

    for k in range(n):
        p = k + np.argmax(np.abs(a[:, k:, k]), axis=1)
        pivot = np.abs(a[rows, p, k])
        bad = pivot <= threshold
        if np.any(bad):
            first = int(np.flatnonzero(bad)[0])
            raise SingularMatrix(
                f"pivot {pivot[first]:.3e} at column {k} of system {first} "
                f"is below {threshold[first]:.3e}"
            )
        swap = p != k
        if np.any(swap):
            idx = rows[swap]
            a_k = a[idx, k].copy()
            a[idx, k] = a[idx, p[swap]]
            a[idx, p[swap]] = a_k
            b_k = b[idx, k].copy()
            b[idx, k] = b[idx, p[swap]]
            b[idx, p[swap]] = b_k
        if k + 1 < n:
            factors = a[:, k + 1:, k] / a[:, k, k][:, None]
            a[:, k + 1:, k:] -= factors[:, :, None] * a[:, None, k, k:]
            b[:, k + 1:] -= factors * b[:, k][:, None]

    x = np.zeros_like(b)
    for k in range(n - 1, -1, -1):
        tail = np.einsum("ij,ij->i", a[:, k, k + 1:], x[:, k + 1:])
        x[:, k] = (b[:, k] - tail) / a[:, k, k]
    return x


def solve_dense(system: DenseComplexSystem) -> NDArray[np.complex128]:
    """Solve a single dense complex system by partial-pivoting elimination."""
    x = solve_dense_batch(system.matrix[None, :, :], system.rhs[None, :])
    return x[0]


# ==================== GAUSS-LEGENDRE QUADRATURE ====================

@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights of an n-point rule on (a, b)."""

    nodes: NDArray[np.float64]
    weights: NDArray[np.float64]
    a: float
    b: float
    label: str = field(default="gauss-legendre")

    def __post_init__(self):
        for name in ("nodes", "weights"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    def integrate(self, f: Callable[[NDArray[np.float64]], NDArray]) -> float:
        """Apply the rule to a vectorized integrand."""
        return float(np.dot(self.weights, f(self.nodes)))


def _legendre_with_derivative(n: int, z: NDArray[np.float64]):
    p1 = np.ones_like(z)
    p2 = np.zeros_like(z)
    for j in range(1, n + 1):
        p3 = p2
        p2 = p1
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j
    dp = n * (z * p1 - p2) / (z * z - 1.0)
    return p1, dp


def gauss_legendre(n: int, a: float, b: float) -> QuadratureRule:
    """n-point Gauss-Legendre rule on (a, b).

    Roots of P_n come from Newton iteration started at the Chebyshev-like
    guesses cos(pi (i + 3/4) / (n + 1/2)); only the positive half is
    iterated and mirrored, so the rule is exactly symmetric.
    """
    if n < 1:
        raise ValueError(f"gauss_legendre needs n >= 1, got {n}")
    if not a < b:
        raise InvalidInterval(f"interval ({a}, {b}) is empty or reversed")

    half = (n + 1) // 2
    z = np.cos(math.pi * (np.arange(half) + 0.75) / (n + 0.5))
    if n % 2 == 1:
        z[-1] = 0.0
    for _ in range(NEWTON_MAX_ITERATIONS):
        p, dp = _legendre_with_derivative(n, z)
        step = p / dp
        z = z - step
        if np.max(np.abs(step)) <= NEWTON_TOLERANCE:
            break
    else:
        logger.debug("Legendre Newton iteration hit the cap for n=%d", n)
    if n % 2 == 1:
        z[-1] = 0.0
    _, dp = _legendre_with_derivative(n, z)

    center = 0.5 * (a + b)
    half_width = 0.5 * (b - a)
    w = 2.0 * half_width / ((1.0 - z * z) * dp * dp)

    nodes = np.empty(n)
    weights = np.empty(n)
    nodes[:half] = center - half_width * z
    nodes[n - half:] = (center + half_width * z)[::-1]
    weights[:half] = w
    weights[n - half:] = w[::-1]
    return QuadratureRule(nodes=nodes, weights=weights, a=float(a), b=float(b))
