"""Position-space realization of the deformed momentum at ``beta = 0``.

There ``theta = 1 + alpha x^2`` is an ordinary function and the momentum is
``p = -i theta(x) d/dx``, symmetric under the inner product with measure
``dx / theta(x)`` for functions vanishing at infinity.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "Grid1D",
    "WeightedOperator",
    "HermiticityCheck",
    "derivative_matrix",
    "build_momentum_xrep",
    "weighted_inner",
    "weighted_hermiticity_residual",
    "kernel_phase",
    "kernel_transform",
    "fourier_transform",
    "refinement_study",
    "fourier_limit_errors",
]


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 8:
            raise DomainError("grid needs at least 8 points")
        if not self.x_max > self.x_min:
            raise DomainError("x_max must exceed x_min")

    @classmethod
    def symmetric(cls, extent: float, n_points: int) -> "Grid1D":
        return cls(-extent, extent, n_points)

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    def refined(self) -> "Grid1D":
        """Same interval with the spacing halved."""
        return Grid1D(self.x_min, self.x_max, 2 * self.n_points - 1)


@dataclass(frozen=True)
class WeightedOperator:
    grid: Grid1D
    op_matrix: np.ndarray
    weight: np.ndarray


@dataclass(frozen=True)
class HermiticityCheck:
    residual: float
    boundary_ok: bool


def derivative_matrix(grid: Grid1D) -> np.ndarray:
    """Second-order first derivative: central inside, one-sided at the ends."""
    n, h = grid.n_points, grid.h
    d = np.zeros((n, n))
    i = np.arange(1, n - 1)
    d[i, i + 1] = 0.5 / h
    d[i, i - 1] = -0.5 / h
    d[0, :3] = np.array([-3.0, 4.0, -1.0]) / (2 * h)
    d[-1, -3:] = np.array([1.0, -4.0, 3.0]) / (2 * h)
    return d


def build_momentum_xrep(grid: Grid1D, alpha: float) -> WeightedOperator:
    if alpha < 0:
        raise DomainError("alpha must be >= 0")
    theta = 1.0 + alpha * grid.x**2
    op = -1j * theta[:, None] * derivative_matrix(grid)
    return WeightedOperator(grid, op, 1.0 / theta)


def weighted_inner(op: WeightedOperator, f: np.ndarray, g: np.ndarray) -> complex:
    """Trapezoid rule for the integral of ``conj(f) g / theta``."""
    tw = np.full(op.grid.n_points, op.grid.h)
    tw[[0, -1]] *= 0.5
    return complex(np.sum(tw * op.weight * np.conj(f) * g))


def weighted_hermiticity_residual(op: WeightedOperator, f, g, decay_tol: float = 1e-12) -> HermiticityCheck:
    """``|<f, p g>_w - <p f, g>_w|``; ``boundary_ok`` is False when the samples
    do not decay below ``decay_tol`` at both ends."""
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    ends = np.abs(np.concatenate([f[[0, -1]], g[[0, -1]]]))
    residual = abs(weighted_inner(op, f, op.op_matrix @ g)
                   - weighted_inner(op, op.op_matrix @ f, g))
    return HermiticityCheck(residual, bool(np.all(ends < decay_tol)))


def kernel_phase(x: float, p: float, alpha: float) -> float:
    """Phase ``p/(alpha sigma) * arctan(x/sigma)`` with ``sigma = sqrt(p^2 + 1/alpha)``."""
    if alpha <= 0:
        raise DomainError("kernel phase needs alpha > 0")
    sigma = np.sqrt(np.square(p) + 1.0 / alpha)
    return p / (alpha * sigma) * np.arctan(x / sigma)


def _trapezoid_weights(p: np.ndarray) -> np.ndarray:
    dp = np.diff(p)
    w = np.zeros_like(p, dtype=float)
    w[:-1] += 0.5 * dp
    w[1:] += 0.5 * dp
    return w


def kernel_transform(p_grid, psi_p, alpha: float, x_targets) -> np.ndarray:
    """Trapezoid quadrature of ``int dp exp(i phase(x, p)) psi(p)`` at each target."""
    p = np.asarray(p_grid, dtype=float)
    psi = np.asarray(psi_p, dtype=complex)
    x = np.atleast_1d(np.asarray(x_targets, dtype=float))
    phase = kernel_phase(x[:, None], p[None, :], alpha)
    return np.exp(1j * phase) @ (_trapezoid_weights(p) * psi)


def fourier_transform(p_grid, psi_p, x_targets) -> np.ndarray:
    """Same quadrature with the plain kernel ``exp(i p x)``."""
    p = np.asarray(p_grid, dtype=float)
    psi = np.asarray(psi_p, dtype=complex)
    x = np.atleast_1d(np.asarray(x_targets, dtype=float))
    return np.exp(1j * x[:, None] * p[None, :]) @ (_trapezoid_weights(p) * psi)


def refinement_study(alpha: float, extent: float = 10.0, n_points: int = 401,
                     refinements: int = 3, width: float = 1.0) -> list[tuple[int, float]]:
    """Gaussian-pair Hermiticity residual on successively halved grids."""
    grid = Grid1D.symmetric(extent, n_points)
    rows = []
    for _ in range(refinements + 1):
        op = build_momentum_xrep(grid, alpha)
        f = np.exp(-(grid.x / width) ** 2)
        rows.append((grid.n_points, weighted_hermiticity_residual(op, f, f).residual))
        grid = grid.refined()
    return rows


def fourier_limit_errors(alphas, points) -> list[tuple[float, float]]:
    """``max |phase(x,p,alpha) - p x|`` over ``points`` for each ``alpha``."""
    out = []
    for a in alphas:
        err = max(abs(kernel_phase(x, p, a) - p * x) for x, p in points)
        out.append((a, float(err)))
    return out

