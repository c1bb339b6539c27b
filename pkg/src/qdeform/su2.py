"""su(2)-type ladder representation on an m-grid, and the quadratic Hamiltonian.

Theta acts diagonally with eigenvalue ``m``; ``J+`` and ``J-`` move along the
grid ``m = -j, -j + alpha, ..., j`` with coefficients

    C+(m) = sqrt((j - m)(j + m + alpha)),   C-(m) = sqrt((j + m)(j - m + alpha)).

With these coefficients ``[J+, J-]`` is diagonal with entries ``2 alpha m``.
The relation ``[J+, J-] = 2 alpha^-2 Theta`` is therefore reported as a residual
rather than assumed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import DeformedFrame
from .errors import DomainError
from .fock import TruncatedOperator, build_momentum, build_position

__all__ = [
    "Su2Representation",
    "ladder_coefficients",
    "build_representation",
    "quadratic_form",
    "quadratic_hamiltonian",
    "mode_operator",
    "hamiltonian_eigenvalue_formula",
    "j2_eigenvalue_formula",
]


def _sqrt_nonneg(value: float, what: str) -> float:
    # tolerate rounding just below zero at the grid ends
    if value < 0.0:
        if value > -1e-12:
            return 0.0
        raise DomainError(f"{what} radicand is negative ({value!r})")
    return math.sqrt(value)


def ladder_coefficients(j: float, m: float, alpha: float) -> tuple[float, float]:
    """Return ``(C+, C-)`` at weight ``m``."""
    c_plus = _sqrt_nonneg((j - m) * (j + m + alpha), "C+")
    c_minus = _sqrt_nonneg((j + m) * (j - m + alpha), "C-")
    return c_plus, c_minus


@dataclass(frozen=True)
class Su2Representation:
    j: float
    alpha: float
    m_values: np.ndarray
    J_plus: np.ndarray
    J_minus: np.ndarray
    Theta: np.ndarray
    residuals: dict[str, float] = field(default_factory=dict)

    @property
    def commutator(self) -> np.ndarray:
        return self.J_plus @ self.J_minus - self.J_minus @ self.J_plus


def _grid(j: float, alpha: float) -> np.ndarray:
    if j <= 0:
        raise DomainError("j must be > 0")
    if alpha <= 0:
        raise DomainError("the grid step alpha must be > 0")
    steps = 2 * j / alpha
    k = round(steps)
    if abs(steps - k) > 1e-9 * max(1.0, steps):
        raise DomainError(f"grid does not close: 2j/alpha = {steps!r} is not an integer")
    m = -j + alpha * np.arange(k + 1)
    m[-1] = j
    return m


def build_representation(j: float, alpha: float) -> Su2Representation:
    """Matrices of ``J+``, ``J-`` and Theta on the grid, plus residual norms.

    Residuals (spectral norms):

    ``theta_jplus``      ``[Theta, J+] - alpha J+``
    ``theta_jminus``     ``[Theta, J-] + alpha J-``
    ``jplus_jminus``     ``[J+, J-] - 2 alpha^-2 Theta``
    ``jplus_jminus_2am`` ``[J+, J-] - 2 alpha Theta``
    """
    m = _grid(j, alpha)
    size = m.size
    jp = np.zeros((size, size))
    jm = np.zeros((size, size))
    for k, mk in enumerate(m):
        c_plus, c_minus = ladder_coefficients(j, mk, alpha)
        if k + 1 < size:
            jp[k + 1, k] = c_plus
        if k > 0:
            jm[k - 1, k] = c_minus
    theta = np.diag(m)
    comm = jp @ jm - jm @ jp

    def norm(a):
        return float(np.linalg.norm(a, 2))

    residuals = {
        "theta_jplus": norm(theta @ jp - jp @ theta - alpha * jp),
        "theta_jminus": norm(theta @ jm - jm @ theta + alpha * jm),
        "jplus_jminus": norm(comm - 2 * alpha**-2 * theta),
        "jplus_jminus_2am": norm(comm - 2 * alpha * theta),
    }
    return Su2Representation(j, alpha, m, jp, jm, theta, residuals)


def quadratic_form(M_x: np.ndarray, M_p: np.ndarray, alpha: float, beta: float) -> np.ndarray:
    """``((1 + alpha) M_x^2 + (1 + beta) M_p^2 + I) / 2``."""
    eye = np.eye(M_x.shape[0])
    return 0.5 * ((1 + alpha) * (M_x @ M_x) + (1 + beta) * (M_p @ M_p) + eye)


def quadratic_hamiltonian(frame: DeformedFrame, N: int) -> TruncatedOperator:
    x = build_position(frame, N).entries
    p = build_momentum(frame, N).entries
    return TruncatedOperator(N, quadratic_form(x, p, frame.alpha, frame.beta), "hamiltonian")


def mode_operator(frame: DeformedFrame, N: int) -> TruncatedOperator:
    """``a = (M_x + i M_p)/sqrt(2)``; the quadratic Hamiltonian equals ``a a^+``."""
    x = build_position(frame, N).entries
    p = build_momentum(frame, N).entries
    return TruncatedOperator(N, (x + 1j * p) / math.sqrt(2.0))


def hamiltonian_eigenvalue_formula(j: float, m: float, alpha: float) -> tuple[float, float]:
    """Closed-form level and the ``(alpha^2/2) J+ J-`` eigenvalue at ``|j, m>``.

    The first value is ``(alpha^2/2) sqrt((j+m)(j-m)(j+m+alpha)(j-m+alpha))``;
    the second ``(alpha^2/2)(j+m)(j-m+alpha)``.  They coincide at ``m = 0``.
    """
    formula = 0.5 * alpha**2 * _sqrt_nonneg(
        (j + m) * (j - m) * (j + m + alpha) * (j - m + alpha), "energy")
    route = 0.5 * alpha**2 * (j + m) * (j - m + alpha)
    return formula, route


def j2_eigenvalue_formula(j: float, m: float, alpha: float) -> float:
    return 2 * alpha**2 * _sqrt_nonneg(
        (j + m) * (j - m) * (j + m + 2 * alpha) * (j - m + 2 * alpha), "J^2")
