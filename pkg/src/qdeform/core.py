"""Deformation parameters and q-number arithmetic.

The commutator ``[x, p] = i(1 + alpha x^2 + beta p^2)`` is realized through
ladder operators ``b, b^+`` obeying ``b b^+ - q b^+ b = 1``.  Everything in the
package is dimensionless (hbar = mass = frequency = 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "DeformedFrame",
    "derive_frame",
    "q_number",
    "log_q_number",
    "q_numbers",
    "q_factorial",
    "log_q_factorial",
    "energy_level",
]


@dataclass(frozen=True)
class DeformedFrame:
    """Parameter bundle of a deformed oscillator.

    Build instances with :func:`derive_frame`; the derived fields are not
    checked for consistency when the constructor is called directly.
    """

    alpha: float
    beta: float
    q: float
    m_alpha: float
    m_beta: float

    @property
    def sqrt_ab(self) -> float:
        return math.sqrt(self.alpha * self.beta)


def derive_frame(alpha: float, beta: float) -> DeformedFrame:
    """Return the q-realization of the deformation with parameters ``alpha, beta``.

    ``q = (1 + s)/(1 - s)`` and ``m_alpha = sqrt(2 alpha (1/s - 1))`` with
    ``s = sqrt(alpha beta)``; ``m_beta`` likewise.

    Raises
    ------
    DomainError
        If either parameter is not strictly positive or ``alpha*beta >= 1``.
    """
    alpha = float(alpha)
    beta = float(beta)
    if not (math.isfinite(alpha) and math.isfinite(beta)):
        raise DomainError("alpha and beta must be finite")
    if alpha <= 0.0 or beta <= 0.0:
        raise DomainError(
            f"alpha and beta must both be > 0 (got alpha={alpha!r}, beta={beta!r})")
    if alpha * beta >= 1.0:
        raise DomainError(f"alpha*beta must be < 1 (got {alpha * beta!r})")
    s = math.sqrt(alpha * beta)
    q = (1.0 + s) / (1.0 - s)
    # 2 alpha (1/s - 1) == 2 sqrt(alpha/beta) (1 - s); the right side avoids 1/s
    m_alpha = math.sqrt(2.0 * math.sqrt(alpha / beta) * (1.0 - s))
    m_beta = math.sqrt(2.0 * math.sqrt(beta / alpha) * (1.0 - s))
    return DeformedFrame(alpha, beta, q, m_alpha, m_beta)


def _check_q(q: float) -> None:
    if not q >= 1.0:
        raise DomainError(f"q must be >= 1 (got {q!r})")


def q_number(n: int, q: float) -> float:
    """``[n]_q = (1 - q^n)/(1 - q)``, with the exact value ``n`` at ``q = 1``."""
    if n < 0:
        raise DomainError("n must be >= 0")
    _check_q(q)
    if q == 1.0 or n == 0:
        return float(n)
    qm1 = q - 1.0
    if qm1 >= 0.5:
        return (q**n - 1.0) / qm1
    # expm1/log1p keep full relative precision when q is close to 1
    return math.expm1(n * math.log1p(qm1)) / qm1


def log_q_number(n: int, q: float) -> float:
    """Natural log of ``[n]_q`` that stays finite where ``[n]_q`` overflows."""
    if n < 1:
        raise DomainError("log [n]_q requires n >= 1")
    _check_q(q)
    if q == 1.0:
        return math.log(n)
    qm1 = q - 1.0
    t = n * math.log1p(qm1)
    if t < 30.0:
        return math.log(math.expm1(t)) - math.log(qm1)
    return t + math.log1p(-math.exp(-t)) - math.log(qm1)


def q_numbers(count: int, q: float) -> np.ndarray:
    """Array ``([0]_q, [1]_q, ..., [count-1]_q)``."""
    return np.array([q_number(n, q) for n in range(count)], dtype=float)


def q_factorial(n: int, q: float) -> float:
    """``[n]_q! = [1]_q [2]_q ... [n]_q``; raises OverflowError past the float range."""
    if n < 0:
        raise DomainError("n must be >= 0")
    out = 1.0
    for k in range(1, n + 1):
        out *= q_number(k, q)
    if math.isinf(out):
        raise OverflowError(
            f"[{n}]_q! overflows double precision at q={q}; use log_q_factorial")
    return out


def log_q_factorial(n: int, q: float) -> float:
    if n < 0:
        raise DomainError("n must be >= 0")
    return math.fsum(log_q_number(k, q) for k in range(1, n + 1))


def energy_level(n: int, q: float) -> float:
    """Level ``E_n = ([n]_q + [n+1]_q)/2`` of the deformed oscillator."""
    return 0.5 * (q_number(n, q) + q_number(n + 1, q))
