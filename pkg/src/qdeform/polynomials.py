"""Deformed polynomial families generated by three-term recurrences.

``P``
    Coefficients of the generalized eigenvector of the position Jacobi
    matrix: ``z P_n = sqrt([n+1]_q) P_{n+1} + sqrt([n]_q) P_{n-1}``.
``HermiteX``
    q-Hermite recurrence ``2x H_n = H_{n+1} + (1 - q^n) H_{n-1}``.
``HermiteP``
    Momentum variant ``2ip H_n = H_{n+1} - (1 - q^n) H_{n-1}`` in the
    variable ``ip``.

All families start from ``Y_{-1} = 0, Y_0 = 1``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import DeformedFrame, log_q_number
from .errors import DomainError
from .spectra import eigendecompose, jacobi_matrix

__all__ = [
    "Family",
    "RecurrencePolynomial",
    "eval_P",
    "eval_P_sequence",
    "eval_qhermite",
    "eval_qhermite_momentum",
    "coefficients",
    "relate_P_to_H",
    "qpochhammer_sqrt",
    "zeros",
]


class Family(str, Enum):
    P = "P"
    HERMITE_X = "hermite-x"
    HERMITE_P = "hermite-p"


def _ladder_ratios(n_max: int, q: float) -> tuple[np.ndarray, np.ndarray]:
    """``1/sqrt([n+1])`` and ``sqrt([n]/[n+1])`` for ``n = 0..n_max-1``.

    Built from logarithms so that neither factor overflows for large ``n``.
    """
    log_qn = np.array([0.0] + [log_q_number(k, q) for k in range(1, n_max + 1)])
    inv = np.exp(-0.5 * log_qn[1:])
    ratio = np.zeros(n_max)
    ratio[1:] = np.exp(0.5 * (log_qn[1:n_max] - log_qn[2:]))
    return inv, ratio


def eval_P_sequence(n: int, z: complex, q: float) -> np.ndarray:
    """Values ``P_0(z), ..., P_n(z)``."""
    if n < 0:
        raise DomainError("degree must be >= 0")
    out = np.zeros(n + 1, dtype=complex)
    out[0] = 1.0
    if n == 0:
        return out
    inv, ratio = _ladder_ratios(n, q)
    prev, cur = 0.0, 1.0 + 0j
    for k in range(n):
        prev, cur = cur, z * cur * inv[k] - ratio[k] * prev
        if not cmath.isfinite(cur):
            raise OverflowError(f"P_{k + 1}({z}) overflows at q={q}")
        out[k + 1] = cur
    return out


def eval_P(n: int, z: complex, q: float) -> complex:
    return complex(eval_P_sequence(n, z, q)[n])


def eval_qhermite(n: int, x, q: float):
    """``H_{n,q}(x)``; ``x`` may be complex."""
    if n < 0:
        raise DomainError("degree must be >= 0")
    prev, cur = 0.0, 1.0
    for k in range(n):
        prev, cur = cur, 2 * x * cur - (1.0 - q**k) * prev
    return cur


def eval_qhermite_momentum(n: int, p: float, q: float) -> complex:
    """``H_{n,q}(ip)`` of the momentum family."""
    if n < 0:
        raise DomainError("degree must be >= 0")
    w = 2j * p
    prev, cur = 0.0 + 0j, 1.0 + 0j
    for k in range(n):
        prev, cur = cur, w * cur + (1.0 - q**k) * prev
    return cur


def coefficients(family: Family | str, n: int, q: float) -> np.ndarray:
    """Power-basis coefficients (lowest degree first) of the degree-``n`` member.

    ``HermiteP`` coefficients refer to the real variable ``p``.
    """
    family = Family(family)
    if n < 0:
        raise DomainError("degree must be >= 0")
    prev = np.zeros(n + 1, dtype=complex)
    cur = np.zeros(n + 1, dtype=complex)
    cur[0] = 1.0
    if family is Family.P:
        inv, ratio = _ladder_ratios(n, q) if n else (None, None)
    for k in range(n):
        shifted = np.roll(cur, 1)
        shifted[0] = 0.0
        if family is Family.P:
            nxt = shifted * inv[k] - ratio[k] * prev
        elif family is Family.HERMITE_X:
            nxt = 2 * shifted - (1.0 - q**k) * prev
        else:
            nxt = 2j * shifted + (1.0 - q**k) * prev
        prev, cur = cur, nxt
    if family is Family.HERMITE_P:
        return cur
    return cur.real.copy()


def qpochhammer_sqrt(n: int, q: float) -> complex:
    """``prod_{k=1}^{n} (1 - q^k)^(1/2)`` with principal roots taken factorwise.

    For ``q > 1`` each factor is negative; taking roots factorwise is what makes
    ``(q;q)_{n+1}^(1/2) = (q;q)_n^(1/2) (1 - q^(n+1))^(1/2)`` hold.
    """
    out = 1.0 + 0j
    for k in range(1, n + 1):
        out *= cmath.sqrt(1.0 - q**k)
    return out


def relate_P_to_H(n: int, x: float, frame: DeformedFrame) -> tuple[complex, complex]:
    """Both sides of ``(q;q)_n^(1/2) P_n(m_alpha x) = H_{n,q}(gamma)``.

    ``gamma = (1 - q)^(1/2) m_alpha x / 2`` is complex for ``q > 1``.  The left
    side runs the ``P`` recurrence, the right side the q-Hermite recurrence;
    the two share no code.
    """
    q = frame.q
    lhs = qpochhammer_sqrt(n, q) * eval_P(n, frame.m_alpha * x, q)
    gamma = 0.5 * cmath.sqrt(1.0 - q) * frame.m_alpha * x
    rhs = complex(eval_qhermite(n, gamma, q))
    return lhs, rhs


def zeros(n: int, q: float) -> np.ndarray:
    """Zeros of ``P_n``: eigenvalues of the ``n x n`` Jacobi matrix."""
    if n < 1:
        raise DomainError("P_0 has no zeros")
    lams, _ = eigendecompose(jacobi_matrix(n, q))
    return lams


@dataclass(frozen=True)
class RecurrencePolynomial:
    """One member of a family, bundled with its parameters."""

    family: Family
    degree: int
    q: float
    frame: DeformedFrame | None = None

    def __call__(self, arg):
        if self.family is Family.P:
            return eval_P(self.degree, arg, self.q)
        if self.family is Family.HERMITE_X:
            return eval_qhermite(self.degree, arg, self.q)
        return eval_qhermite_momentum(self.degree, arg, self.q)

    def coefficients(self) -> np.ndarray:
        return coefficients(self.family, self.degree, self.q)

    def zeros(self) -> np.ndarray:
        if self.family is not Family.P:
            raise DomainError("zeros are provided for the P family only")
        return zeros(self.degree, self.q)
