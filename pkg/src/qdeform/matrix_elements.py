"""Closed-form Fock matrix elements of ladder words and normal-ordered ``x^l p^r``.

Each closed form has a brute-force counterpart built from truncated matrix
products (:func:`oracle_element`), used by :func:`evaluate`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import DeformedFrame, log_q_factorial
from .errors import DomainError
from .fock import build_ladder, normal_order_expansion

__all__ = [
    "MatrixElementQuery",
    "MatrixElementResult",
    "normal_word_element",
    "antinormal_word_element",
    "normal_ordered_xp_element",
    "oracle_element",
    "evaluate",
]

Kind = Literal["normal_word", "antinormal_word", "normal_ordered_xp"]


def _check(*values: int) -> None:
    if any(v < 0 for v in values):
        raise DomainError("powers and Fock indices must be >= 0")


def normal_word_element(l: int, r: int, n: int, q: float) -> float:
    """``<n-r+l| (b^+)^l b^r |n> = sqrt([n]! [n-r+l]!) / [n-r]!`` (0 when ``n < r``)."""
    _check(l, r, n)
    if n < r:
        return 0.0
    log_val = 0.5 * (log_q_factorial(n, q) + log_q_factorial(n - r + l, q)) \
        - log_q_factorial(n - r, q)
    return math.exp(log_val)


def antinormal_word_element(l: int, r: int, n: int, q: float) -> float:
    """``<n+l-r| b^r (b^+)^l |n> = [n+l]! / sqrt([n]! [n+l-r]!)`` (0 when ``n+l < r``)."""
    _check(l, r, n)
    if n + l < r:
        return 0.0
    log_val = log_q_factorial(n + l, q) \
        - 0.5 * (log_q_factorial(n, q) + log_q_factorial(n + l - r, q))
    return math.exp(log_val)


def normal_ordered_xp_element(l: int, r: int, m: int, n: int, frame: DeformedFrame) -> complex:
    """``<m| :x^l p^r: |n>`` as a sum of normal-word elements."""
    _check(l, r, m, n)
    total = 0j
    for word in normal_order_expansion(l, r, frame):
        if m == n - word.plain_power + word.dagger_power:
            total += word.coefficient * normal_word_element(
                word.dagger_power, word.plain_power, n, frame.q)
    return total


def oracle_element(kind: Kind, l: int, r: int, m: int, n: int,
                   q: float, frame: DeformedFrame | None = None) -> complex:
    """Same element read off products of truncated ladder matrices.

    The truncation ``N = n + l + r + 4`` keeps the cutoff away from every
    intermediate state.
    """
    _check(l, r, m, n)
    N = n + l + r + 4
    if max(m, n) >= N:
        return 0j
    b, bd = build_ladder(N, q)
    B, Bd = b.entries, bd.entries
    mp = np.linalg.matrix_power
    if kind == "normal_word":
        return complex((mp(Bd, l) @ mp(B, r))[m, n])
    if kind == "antinormal_word":
        return complex((mp(B, r) @ mp(Bd, l))[m, n])
    if kind == "normal_ordered_xp":
        if frame is None:
            raise DomainError("normal_ordered_xp needs a frame")
        total = 0j
        for word in normal_order_expansion(l, r, frame):
            total += word.coefficient * (mp(Bd, word.dagger_power) @ mp(B, word.plain_power))[m, n]
        return total
    raise DomainError(f"unknown element kind {kind!r}")


@dataclass(frozen=True)
class MatrixElementQuery:
    kind: Kind
    l: int
    r: int
    m: int
    n: int


@dataclass(frozen=True)
class MatrixElementResult:
    query: MatrixElementQuery
    closed_form: complex
    oracle: complex

    @property
    def abs_delta(self) -> float:
        return abs(self.closed_form - self.oracle)


def evaluate(query: MatrixElementQuery, q: float,
             frame: DeformedFrame | None = None) -> MatrixElementResult:
    """Closed form and oracle for one query; selection rules give exact zeros."""
    k, l, r, m, n = query.kind, query.l, query.r, query.m, query.n
    if k == "normal_word":
        value = normal_word_element(l, r, n, q) if m == n - r + l else 0.0
    elif k == "antinormal_word":
        value = antinormal_word_element(l, r, n, q) if m == n + l - r else 0.0
    elif k == "normal_ordered_xp":
        if frame is None:
            raise DomainError("normal_ordered_xp needs a frame")
        value = normal_ordered_xp_element(l, r, m, n, frame)
    else:
        raise DomainError(f"unknown element kind {k!r}")
    return MatrixElementResult(query, complex(value), oracle_element(k, l, r, m, n, q, frame))
