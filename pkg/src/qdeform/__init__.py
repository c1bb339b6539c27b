"""Numerical toolkit for the theta(x, p)-deformed harmonic oscillator in its
q-oscillator realization."""

from .core import (
    DeformedFrame,
    derive_frame,
    energy_level,
    log_q_factorial,
    q_factorial,
    q_number,
)
from .errors import ConvergenceError, DomainError

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DeformedFrame",
    "DomainError",
    "derive_frame",
    "energy_level",
    "log_q_factorial",
    "q_factorial",
    "q_number",
]
