"""Spectra of the truncated Jacobi matrices and self-adjointness diagnostics.

The eigensolver is bisection on Sturm-sequence counts, which is indifferent
to the many orders of magnitude spanned by q-grown off-diagonal entries.
Eigenvectors, when requested, come from inverse iteration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .core import DeformedFrame, log_q_number, q_number
from .errors import ConvergenceError, DomainError
from .fock import TruncatedOperator, build_momentum, build_position

__all__ = [
    "TridiagonalSymmetric",
    "DeficiencyReport",
    "eigendecompose",
    "jacobi_matrix",
    "momentum_phase_reduction",
    "quadrature_spectrum",
    "deficiency_diagnostics",
    "first_index_exceeding",
]

_MAX_SWEEPS = 200


@dataclass(frozen=True)
class TridiagonalSymmetric:
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        e = np.asarray(self.offdiag, dtype=float)
        if d.ndim != 1 or e.shape != (max(d.size - 1, 0),):
            raise DomainError("offdiag must have length len(diag) - 1")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def size(self) -> int:
        return self.diag.size

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def norm(self) -> float:
        """Gershgorin bound on the spectral radius."""
        e = np.abs(self.offdiag)
        row = np.abs(self.diag).copy()
        row[:-1] += e
        row[1:] += e
        return float(row.max(initial=0.0))


def jacobi_matrix(n: int, q: float, scale: float = 1.0) -> TridiagonalSymmetric:
    """Zero-diagonal ``n x n`` matrix with off-diagonal ``sqrt([k]_q)/scale``."""
    if n < 1:
        raise DomainError("Jacobi matrix needs n >= 1")
    off = np.array([math.sqrt(q_number(k, q)) for k in range(1, n)]) / scale
    return TridiagonalSymmetric(np.zeros(n), off)


def _sturm_counts(d: np.ndarray, e2: np.ndarray, shifts: np.ndarray, pivmin: float) -> np.ndarray:
    # number of eigenvalues strictly below each shift
    count = np.zeros(shifts.shape, dtype=int)
    t = d[0] - shifts
    t = np.where(np.abs(t) < pivmin, -pivmin, t)
    count += t < 0
    for i in range(1, d.size):
        t = d[i] - shifts - e2[i - 1] / t
        t = np.where(np.abs(t) < pivmin, -pivmin, t)
        count += t < 0
    return count


def _bisect_all(d: np.ndarray, e: np.ndarray) -> np.ndarray:
    n = d.size
    if n == 1:
        return d.copy()
    e2 = e * e
    tnorm = TridiagonalSymmetric(d, e).norm()
    if tnorm == 0.0:
        return np.zeros(n)
    pivmin = np.finfo(float).tiny * max(1.0, float(e2.max(initial=0.0)))
    lo = np.full(n, -tnorm * (1 + 1e-12) - pivmin)
    hi = np.full(n, tnorm * (1 + 1e-12) + pivmin)
    target = np.arange(n)
    tol = 4 * np.finfo(float).eps * tnorm
    for _ in range(_MAX_SWEEPS):
        width = hi - lo
        if np.all(width <= tol + 4 * np.finfo(float).eps * np.maximum(np.abs(lo), np.abs(hi))):
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        below = _sturm_counts(d, e2, mid, pivmin)
        # eigenvalue k (0-based) lies below mid iff more than k eigenvalues do
        go_left = below > target
        hi = np.where(go_left, mid, hi)
        lo = np.where(go_left, lo, mid)
    raise ConvergenceError(f"bisection did not converge within {_MAX_SWEEPS} sweeps")


def _inverse_iteration(T: TridiagonalSymmetric, lams: np.ndarray) -> np.ndarray:
    n = T.size
    tnorm = T.norm()
    eps = np.finfo(float).eps
    rng = np.random.default_rng(0)
    vecs = np.zeros((n, n))
    cluster_tol = 1e-3 * tnorm
    for k, lam in enumerate(lams):
        ab = np.zeros((3, n))
        ab[0, 1:] = T.offdiag
        ab[1] = T.diag - (lam + 10 * eps * tnorm)
        ab[2, :-1] = T.offdiag
        v = rng.standard_normal(n)
        v /= np.linalg.norm(v)
        neighbours = [j for j in range(k) if abs(lams[j] - lam) <= cluster_tol]
        for _ in range(4):
            v = solve_banded((1, 1), ab, v, check_finite=False)
            for j in neighbours:
                v -= (vecs[:, j] @ v) * vecs[:, j]
            v /= np.linalg.norm(v)
        vecs[:, k] = v
    return vecs


def eigendecompose(T: TridiagonalSymmetric, want_vectors: bool = False):
    """Eigenvalues (ascending) and optionally eigenvectors of ``T``.

    Returns ``(eigenvalues, eigenvectors)`` where ``eigenvectors`` is ``None``
    unless requested; column ``k`` pairs with ``eigenvalues[k]``.
    """
    if T.size < 1:
        raise DomainError("empty matrix")
    if not (np.all(np.isfinite(T.diag)) and np.all(np.isfinite(T.offdiag))):
        raise ConvergenceError("matrix has non-finite entries")
    # scale to unit norm so squared off-diagonals cannot overflow
    s = T.norm() or 1.0
    lams = _bisect_all(T.diag / s, T.offdiag / s) * s
    if not want_vectors:
        return lams, None
    return lams, _inverse_iteration(T, lams)


def momentum_phase_reduction(M_p: TruncatedOperator) -> TridiagonalSymmetric:
    """Real symmetric form of a ``+-i``-pattern momentum matrix.

    Conjugation by ``diag(1, i, i^2, ...)`` turns entries ``+-i x_n`` into
    ``x_n`` without changing the spectrum.
    """
    n = M_p.dim
    phase = 1j ** np.arange(n)
    real_form = (phase.conj()[:, None] * M_p.entries) * phase[None, :]
    scale = float(np.max(np.abs(real_form), initial=1.0))
    if np.max(np.abs(real_form.imag), initial=0.0) > 1e-12 * scale:
        raise DomainError("matrix is not of the +-i tridiagonal momentum form")
    return TridiagonalSymmetric(np.diag(real_form).real.copy(),
                                np.diag(real_form, -1).real.copy())


def quadrature_spectrum(frame: DeformedFrame, N: int) -> np.ndarray:
    """Ascending eigenvalues of ``(m_alpha^2 M_x^2 + m_beta^2 M_p^2)/2``.

    That operator equals ``B B^+ + B^+ B`` on the truncated space, so its low
    eigenvalues are ``[n]_q + [n+1]_q = 2 E_n``.
    """
    x = build_position(frame, N).entries
    p = build_momentum(frame, N).entries
    op = 0.5 * (frame.m_alpha**2 * (x @ x) + frame.m_beta**2 * (p @ p))
    return np.linalg.eigvalsh(op)


def first_index_exceeding(frame: DeformedFrame, bound: float, n_max: int = 10_000) -> int | None:
    """Smallest ``n`` with ``x_{n,alpha} > bound``, or ``None`` up to ``n_max``."""
    log_bound = math.log(bound) + math.log(frame.m_alpha)
    for n in range(1, n_max + 1):
        if 0.5 * log_q_number(n, frame.q) > log_bound:
            return n
    return None


@dataclass(frozen=True)
class DeficiencyReport:
    """Numerical evidence for the hypotheses behind the deficiency-index claim.

    ``partial_sums[k]`` is the sum of ``1/x_{n,alpha}`` for ``n = 1..k+1`` and
    ``ratio_estimates[k] = x_{k+1}/x_{k+2}`` (ratio of consecutive terms).
    ``concavity_log_margin[k]`` is ``log(1 - x_{n+1} x_{n-1} / x_n^2)`` at
    ``n = k + 2``; finiteness means the strict inequality holds.
    ``deficiency_vector_norms[k]`` is the partial sum of ``|P_n(z)|^2`` up to
    ``n = k``.  ``increment_ratio_fit`` is the per-step geometric ratio of the
    increments ``|P_n(z)|^2`` fitted over the tail, and
    ``two_step_increment_ratio`` the same over steps of two.
    """

    q: float
    probe_z: complex
    partial_sums: np.ndarray
    ratio_estimates: np.ndarray
    ratio_limit_target: float
    concavity_log_margin: np.ndarray
    log_concavity_ok: bool
    deficiency_vector_norms: np.ndarray
    increment_ratio_fit: float
    two_step_increment_ratio: float
    unbounded_index: int | None


def _fit_ratio(values: np.ndarray, step: int) -> float:
    n = np.arange(values.size)
    keep = (values > 1e-250) & (n >= 10)
    if keep.sum() < 4:
        return float("nan")
    idx = n[keep]
    # restrict to the second half of the usable range (asymptotic regime)
    idx = idx[idx >= idx[0] + (idx[-1] - idx[0]) // 2]
    if step == 1:
        slope = np.polyfit(idx, np.log(values[idx]), 1)[0]
        return float(math.exp(slope))
    pairs = idx[idx + step <= idx[-1]]
    return float(np.exp(np.median(np.log(values[pairs + step]) - np.log(values[pairs]))))


def deficiency_diagnostics(
    frame: DeformedFrame,
    N_terms: int,
    probe_z: complex = 1j,
    unbounded_at: float = 1e6,
) -> DeficiencyReport:
    """Run the series, ratio, log-concavity and deficiency-vector diagnostics.

    Everything is done with logarithms of ``[n]_q`` so ``N_terms`` may reach
    the thousands at any ``q``.
    """
    probe_z = complex(probe_z)
    if probe_z.imag == 0.0:
        raise DomainError("probe point must have a nonzero imaginary part")
    if N_terms < 10:
        raise DomainError("N_terms must be >= 10")
    q = frame.q
    if q <= 1.0:
        raise DomainError("diagnostics require q > 1")
    # log x_n for n = 1..N_terms+1
    log_qn = np.array([log_q_number(n, q) for n in range(1, N_terms + 2)])
    log_x = 0.5 * log_qn - math.log(frame.m_alpha)
    partial_sums = np.cumsum(np.exp(-log_x[:N_terms]))
    ratio_estimates = np.exp(log_x[:N_terms] - log_x[1 : N_terms + 1])

    # x_n^2 - x_{n+1} x_{n-1} = q^(n-1)/m_alpha^2 (Casorati identity of [n]_q)
    n = np.arange(2, N_terms + 1)
    margin = (n - 1) * math.log(q) - log_qn[n - 1] * 2
    concavity_ok = bool(np.all(np.isfinite(margin)) and np.all(margin < 0.0))
    # direct comparison wherever the gap is resolvable in double precision
    direct = n[margin > math.log(1e-12)]
    if direct.size:
        # x_{n+1} x_{n-1} < x_n^2, scaled by x_n^2 so nothing overflows
        lo = np.exp(log_x[direct - 2] - log_x[direct - 1])
        hi = np.exp(log_x[direct] - log_x[direct - 1])
        concavity_ok &= bool(np.all(lo * hi < 1.0))

    p_sq = _deficiency_increments(q, N_terms, probe_z)
    return DeficiencyReport(
        q=q,
        probe_z=probe_z,
        partial_sums=partial_sums,
        ratio_estimates=ratio_estimates,
        ratio_limit_target=q**-0.5,
        concavity_log_margin=margin,
        log_concavity_ok=concavity_ok,
        deficiency_vector_norms=np.cumsum(p_sq),
        increment_ratio_fit=_fit_ratio(p_sq, 1),
        two_step_increment_ratio=_fit_ratio(p_sq, 2),
        unbounded_index=first_index_exceeding(frame, unbounded_at, N_terms),
    )


def _deficiency_increments(q: float, N_terms: int, z: complex) -> np.ndarray:
    from .polynomials import eval_P_sequence

    values = eval_P_sequence(N_terms, z, q)
    return np.abs(values) ** 2
