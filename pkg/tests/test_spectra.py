import math

import numpy as np
import pytest

from qdeform import ConvergenceError, DomainError, derive_frame, energy_level
from qdeform.fock import build_momentum, build_position
from qdeform.spectra import (
    TridiagonalSymmetric,
    deficiency_diagnostics,
    eigendecompose,
    first_index_exceeding,
    jacobi_matrix,
    momentum_phase_reduction,
    quadrature_spectrum,
)

THIRD = derive_frame(1 / 3, 1 / 3)


def test_small_examples():
    lams, _ = eigendecompose(TridiagonalSymmetric([0, 0], [1]))
    np.testing.assert_allclose(lams, [-1, 1], atol=1e-15)
    lams, _ = eigendecompose(TridiagonalSymmetric([0, 0, 0], [1, 1]))
    np.testing.assert_allclose(lams, [-math.sqrt(2), 0, math.sqrt(2)], atol=1e-15)
    lams, _ = eigendecompose(TridiagonalSymmetric([3.5], []))
    assert lams.tolist() == [3.5]


def test_position_matrix_against_dense_oracle():
    x = build_position(THIRD, 6).entries.real
    T = TridiagonalSymmetric(np.diag(x).copy(), np.diag(x, 1).copy())
    lams, _ = eigendecompose(T)
    oracle = np.linalg.eigvalsh(x)
    np.testing.assert_allclose(lams, oracle, atol=1e-12 * T.norm())
    np.testing.assert_allclose(lams, -lams[::-1], atol=1e-12)


def test_random_matrices_against_dense_oracle():
    rng = np.random.default_rng(11)
    for _ in range(100):
        n = int(rng.integers(1, 65))
        d = rng.normal(size=n) * 10 ** rng.uniform(-3, 3)
        e = rng.normal(size=n - 1) * 10 ** rng.uniform(-3, 3, size=n - 1)
        T = TridiagonalSymmetric(d, e)
        lams, _ = eigendecompose(T)
        oracle = np.linalg.eigvalsh(T.dense())
        radius = max(np.max(np.abs(oracle)), 1e-300)
        assert np.all(np.diff(lams) >= 0)
        assert np.max(np.abs(lams - oracle)) <= 1e-9 * radius


def test_eigenvectors_residual():
    rng = np.random.default_rng(5)
    cases = [jacobi_matrix(40, 2.0), jacobi_matrix(30, 1.0),
             TridiagonalSymmetric(np.zeros(20), np.ones(19))]
    cases += [TridiagonalSymmetric(rng.normal(size=25), rng.normal(size=24)) for _ in range(5)]
    # nearly degenerate pair (Wilkinson-type)
    cases.append(TridiagonalSymmetric(np.abs(np.arange(-10, 11)).astype(float), np.ones(20)))
    for T in cases:
        lams, vecs = eigendecompose(T, want_vectors=True)
        A = T.dense()
        for k in range(T.size):
            v = vecs[:, k]
            assert np.linalg.norm(A @ v - lams[k] * v) <= 1e-10 * T.norm()
        np.testing.assert_allclose(vecs.T @ vecs, np.eye(T.size), atol=1e-8)


def test_wide_dynamic_range():
    T = jacobi_matrix(80, 3.0)
    lams, _ = eigendecompose(T)
    assert np.all(np.isfinite(lams))
    assert np.max(np.abs(lams + lams[::-1])) <= 1e-10 * T.norm()
    assert lams[-1] == pytest.approx(np.linalg.eigvalsh(T.dense())[-1], rel=1e-12)


def test_zero_diagonal_symmetry():
    for q in (1.0, 1.2, 2.0, 5.0):
        for n in (5, 12, 33):
            lams, _ = eigendecompose(jacobi_matrix(n, q))
            assert np.max(np.abs(lams + lams[::-1])) <= 1e-10 * max(1.0, abs(lams[-1]))


def test_errors():
    with pytest.raises(ConvergenceError):
        eigendecompose(TridiagonalSymmetric([0.0, 0.0], [np.inf]))
    with pytest.raises(DomainError):
        TridiagonalSymmetric([0, 0, 0], [1])
    with pytest.raises(DomainError):
        eigendecompose(TridiagonalSymmetric([], []))
    with pytest.raises(DomainError):
        jacobi_matrix(0, 2.0)


def test_phase_reduction_two_by_two():
    p = build_momentum(THIRD, 2)
    T = momentum_phase_reduction(p)
    assert T.offdiag[0] == pytest.approx(1 / THIRD.m_beta, rel=1e-15)
    assert np.all(T.diag == 0)


@pytest.mark.parametrize("alpha,beta", [(1 / 3, 1 / 3), (0.25, 1 / 9), (0.02, 0.7)])
def test_phase_reduction_isospectral(alpha, beta):
    f = derive_frame(alpha, beta)
    p = build_momentum(f, 8)
    T = momentum_phase_reduction(p)
    lams, _ = eigendecompose(T)
    np.testing.assert_allclose(lams, np.linalg.eigvalsh(p.entries), atol=1e-12 * T.norm())
    x_lams, _ = eigendecompose(TridiagonalSymmetric(np.zeros(8), np.diag(build_position(f, 8).entries.real, 1)))
    np.testing.assert_allclose(lams, f.m_alpha / f.m_beta * x_lams, rtol=1e-12, atol=1e-13)


def test_phase_reduction_undeformed_symmetry():
    f = derive_frame(1e-10, 1e-10)
    lp, _ = eigendecompose(momentum_phase_reduction(build_momentum(f, 10)))
    lx = np.linalg.eigvalsh(build_position(f, 10).entries)
    np.testing.assert_allclose(lp, lx, atol=1e-12)


def test_phase_reduction_rejects_other_patterns():
    with pytest.raises(DomainError):
        momentum_phase_reduction(build_position(THIRD, 4))


def test_quadrature_spectrum_is_twice_energy():
    f = derive_frame(0.0911, 0.0911)
    lam = quadrature_spectrum(f, 64)
    for n in range(6):
        assert lam[n] == pytest.approx(2 * energy_level(n, f.q), rel=1e-9)


def test_deficiency_examples():
    rep = deficiency_diagnostics(THIRD, 200)
    assert rep.ratio_estimates[199] == pytest.approx(2**-0.5, abs=1e-6)
    assert rep.ratio_limit_target == pytest.approx(0.7071068, abs=1e-7)
    assert rep.log_concavity_ok
    incr = np.diff(rep.partial_sums)
    assert np.all(incr >= 0) and np.all(incr[:40] > 0)
    # increments of the y-series decay with ratio tending to q^-1/2
    assert incr[30] / incr[29] == pytest.approx(2**-0.5, rel=1e-6)
    assert np.all(rep.ratio_estimates[5:] < 1)
    assert rep.unbounded_index is not None and rep.unbounded_index <= 50


def test_deficiency_vector_norms_converge():
    rep = deficiency_diagnostics(THIRD, 300)
    norms = rep.deficiency_vector_norms
    assert np.all(np.diff(norms) >= 0)
    assert norms[-1] - norms[-50] < 1e-12 * norms[-1]
    assert rep.two_step_increment_ratio == pytest.approx(0.5, rel=0.1)


def test_unbounded_index():
    n = first_index_exceeding(THIRD, 1e6)
    x = [math.sqrt(2.0**k - 1) / THIRD.m_alpha for k in range(1, n + 1)]
    assert x[-1] > 1e6 >= x[-2]
    assert n <= 50


def test_log_concavity_exact_oracle():
    # [n]_2 = 2^n - 1 so x_n^2 = (2^n - 1)/m^2; compare exactly in integers
    rep = deficiency_diagnostics(THIRD, 10_000)
    assert rep.log_concavity_ok
    for n in range(2, 10_001):
        assert (2 ** (n + 1) - 1) * (2 ** (n - 1) - 1) < (2**n - 1) ** 2
    # margin equals log(q^(n-1) / [n]^2) from the Casorati identity
    n = 500
    exact = math.log(2 ** (n - 1)) - 2 * math.log(2**n - 1)
    assert rep.concavity_log_margin[n - 2] == pytest.approx(exact, rel=1e-12)


def test_deficiency_rejects():
    with pytest.raises(DomainError):
        deficiency_diagnostics(THIRD, 50, probe_z=0.5)
    with pytest.raises(DomainError):
        deficiency_diagnostics(THIRD, 5)
