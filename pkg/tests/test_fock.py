import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from qdeform import DomainError, derive_frame, q_number
from qdeform.fock import (
    TruncatedOperator,
    build_hamiltonian,
    build_ladder,
    build_momentum,
    build_position,
    commutator_residual,
    interior_max,
    ketbra,
    merge_words,
    normal_order_expansion,
    normal_order_weights,
    theta_identity_residual,
    uncertainty_check,
    vacuum_projector_series,
)

THIRD = derive_frame(1 / 3, 1 / 3)


def random_frames(count, seed):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        a, b = rng.uniform(0.01, 1.5, size=2)
        if a * b < 0.8:
            out.append(derive_frame(a, b))
    return out


def test_ladder_examples():
    b, bd = build_ladder(2, 2.0)
    assert np.count_nonzero(b.entries) == 1 and b.entries[0, 1] == 1
    b, _ = build_ladder(3, 2.0)
    assert b.entries[1, 2] == pytest.approx(math.sqrt(3), rel=1e-15)
    b, bd = build_ladder(3, 1.0)
    np.testing.assert_allclose(b.entries, [[0, 1, 0], [0, 0, math.sqrt(2)], [0, 0, 0]])
    np.testing.assert_array_equal(bd.entries, b.entries.conj().T)
    assert np.all(b.entries[:, 0] == 0)
    assert b.label == "annihilator" and bd.label == "creator"


def test_ladder_rejects_small_dim():
    with pytest.raises(DomainError):
        build_ladder(1, 2.0)


def test_operator_is_read_only():
    b, _ = build_ladder(4, 2.0)
    with pytest.raises(ValueError):
        b.entries[0, 0] = 1


def test_operator_shape_checked():
    with pytest.raises(DomainError):
        TruncatedOperator(3, np.zeros((2, 2)))


def test_position_momentum_examples():
    x = build_position(THIRD, 2).entries
    assert x[0, 1].real == pytest.approx(0.8660254, abs=1e-7)
    x = build_position(THIRD, 5).entries
    assert x[2, 3].real == pytest.approx(2.2912878, abs=1e-7)
    p = build_momentum(THIRD, 5).entries
    x1b = 1 / THIRD.m_beta
    assert p[1, 0] == pytest.approx(1j * x1b)
    assert p[0, 1] == pytest.approx(-1j * x1b)


@pytest.mark.parametrize("frame", random_frames(10, 1))
def test_hermitian(frame):
    assert build_position(frame, 10).is_hermitian(1e-14)
    assert build_momentum(frame, 10).is_hermitian(1e-14)
    assert np.all(build_position(frame, 10).entries.imag == 0)


def test_hamiltonian_examples():
    h = build_hamiltonian(2.0, 3).entries
    np.testing.assert_allclose(h, np.diag([1, 4, 3]), atol=1e-14)
    np.testing.assert_allclose(build_hamiltonian(1.0, 2).entries, np.eye(2), atol=1e-15)
    for q in (1.0, 1.3, 3.0):
        h = build_hamiltonian(q, 9).entries
        assert h[0, 0] == pytest.approx(1.0)
        for n in range(8):
            assert h[n, n].real == pytest.approx(q_number(n, q) + q_number(n + 1, q), rel=1e-14)
        assert h[8, 8].real == pytest.approx(q_number(8, q), rel=1e-14)


def test_commutator_small_cases():
    np.testing.assert_allclose(commutator_residual(2.0, 2).entries, np.diag([0, -3]), atol=1e-14)
    np.testing.assert_allclose(commutator_residual(1.0, 3).entries, np.diag([0, 0, -3]), atol=1e-14)


@pytest.mark.parametrize("q", [1.0, 1.1, 1.5, 2.0, 3.7, 5.0])
@pytest.mark.parametrize("N", [4, 9, 16])
def test_commutator_interior_exact(q, N):
    r = commutator_residual(q, N)
    assert interior_max(r, N - 2) < 1e-12
    corner = r.entries[N - 1, N - 1].real
    assert corner == pytest.approx(-q * q_number(N - 1, q) - 1, rel=1e-9)


def test_commutator_float_product_is_not_exact():
    # why the residual is formed in extended precision: at q=5, N=16 the
    # squared float ladder entries carry errors of order eps*[n]_q
    b, bd = build_ladder(16, 5.0)
    raw = b.entries @ bd.entries - 5.0 * bd.entries @ b.entries - np.eye(16)
    assert interior_max(raw, 14) > 1e-12


def test_theta_identity_examples():
    assert interior_max(theta_identity_residual(THIRD, 8), 5) < 1e-10
    assert interior_max(theta_identity_residual(derive_frame(0.25, 1 / 9), 12), 9) < 1e-10
    tiny = derive_frame(1e-9, 1e-9)
    r = theta_identity_residual(tiny, 8)
    assert interior_max(r, 5) < 1e-10
    # canonical limit: [x, p] is i on the interior
    x = build_position(tiny, 8).entries
    p = build_momentum(tiny, 8).entries
    comm = x @ p - p @ x
    np.testing.assert_allclose(comm[:6, :6], 1j * np.eye(6), atol=1e-7)


def test_theta_identity_corrupted_only_at_edge():
    r = theta_identity_residual(THIRD, 8)
    assert np.max(np.abs(r.entries)) > 1e-3


def test_theta_identity_random_frames():
    worst = max(interior_max(theta_identity_residual(f, 12), 9) for f in random_frames(100, 2))
    assert worst < 1e-10


def test_uncertainty_vacuum_saturates():
    for f in random_frames(100, 3):
        vac = np.zeros(16)
        vac[0] = 1
        assert abs(uncertainty_check(vac, f, 16)) < 1e-10


def test_uncertainty_excited_states():
    one = np.zeros(16)
    one[1] = 1
    assert uncertainty_check(one, THIRD, 16) > 1e-3
    mix = np.zeros(16)
    mix[:2] = 1 / math.sqrt(2)
    assert uncertainty_check(mix, THIRD, 16) >= -1e-12


def test_uncertainty_rejects_bad_state():
    with pytest.raises(DomainError):
        uncertainty_check(np.ones(16), THIRD, 16)
    with pytest.raises(DomainError):
        uncertainty_check(np.ones(3) / math.sqrt(3), THIRD, 16)


def word_oracle(l, r):
    """Expand (b + b+)^l (b+ - b)^r letter by letter and normal-order by fiat."""
    out = Counter()
    x_letters = [("b", 1), ("bd", 1)]
    p_letters = [("bd", 1), ("b", -1)]
    for word in itertools.product(*([x_letters] * l + [p_letters] * r)):
        sign = math.prod(s for _, s in word)
        daggers = sum(1 for name, _ in word if name == "bd")
        out[(daggers, l + r - daggers)] += sign
    return {k: v for k, v in out.items() if v}


@pytest.mark.parametrize("l", range(5))
@pytest.mark.parametrize("r", range(5))
def test_normal_order_matches_word_oracle(l, r):
    merged = Counter()
    for d, c, w in normal_order_weights(l, r):
        merged[(d, c)] += w
    assert {k: v for k, v in merged.items() if v} == word_oracle(l, r)
    assert len(normal_order_weights(l, r)) == (l + 1) * (r + 1)


def test_normal_order_expansion_examples():
    ma, mb = THIRD.m_alpha, THIRD.m_beta
    words = merge_words(normal_order_expansion(1, 0, THIRD))
    assert words == pytest.approx({(1, 0): 1 / ma, (0, 1): 1 / ma})
    words = merge_words(normal_order_expansion(0, 1, THIRD))
    assert words[(1, 0)] == pytest.approx(1j / mb)
    assert words[(0, 1)] == pytest.approx(-1j / mb)
    words = normal_order_expansion(1, 1, THIRD)
    assert len(words) == 4
    scaled = Counter()
    for w in words:
        scaled[(w.dagger_power, w.plain_power)] += round((w.coefficient * ma * mb / 1j).real)
    assert scaled == Counter({(2, 0): 1, (0, 2): -1, (1, 1): 0})


def test_normal_order_expansion_matches_operator_when_commuting():
    # at q = 1 on the interior, :x p: differs from x p by the single reordering term
    f = derive_frame(1e-12, 1e-12)
    N = 10
    b, bd = build_ladder(N, f.q)
    total = np.zeros((N, N), dtype=complex)
    for w in normal_order_expansion(1, 1, f):
        total += w.coefficient * (np.linalg.matrix_power(bd.entries, w.dagger_power)
                                  @ np.linalg.matrix_power(b.entries, w.plain_power))
    x = build_position(f, N).entries
    p = build_momentum(f, N).entries
    # x p = :x p: + i/(m_a m_b) [b, b+]
    expected = x @ p - 1j / (f.m_alpha * f.m_beta) * np.eye(N)
    np.testing.assert_allclose(total[:8, :8], expected[:8, :8], atol=1e-9)


def brute_vacuum_sum(n, q, plain):
    q = Fraction(q)

    def qn(k):
        return sum(q**j for j in range(k))

    def qfact(k):
        return math.prod((qn(j) for j in range(1, k + 1)), start=Fraction(1))

    total = Fraction(0)
    for k in range(n + 1):
        c = Fraction((-1) ** k, math.factorial(k)) if plain else (-1) ** k * q ** (k * (k - 1) // 2) / qfact(k)
        total += c * qfact(n) / qfact(n - k)
    return total


@pytest.mark.parametrize("q", [Fraction(2), Fraction(3, 2), Fraction(1)])
def test_vacuum_coefficient_law_exact(q):
    for n in range(11):
        assert brute_vacuum_sum(n, q, plain=False) == (1 if n == 0 else 0)


def test_plain_coefficients_fail_exactly():
    assert brute_vacuum_sum(2, Fraction(2), plain=True) == Fraction(-1, 2)


@pytest.mark.parametrize("q", [1.0, 1.5, 2.0])
def test_vacuum_projector(q):
    P = vacuum_projector_series(q, 12).entries
    target = np.zeros((12, 12))
    target[0, 0] = 1
    assert interior_max(P - target, 10) < 1e-12


def test_vacuum_projector_plain_counterexample():
    P = vacuum_projector_series(2.0, 12, coefficients="plain").entries
    assert P[2, 2].real == pytest.approx((1 - 2.0) / 2, abs=1e-12)
    P1 = vacuum_projector_series(1.0, 12, coefficients="plain").entries
    assert abs(P1[0, 0] - 1) < 1e-12 and abs(P1[3, 3]) < 1e-12


def test_vacuum_projector_rejects_unknown_law():
    with pytest.raises(DomainError):
        vacuum_projector_series(2.0, 6, coefficients="other")


@pytest.mark.parametrize("m,n,q,N", [(0, 0, 2.0, 12), (1, 0, 2.0, 12), (2, 3, 1.5, 14), (4, 4, 2.0, 12)])
def test_ketbra(m, n, q, N):
    k = ketbra(m, n, q, N).entries
    target = np.zeros((N, N))
    target[m, n] = 1
    assert interior_max(k - target, N - 2) < 1e-10


def test_ketbra_range():
    with pytest.raises(DomainError):
        ketbra(10, 0, 2.0, 12)
