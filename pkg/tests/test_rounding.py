import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dilithium_batch.params import PARAMS, Q
from dilithium_batch.rounding import (
    ALPHA_32,
    ALPHA_88,
    ParameterError,
    chknorm,
    decompose,
    highbits,
    hint_weight,
    infinity_norm,
    lowbits,
    make_hint,
    power2round,
    use_hint,
)
from oracles import centered, decompose_ref, power2round_ref

ALL = np.arange(Q, dtype=np.int64)
ALPHAS = [ALPHA_88, ALPHA_32]


def test_alpha_values():
    assert ALPHA_88 == 2 * PARAMS[2].gamma2 == 190464
    assert ALPHA_32 == 2 * PARAMS[3].gamma2 == 523776


def test_power2round_examples():
    assert power2round(0) == (0, 0)
    assert power2round(4096) == (0, 4096)
    assert power2round(Q - 1) == (1023, 0)


def test_power2round_exhaustive():
    a1, a0 = power2round(ALL)
    assert np.array_equal(a1 * 8192 + a0, ALL)
    assert a0.min() == -4095 and a0.max() == 4096
    assert np.all((ALL - a0) % 8192 == 0)


def test_power2round_matches_definition():
    rng = np.random.default_rng(3)
    for r in rng.integers(0, Q, 2000):
        assert power2round(int(r)) == power2round_ref(int(r))


def test_decompose_examples():
    assert decompose(0, ALPHA_88) == (0, 0)
    assert decompose(380928, ALPHA_88) == (2, 0)
    assert decompose(Q - 1, ALPHA_88) == (0, -1)
    assert decompose(Q - 1, ALPHA_32) == (0, -1)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_decompose_exhaustive(alpha):
    m = (Q - 1) // alpha
    r1, r0 = decompose(ALL, alpha)
    assert np.all((r1 * alpha + r0 - ALL) % Q == 0)
    assert r1.min() == 0 and r1.max() == m - 1
    wrap = ALL - r0 == Q - 1  # never true after the fix-up, by construction
    assert not wrap.any()
    # the corrected branch: exactly the values whose plain split would hit q - 1
    plain_r0 = ((ALL + alpha // 2 - 1) % alpha) - (alpha // 2 - 1)
    special = ALL - plain_r0 == Q - 1
    assert np.all(r0[~special] == plain_r0[~special])
    assert np.all(r0[~special] > -alpha // 2) and np.all(r0[~special] <= alpha // 2)
    assert np.all(r1[special] == 0) and np.all(r0[special] == plain_r0[special] - 1)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_decompose_matches_definition(alpha):
    rng = np.random.default_rng(alpha)
    rs = rng.integers(0, Q, 5000)
    r1, r0 = decompose(rs, alpha)
    for r, a, b in zip(rs, r1, r0):
        assert (int(a), int(b)) == decompose_ref(int(r), alpha)


def test_high_low_projection():
    r = np.array([0, 380928, Q - 1, 12345])
    assert np.array_equal(highbits(r, ALPHA_88), decompose(r, ALPHA_88)[0])
    assert np.array_equal(lowbits(r, ALPHA_88), decompose(r, ALPHA_88)[1])


def test_bad_alpha():
    with pytest.raises(ParameterError):
        decompose(5, 1000)


def test_make_hint_examples():
    assert make_hint(0, 12345, ALPHA_32) == 0
    # same cell: r and r + z share high bits
    assert make_hint(5, 100, ALPHA_32) == 0


def test_use_hint_examples():
    assert use_hint(0, 777777, ALPHA_32) == highbits(777777, ALPHA_32)
    assert use_hint(1, 1, ALPHA_32) == 1
    assert use_hint(1, Q - 1, ALPHA_32) == 15


@pytest.mark.parametrize("alpha", ALPHAS)
def test_hint_lemma(alpha):
    gamma2 = alpha // 2
    rng = np.random.default_rng(99 + alpha)
    z = rng.integers(-gamma2, gamma2 + 1, 10**6)
    r = rng.integers(0, Q, 10**6)
    h = make_hint(z % Q, r, alpha)
    assert np.array_equal(use_hint(h, r, alpha), highbits((r + z) % Q, alpha))
    m = (Q - 1) // alpha
    diff = (use_hint(h, r, alpha) - highbits(r, alpha)) % m
    assert set(np.unique(diff)) <= {0, 1, m - 1}


def test_chknorm():
    zero = np.zeros(256, dtype=np.int64)
    assert not chknorm(zero, 1)
    one = zero.copy()
    one[0] = Q - 1
    assert chknorm(one, 1)
    with pytest.raises(ParameterError):
        chknorm(zero, (Q - 1) // 8 + 1)


@given(st.lists(st.integers(-Q + 1, Q - 1), min_size=1, max_size=256),
       st.integers(1, (Q - 1) // 8))
def test_chknorm_against_max_abs(coeffs, bound):
    oracle = max(abs(centered(c)) for c in coeffs) >= bound
    assert bool(chknorm(np.array(coeffs), bound)) == oracle
    assert infinity_norm(np.array(coeffs)) == max(abs(centered(c)) for c in coeffs)


def test_hint_weight():
    h = np.zeros((4, 256), dtype=np.int64)
    assert hint_weight(h) == 0
    h[2, 17] = 1
    assert hint_weight(h) == 1
    rng = np.random.default_rng(0)
    h = rng.integers(0, 2, (6, 256))
    assert hint_weight(h) == sum(int(x) for x in h.reshape(-1))
