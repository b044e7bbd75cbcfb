import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dilithium_batch.params import PARAMS, Q
from dilithium_batch.ring import (
    MONT_ONE,
    QINV,
    ROOT_OF_UNITY,
    ZETAS,
    Domain,
    Poly,
    PolyVec,
    StructuralError,
    caddq,
    find_root_of_unity,
    freeze,
    intt,
    intt_tomont,
    matvec_accumulate,
    mont_reduce,
    ntt,
    pointwise_mont,
    poly_add,
    poly_mul,
    poly_sub,
    reduce_centered,
    shiftl_d,
)
from oracles import centered, mont_ref, schoolbook

rng = np.random.default_rng(2024)


def rand_poly(domain=Domain.NORMAL, bound=Q):
    return Poly(rng.integers(-(bound - 1), bound, 256), domain)


# parameters

def test_parameter_table():
    expected = {
        2: (4, 4, 39, 2**17, 95232, 2, 78, 80),
        3: (6, 5, 49, 2**19, 261888, 4, 196, 55),
        5: (8, 7, 60, 2**19, 261888, 2, 120, 75),
    }
    for lvl, (k, l, tau, g1, g2, eta, beta, omega) in expected.items():
        p = PARAMS[lvl]
        assert (p.k, p.l, p.tau, p.gamma1, p.gamma2, p.eta, p.beta, p.omega) == \
            (k, l, tau, g1, g2, eta, beta, omega)
        assert p.beta == p.tau * p.eta
        assert (Q - 1) % (2 * p.gamma2) == 0
        assert (Q - 1) // (2 * p.gamma2) == (44 if lvl == 2 else 16)


def test_unknown_level():
    from dilithium_batch.params import get_params
    with pytest.raises(ValueError):
        get_params(4)


# constants

def test_montgomery_constants():
    assert (Q * QINV) % 2**32 == 1
    assert MONT_ONE == 2**32 % Q


def test_root_of_unity():
    assert find_root_of_unity() == ROOT_OF_UNITY == 1753
    assert pow(1753, 256, Q) == Q - 1
    assert pow(1753, 512, Q) == 1


def test_zeta_table():
    assert ZETAS[1] == 25847
    assert centered(ZETAS[1] * pow(2**32, -1, Q)) == centered(pow(1753, 128, Q))


# reductions

def test_mont_reduce_examples():
    assert mont_reduce(0) == 0
    assert mont_reduce(2**32) == 1


def test_mont_reduce_random_and_boundary():
    bound = 2**31 * Q
    samples = list(rng.integers(-bound, bound, 10**6, dtype=np.int64))
    samples += [-bound, bound - 1, -bound + 1, 1, -1, Q, -Q]
    a = np.array(samples, dtype=np.int64)
    out = mont_reduce(a)
    assert np.all(np.abs(out) < Q)
    inv_r = pow(2**32, -1, Q)
    assert np.all((out - (a % Q) * inv_r) % Q == 0)
    for x in samples[:2000]:
        assert mont_reduce(int(x)) % Q == mont_ref(int(x)) % Q


def test_mont_reduce_upper_endpoint():
    # the strict bound holds on [-2^31 q, 2^31 q); the closed endpoint lands on q itself
    assert mont_reduce(2**31 * Q) == Q


def test_reduce_centered_examples():
    assert reduce_centered(0) == 0
    assert reduce_centered(Q) == 0
    assert reduce_centered(Q - 1) == -1


def test_reduce_centered_matches_mod():
    a = rng.integers(-(2**31) + 1, 2**31, 10**6, dtype=np.int64)
    out = reduce_centered(a)
    expected = np.array([centered(int(x)) for x in a[:5000]])
    assert np.array_equal(out[:5000], expected)
    assert np.all((out - a) % Q == 0)
    assert np.all(np.abs(out) <= (Q - 1) // 2)


def test_caddq_and_freeze():
    assert caddq(-1) == Q - 1
    assert caddq(0) == 0
    assert caddq(Q - 1) == Q - 1
    a = rng.integers(-Q + 1, Q, 1000)
    assert np.array_equal(freeze(a), a % Q)


# transforms

def test_ntt_zero():
    z = Poly.zero()
    assert np.all(freeze(ntt(z).coeffs) == 0)
    assert np.all(freeze(intt(Poly.zero(Domain.NTT)).coeffs) == 0)


def test_ntt_matches_forward_formula():
    f = rand_poly()
    fhat = freeze(ntt(f).coeffs)
    # output slot of exponent brv: evaluations at psi^(2*brv(i)+1), in bit-reversed order
    evals = set()
    coeffs = [int(x) for x in f.coeffs]
    for j in range(256):
        x = pow(ROOT_OF_UNITY, 2 * j + 1, Q)
        evals.add(sum(c * pow(x, i, Q) for i, c in enumerate(coeffs)) % Q)
    assert set(int(v) for v in fhat) == evals


def test_roundtrip_many():
    a = rng.integers(-Q + 1, Q, (10**4, 256))
    v = PolyVec(a.copy(), Domain.NORMAL)
    assert np.array_equal(freeze(intt(ntt(v)).coeffs), freeze(a))
    fhat = PolyVec(rng.integers(-Q + 1, Q, (100, 256)), Domain.NTT)
    assert np.array_equal(freeze(ntt(intt(fhat)).coeffs), freeze(fhat.coeffs))


def test_product_matches_schoolbook():
    for _ in range(20):
        f, g = rand_poly(), rand_poly()
        assert list(poly_mul(f, g).coeffs) == schoolbook(f.coeffs, g.coeffs)


def test_product_small_operands():
    f = Poly(np.zeros(256, dtype=np.int64))
    f.coeffs[255] = 1
    g = Poly(np.zeros(256, dtype=np.int64))
    g.coeffs[1] = 1
    # X^255 * X = X^256 = -1
    prod = poly_mul(f, g).coeffs
    assert prod[0] == Q - 1 and np.count_nonzero(prod) == 1


def test_pointwise_mont():
    a = rand_poly(Domain.NTT)
    zero = Poly.zero(Domain.NTT)
    assert np.all(pointwise_mont(a, zero).coeffs == 0)
    one = Poly(np.full(256, MONT_ONE, dtype=np.int64), Domain.NTT)
    assert np.array_equal(freeze(pointwise_mont(a, one).coeffs), freeze(a.coeffs))
    b = rand_poly(Domain.NTT)
    out = pointwise_mont(a, b).coeffs
    for x, y, z in zip(a.coeffs[:64], b.coeffs[:64], out[:64]):
        assert z % Q == mont_ref(int(x) * int(y)) % Q


def test_intt_tomont_undoes_montgomery_factor():
    f, g = rand_poly(), rand_poly()
    plain = intt(pointwise_mont(ntt(f), ntt(g))).coeffs
    mont = intt_tomont(pointwise_mont(ntt(f), ntt(g))).coeffs
    assert np.array_equal(freeze(plain * 2**32 % Q), freeze(mont))


def test_domain_checks():
    with pytest.raises(AssertionError):
        ntt(Poly.zero(Domain.NTT))
    with pytest.raises(AssertionError):
        intt(Poly.zero())


def test_poly_shape_enforced():
    with pytest.raises((ValueError, AssertionError)):
        Poly(np.zeros(255, dtype=np.int64))


def test_add_sub_shift():
    a = rand_poly()
    assert poly_add(a, Poly.zero()) == a
    assert np.all(poly_sub(a, a).coeffs == 0)
    one = Poly(np.ones(256, dtype=np.int64))
    assert np.all(shiftl_d(one).coeffs == 8192)


# matrix-vector products

def _random_matrix(k, ell):
    return rng.integers(0, Q, (k, ell, 256))


@pytest.mark.parametrize("k,ell", [(1, 1), (2, 2), (4, 4), (6, 5)])
def test_matvec_orders_agree(k, ell):
    mat = _random_matrix(k, ell)
    v = PolyVec(rng.integers(-Q + 1, Q, (ell, 256)), Domain.NTT)
    row = matvec_accumulate((mat[i, j] for i in range(k) for j in range(ell)), v,
                            PolyVec.zero(k, Domain.NTT), "row")
    col = matvec_accumulate((mat[i, j] for j in range(ell) for i in range(k)), v,
                            PolyVec.zero(k, Domain.NTT), "column")
    assert row == col
    direct = sum(mont_reduce(mat[:, j] * v.coeffs[j]) for j in range(ell))
    assert np.array_equal(freeze(row.coeffs), freeze(direct))


def test_matvec_zero_vector():
    mat = _random_matrix(3, 2)
    acc = matvec_accumulate((mat[i, j] for j in range(2) for i in range(3)),
                            PolyVec.zero(2, Domain.NTT), PolyVec.zero(3, Domain.NTT))
    assert np.all(acc.coeffs == 0)


def test_matvec_one_by_one_is_pointwise():
    a = rand_poly(Domain.NTT)
    v = PolyVec(rng.integers(-Q + 1, Q, (1, 256)), Domain.NTT)
    acc = matvec_accumulate([a], v, PolyVec.zero(1, Domain.NTT))
    assert np.array_equal(freeze(acc.coeffs[0]),
                          freeze(pointwise_mont(a, v[0]).coeffs))


def test_matvec_2x2_against_schoolbook():
    # A * v through NTT equals schoolbook products summed, for a 2x2 instance
    a = [[rand_poly() for _ in range(2)] for _ in range(2)]
    v = [rand_poly() for _ in range(2)]
    a_hat = [[ntt(x).coeffs for x in row] for row in a]
    v_hat = PolyVec.from_polys(ntt(x) for x in v)
    acc = matvec_accumulate((a_hat[i][j] for j in range(2) for i in range(2)), v_hat,
                            PolyVec.zero(2, Domain.NTT))
    out = intt_tomont(acc)
    for i in range(2):
        expected = [(x + y) % Q for x, y in zip(schoolbook(a[i][0].coeffs, v[0].coeffs),
                                                  schoolbook(a[i][1].coeffs, v[1].coeffs))]
        assert list(freeze(out.coeffs[i])) == expected


def test_matvec_exhausted_supplier():
    v = PolyVec.zero(2, Domain.NTT)
    with pytest.raises(StructuralError):
        matvec_accumulate([np.zeros(256, dtype=np.int64)] * 3, v, PolyVec.zero(2, Domain.NTT))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-(2**31) + 1, 2**31 - 1), min_size=1, max_size=50))
def test_reduce_centered_property(xs):
    out = reduce_centered(np.array(xs, dtype=np.int64))
    assert [int(v) for v in out] == [centered(x) for x in xs]
