"""Arithmetic in Z_q and R_q = Z_q[X]/(X^256 + 1).

Coefficients are stored as int64 so lazily reduced intermediates never
overflow; kernels operate on 2-D ``(npolys, 256)`` arrays in place.

Lazy bounds, for inputs reduced to (-q, q):

* ``ntt`` output: |x| < 9q
* ``intt`` / ``intt_tomont`` input: |x| <= q/2 (the wrappers reduce first);
  output: |x| < q
* ``pointwise_mont`` output: |x| < q
* ``poly_add`` / ``poly_sub``: bounds add; reduce before a transform.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from enum import Enum

import numba
import numpy as np

from .params import D, N, Q

MONT_R_BITS = 32
MONT_R = 1 << MONT_R_BITS
QINV = 58728449  # q^-1 mod 2^32
HALF_Q = (Q - 1) // 2
BARRETT_SHIFT = 48
BARRETT_V = (1 << BARRETT_SHIFT) // Q
MONT_ONE = MONT_R % Q  # Montgomery form of 1


def _egcd_inverse(a: int, m: int) -> int:
    old_r, r = a % m, m
    old_s, s = 1, 0
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
    if old_r != 1:
        raise ArithmeticError(f"{a} is not invertible mod {m}")
    return old_s % m


assert _egcd_inverse(Q, MONT_R) == QINV
assert (Q * QINV) % MONT_R == 1


def find_root_of_unity(q: int = Q, order: int = 2 * N) -> int:
    """Smallest g with g^(order/2) == -1 mod q, i.e. a primitive order-th root."""
    for g in range(2, q):
        if pow(g, order // 2, q) == q - 1:
            return g
    raise ArithmeticError("no primitive root found")


ROOT_OF_UNITY = 1753


def _bitrev8(i: int) -> int:
    return int(f"{i:08b}"[::-1], 2)


def _centered(x: int) -> int:
    x %= Q
    return x - Q if x > HALF_Q else x


def _build_zetas(root: int) -> np.ndarray:
    """Montgomery-form twiddles ``R * root^brv(i)`` in bit-reversed order."""
    return np.array([_centered(MONT_R * pow(root, _bitrev8(i), Q))
                     for i in range(N)], dtype=np.int64)


ZETAS = _build_zetas(ROOT_OF_UNITY)
ZETAS.setflags(write=False)

# n^-1 folded into the last inverse level; both constants carry one factor of R
# to survive the Montgomery reduction they feed.
INV_N_MONT = _centered(_egcd_inverse(N, Q) * MONT_R)           # intt
INV_N_MONT2 = _centered(_egcd_inverse(N, Q) * MONT_R * MONT_R)  # intt_tomont
_LAST_ZETA = -int(ZETAS[1])
LAST_ZETA_INV_N = _centered(INV_N_MONT * _LAST_ZETA * _egcd_inverse(MONT_R, Q))
LAST_ZETA_INV_N2 = _centered(INV_N_MONT2 * _LAST_ZETA * _egcd_inverse(MONT_R, Q))

_jit = numba.njit(cache=True, nogil=True)


def mont_reduce(a):
    """Montgomery reduction: a * 2^-32 mod q with |result| < q.

    The bound holds for -2^31 q <= a < 2^31 q. Works elementwise on int64
    arrays and on Python ints.
    """
    t = (((a * QINV) & 0xFFFFFFFF) ^ 0x80000000) - 0x80000000
    return (a - t * Q) >> MONT_R_BITS


def _barrett_centered(a):
    x = a + HALF_Q
    r = x - ((x * BARRETT_V) >> BARRETT_SHIFT) * Q
    r = r + Q * (r < 0)
    r = r - Q * (r >= Q)
    return r - HALF_Q


_barrett_centered_jit = numba.njit(cache=True, nogil=True)(_barrett_centered)


@numba.njit(cache=True, nogil=True)
def _reduce_centered_array(a, out):
    for i in range(a.size):
        out[i] = _barrett_centered_jit(a[i])


def reduce_centered(a):
    """Barrett-style reduction to the centered range [-(q-1)/2, (q-1)/2].

    Inputs must satisfy |a| < 2^31.
    """
    if isinstance(a, np.ndarray):
        flat = np.ascontiguousarray(a, dtype=np.int64).reshape(-1)
        out = np.empty_like(flat)
        _reduce_centered_array(flat, out)
        return out.reshape(np.shape(a))
    return _barrett_centered(a)


def caddq(a):
    """Map (-q, q) to [0, q) by adding q to negatives."""
    return a + ((a >> 63) & Q) if isinstance(a, np.ndarray) else a + Q * (a < 0)


def freeze(a):
    """Canonical representative in [0, q) for any int64 input."""
    return np.mod(a, Q) if isinstance(a, np.ndarray) else a % Q


mont_reduce_jit = _jit(mont_reduce)


@_jit
def _reduce32(a):
    t = (a + (1 << 22)) >> 23
    return a - t * Q


@_jit
def ntt_rows(a):
    """Forward NTT of every row of ``a`` (int64[npolys, 256]) in place.

    Output is in bit-reversed order, matching the order ``expand_a`` samples.
    """
    for row in range(a.shape[0]):
        p = a[row]
        k = 0
        length = 128
        while length > 0:
            start = 0
            while start < N:
                k += 1
                zeta = ZETAS[k]
                for j in range(start, start + length):
                    t = mont_reduce_jit(zeta * p[j + length])
                    p[j + length] = p[j] - t
                    p[j] = p[j] + t
                start += 2 * length
            length >>= 1


@_jit
def _intt_rows(a, inv_n, last_zeta):
    for row in range(a.shape[0]):
        p = a[row]
        k = N
        length = 1
        while length < 128:
            start = 0
            while start < N:
                k -= 1
                zeta = -ZETAS[k]
                for j in range(start, start + length):
                    t = p[j]
                    p[j] = t + p[j + length]
                    p[j + length] = mont_reduce_jit(zeta * (t - p[j + length]))
                start += 2 * length
            length <<= 1
        # last level with the 1/n scaling fused into the twiddles
        for j in range(128):
            t = p[j]
            u = p[j + 128]
            p[j] = mont_reduce_jit(inv_n * (t + u))
            p[j + 128] = mont_reduce_jit(last_zeta * (t - u))


def intt_rows(a):
    """Exact inverse of :func:`ntt_rows`, in place."""
    _intt_rows(a, INV_N_MONT, LAST_ZETA_INV_N)


def intt_tomont_rows(a):
    """Inverse NTT times 2^32, undoing the 2^-32 left by :func:`pointwise_mont`."""
    _intt_rows(a, INV_N_MONT2, LAST_ZETA_INV_N2)


@_jit
def pointwise_mont_rows(a, b, out):
    for i in range(a.shape[0]):
        for j in range(N):
            out[i, j] = mont_reduce_jit(a[i, j] * b[i, j])


@_jit
def matvec_rowmajor(mat, v, out):
    """out[i] = sum_j mont(mat[i, j] * v[j]) for a materialized (k, l, 256) matrix."""
    for i in range(mat.shape[0]):
        for c in range(N):
            acc = 0
            for j in range(mat.shape[1]):
                acc += mont_reduce_jit(mat[i, j, c] * v[j, c])
            out[i, c] = _reduce32(acc)


@_jit
def scale_accumulate(acc, a, b):
    """acc[i] += mont(a * b[i]) with ``a`` a single polynomial."""
    for i in range(b.shape[0]):
        for c in range(N):
            acc[i, c] += mont_reduce_jit(a[c] * b[i, c])


@_jit
def column_accumulate(acc, col, vj):
    """acc[i] += mont(col[i] * vj) for one matrix column (k, 256)."""
    for i in range(col.shape[0]):
        for c in range(N):
            acc[i, c] += mont_reduce_jit(col[i, c] * vj[c])


class Domain(Enum):
    NORMAL = "normal"
    NTT = "ntt"


class StructuralError(ValueError):
    """Raised when a row supplier does not yield enough polynomials."""


@dataclass
class Poly:
    """One ring element; ``coeffs`` is int64[256]."""

    coeffs: np.ndarray
    domain: Domain = Domain.NORMAL

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.int64)
        assert self.coeffs.shape == (N,), self.coeffs.shape

    @classmethod
    def zero(cls, domain: Domain = Domain.NORMAL) -> Poly:
        return cls(np.zeros(N, dtype=np.int64), domain)

    def copy(self) -> Poly:
        return Poly(self.coeffs.copy(), self.domain)

    def canonical(self) -> np.ndarray:
        return freeze(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return (self.domain is other.domain
                and bool(np.array_equal(self.canonical(), other.canonical())))


@dataclass
class PolyVec:
    """A vector of ring elements sharing one domain; ``coeffs`` is (dim, 256)."""

    coeffs: np.ndarray
    domain: Domain = Domain.NORMAL

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.int64)
        assert self.coeffs.ndim == 2 and self.coeffs.shape[1] == N

    @classmethod
    def zero(cls, dim: int, domain: Domain = Domain.NORMAL) -> PolyVec:
        return cls(np.zeros((dim, N), dtype=np.int64), domain)

    @classmethod
    def from_polys(cls, polys: Iterable[Poly]) -> PolyVec:
        polys = list(polys)
        domains = {p.domain for p in polys}
        if len(domains) > 1:
            raise ValueError("polynomials live in different domains")
        return cls(np.stack([p.coeffs for p in polys]), domains.pop())

    def __len__(self) -> int:
        return self.coeffs.shape[0]

    def __getitem__(self, i: int) -> Poly:
        return Poly(self.coeffs[i], self.domain)

    def __iter__(self) -> Iterator[Poly]:
        return (self[i] for i in range(len(self)))

    def copy(self) -> PolyVec:
        return PolyVec(self.coeffs.copy(), self.domain)

    def canonical(self) -> np.ndarray:
        return freeze(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, PolyVec):
            return NotImplemented
        return (self.domain is other.domain
                and self.coeffs.shape == other.coeffs.shape
                and bool(np.array_equal(self.canonical(), other.canonical())))


def _rows(x: Poly | PolyVec) -> np.ndarray:
    return x.coeffs.reshape(-1, N)


def _like(x, coeffs, domain):
    return type(x)(coeffs.reshape(x.coeffs.shape), domain)


def ntt(f: Poly | PolyVec) -> Poly | PolyVec:
    assert f.domain is Domain.NORMAL, "ntt expects normal-domain input"
    out = _rows(f).copy()
    ntt_rows(out)
    return _like(f, out, Domain.NTT)


def intt(f: Poly | PolyVec) -> Poly | PolyVec:
    assert f.domain is Domain.NTT, "intt expects ntt-domain input"
    out = reduce_centered(_rows(f))
    intt_rows(out)
    return _like(f, out, Domain.NORMAL)


def intt_tomont(f: Poly | PolyVec) -> Poly | PolyVec:
    assert f.domain is Domain.NTT, "intt expects ntt-domain input"
    out = reduce_centered(_rows(f))
    intt_tomont_rows(out)
    return _like(f, out, Domain.NORMAL)


def pointwise_mont(a: Poly | PolyVec, b: Poly | PolyVec) -> Poly | PolyVec:
    assert a.domain is Domain.NTT and b.domain is Domain.NTT
    ra, rb = _rows(a), _rows(b)
    out = np.empty_like(ra)
    pointwise_mont_rows(ra, rb, out)
    return _like(a, out, Domain.NTT)


def poly_mul(f: Poly, g: Poly) -> Poly:
    """Negacyclic product f*g through the NTT, canonical in [0, q)."""
    prod = intt_tomont(pointwise_mont(ntt(f), ntt(g)))
    return Poly(freeze(prod.coeffs))


def poly_add(a, b):
    assert a.domain is b.domain
    return _like(a, a.coeffs + b.coeffs, a.domain)


def poly_sub(a, b):
    assert a.domain is b.domain
    return _like(a, a.coeffs - b.coeffs, a.domain)


def shiftl_d(a):
    """Multiply by 2^d (d = 13); used to lift t1 back to the scale of t."""
    return _like(a, a.coeffs << D, a.domain)


def matvec_accumulate(row_supplier: Iterable, v: PolyVec, acc: PolyVec,
                      order: str = "column") -> PolyVec:
    """Accumulate ``A_hat * v`` into ``acc`` from a stream of A_hat entries.

    ``row_supplier`` yields NTT-domain polynomials (``Poly`` or int64[256])
    in row-major order (A[0,0], A[0,1], ...) or column-major order
    (A[0,0], A[1,0], ...). Only one entry is held at a time. Result is in
    NTT domain, multiplied by 2^-32 as every Montgomery product is.
    """
    assert v.domain is Domain.NTT and acc.domain is Domain.NTT
    if order not in ("row", "column"):
        raise ValueError(f"order must be 'row' or 'column', got {order!r}")
    k, ell = len(acc), len(v)
    it = iter(row_supplier)
    out = acc.coeffs
    vc = v.coeffs
    for step in range(k * ell):
        try:
            entry = next(it)
        except StopIteration:
            raise StructuralError(
                f"matrix supplier exhausted after {step} of {k * ell} entries"
            ) from None
        a = entry.coeffs if isinstance(entry, Poly) else np.asarray(entry)
        if order == "row":
            i, j = divmod(step, ell)
        else:
            j, i = divmod(step, k)
        out[i] += mont_reduce(a * vc[j])
    out[:] = reduce_centered(out)
    return acc


@_jit
def mul_intt_tomont_row(a, b, out):
    """out = a * b in the normal domain for NTT-domain rows a, b (one fused pass)."""
    for j in range(N):
        out[j] = mont_reduce_jit(a[j] * b[j])
    _intt_rows(out.reshape(1, N), INV_N_MONT2, LAST_ZETA_INV_N2)
