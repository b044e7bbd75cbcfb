"""Seed expansion: uniform matrix, bounded secrets, masks and challenges.

Every sampler is a deterministic function of its seed. The uniform sampler
is built on :func:`rej_uniform`, the sequential form of the order-preserving
rejection compactor; :func:`rej_compact_ballot` is the lane-parallel
(ballot + prefix count) form of the same operation.
"""

from __future__ import annotations

from collections.abc import Callable, Iterator, MutableSequence, Sequence

import numba
import numpy as np

from .keccak import SHAKE128_RATE, SHAKE256_RATE, squeeze_block, xof_start
from .params import N, Q, Params
from .ring import Domain, Poly, PolyVec

_jit = numba.njit(cache=True, nogil=True)


def rej_compact(candidates: Sequence[int], accept: Callable[[int], bool],
                out: MutableSequence[int], ctr: int, cap: int = N) -> int:
    """Append accepted candidates to ``out[ctr:]`` in order, stopping at ``cap``."""
    assert 0 <= ctr <= cap
    for t in candidates:
        if ctr >= cap:
            break
        if accept(t):
            out[ctr] = t
            ctr += 1
    return ctr


def rej_compact_ballot(candidates: np.ndarray, bound: int, out: np.ndarray,
                       ctr: int, cap: int = N, width: int = 32) -> int:
    """Lane-parallel compaction of ``candidates < bound``.

    Candidates are consumed ``width`` at a time. A round where every lane
    accepts is a straight copy; otherwise each accepting lane writes to
    ``ctr + (inclusive count of accepting lanes up to itself) - 1`` and the
    counter advances by the round's total. Writes past ``cap`` are dropped.
    """
    candidates = np.asarray(candidates, dtype=np.int64)
    for start in range(0, len(candidates), width):
        if ctr >= cap:
            break
        lanes = candidates[start:start + width]
        ok = lanes < bound
        if ok.all():
            take = min(len(lanes), cap - ctr)
            out[ctr:ctr + take] = lanes[:take]
            ctr += take
            continue
        offset = np.cumsum(ok)
        dest = ctr + offset - 1
        keep = ok & (ctr + offset <= cap)
        out[dest[keep]] = lanes[keep]
        ctr = min(ctr + int(offset[-1]), cap)
    return ctr


@_jit
def rej_uniform(out, ctr, cap, buf, buflen):
    """Sequential compactor over 3-byte little-endian candidates masked to 23 bits."""
    pos = 0
    while ctr < cap and pos + 3 <= buflen:
        t = (np.int64(buf[pos]) | (np.int64(buf[pos + 1]) << 8)
             | ((np.int64(buf[pos + 2]) & 0x7F) << 16))
        pos += 3
        if t < Q:
            out[ctr] = t
            ctr += 1
    return ctr


@_jit
def _rej_eta(out, ctr, cap, buf, buflen, eta):
    pos = 0
    while ctr < cap and pos < buflen:
        t0 = np.int64(buf[pos] & 0x0F)
        t1 = np.int64(buf[pos] >> 4)
        pos += 1
        if eta == 2:
            if t0 < 15:
                t0 = t0 - ((205 * t0) >> 10) * 5
                out[ctr] = 2 - t0
                ctr += 1
            if t1 < 15 and ctr < cap:
                t1 = t1 - ((205 * t1) >> 10) * 5
                out[ctr] = 2 - t1
                ctr += 1
        else:
            if t0 < 9:
                out[ctr] = 4 - t0
                ctr += 1
            if t1 < 9 and ctr < cap:
                out[ctr] = 4 - t1
                ctr += 1
    return ctr


@_jit
def _seed_with_nonce(seed, nonce):
    buf = np.empty(seed.shape[0] + 2, dtype=np.uint8)
    buf[:seed.shape[0]] = seed
    buf[seed.shape[0]] = nonce & 0xFF
    buf[seed.shape[0] + 1] = (nonce >> 8) & 0xFF
    return buf


@_jit
def _expand_a_into(rho, nonce, out):
    state = np.zeros(25, dtype=np.uint64)
    xof_start(state, SHAKE128_RATE, _seed_with_nonce(rho, nonce))
    block = np.empty(SHAKE128_RATE, dtype=np.uint8)
    ctr = 0
    while ctr < N:
        squeeze_block(state, SHAKE128_RATE, block)
        ctr = rej_uniform(out, ctr, N, block, SHAKE128_RATE)


@_jit
def expand_a_matrix_kernel(rho, k, ell, out):
    for i in range(k):
        for j in range(ell):
            _expand_a_into(rho, (i << 8) | j, out[i, j])


@_jit
def expand_a_column_kernel(rho, j, k, out):
    for i in range(k):
        _expand_a_into(rho, (i << 8) | j, out[i])


@_jit
def _expand_s_into(seed, nonce, eta, out):
    state = np.zeros(25, dtype=np.uint64)
    xof_start(state, SHAKE256_RATE, _seed_with_nonce(seed, nonce))
    block = np.empty(SHAKE256_RATE, dtype=np.uint8)
    ctr = 0
    while ctr < N:
        squeeze_block(state, SHAKE256_RATE, block)
        ctr = _rej_eta(out, ctr, N, block, SHAKE256_RATE, eta)


@_jit
def expand_s_kernel(seed, first_nonce, eta, out):
    for i in range(out.shape[0]):
        _expand_s_into(seed, first_nonce + i, eta, out[i])


@_jit
def _unpack_offset(buf, bits, offset, out):
    """out[i] = offset - (i-th little-endian ``bits``-wide field of buf)."""
    mask = (1 << bits) - 1
    acc = np.int64(0)
    have = 0
    pos = 0
    for i in range(out.shape[0]):
        while have < bits:
            acc |= np.int64(buf[pos]) << have
            pos += 1
            have += 8
        out[i] = offset - (acc & mask)
        acc >>= bits
        have -= bits


@_jit
def expand_mask_kernel(seed, first_nonce, gamma1, bits, out):
    nbytes = N * bits // 8
    nblocks = (nbytes + SHAKE256_RATE - 1) // SHAKE256_RATE
    buf = np.empty(nblocks * SHAKE256_RATE, dtype=np.uint8)
    state = np.zeros(25, dtype=np.uint64)
    for i in range(out.shape[0]):
        xof_start(state, SHAKE256_RATE, _seed_with_nonce(seed, first_nonce + i))
        for b in range(nblocks):
            squeeze_block(state, SHAKE256_RATE,
                          buf[b * SHAKE256_RATE:(b + 1) * SHAKE256_RATE])
        _unpack_offset(buf, bits, gamma1, out[i])


@_jit
def sample_in_ball_kernel(seed, tau, out):
    state = np.zeros(25, dtype=np.uint64)
    xof_start(state, SHAKE256_RATE, seed)
    block = np.empty(SHAKE256_RATE, dtype=np.uint8)
    squeeze_block(state, SHAKE256_RATE, block)
    signs = np.uint64(0)
    for i in range(8):
        signs |= np.uint64(block[i]) << np.uint64(8 * i)
    pos = 8
    out[:] = 0
    for i in range(N - tau, N):
        while True:
            if pos >= SHAKE256_RATE:
                squeeze_block(state, SHAKE256_RATE, block)
                pos = 0
            b = np.int64(block[pos])
            pos += 1
            if b <= i:
                break
        out[i] = out[b]
        out[b] = 1 - 2 * np.int64(signs & np.uint64(1))
        signs >>= np.uint64(1)


def _u8(data) -> np.ndarray:
    return np.frombuffer(bytes(data), dtype=np.uint8)


def expand_a(rho: bytes, i: int, j: int) -> Poly:
    """Entry (i, j) of the public matrix, uniform in [0, q), NTT domain by definition."""
    out = np.empty(N, dtype=np.int64)
    _expand_a_into(_u8(rho), (i << 8) | j, out)
    return Poly(out, Domain.NTT)


def expand_a_matrix(rho: bytes, params: Params) -> np.ndarray:
    """The full k x l matrix as int64[k, l, 256]."""
    out = np.empty((params.k, params.l, N), dtype=np.int64)
    expand_a_matrix_kernel(_u8(rho), params.k, params.l, out)
    return out


def expand_a_columns(rho: bytes, params: Params) -> Iterator[np.ndarray]:
    """Yield the matrix one column at a time as int64[k, 256] (never the whole matrix)."""
    seed = _u8(rho)
    col = np.empty((params.k, N), dtype=np.int64)
    for j in range(params.l):
        expand_a_column_kernel(seed, j, params.k, col)
        yield col


def iter_matrix_entries(rho: bytes, params: Params, order: str = "column") -> Iterator[Poly]:
    """Matrix entries one polynomial at a time, in row- or column-major order."""
    if order == "row":
        idx = ((i, j) for i in range(params.k) for j in range(params.l))
    elif order == "column":
        idx = ((i, j) for j in range(params.l) for i in range(params.k))
    else:
        raise ValueError(f"order must be 'row' or 'column', got {order!r}")
    seed = _u8(rho)
    for i, j in idx:
        out = np.empty(N, dtype=np.int64)
        _expand_a_into(seed, (i << 8) | j, out)
        yield Poly(out, Domain.NTT)


def expand_s(rho_prime: bytes, nonce: int, eta: int) -> Poly:
    """Secret polynomial with coefficients in [-eta, eta]."""
    out = np.empty((1, N), dtype=np.int64)
    expand_s_kernel(_u8(rho_prime), nonce, eta, out)
    return Poly(out[0])


def expand_secrets(rho_prime: bytes, params: Params) -> tuple[PolyVec, PolyVec]:
    """(s1, s2) with nonces 0..l-1 and l..l+k-1."""
    seed = _u8(rho_prime)
    s1 = np.empty((params.l, N), dtype=np.int64)
    s2 = np.empty((params.k, N), dtype=np.int64)
    expand_s_kernel(seed, 0, params.eta, s1)
    expand_s_kernel(seed, params.l, params.eta, s2)
    return PolyVec(s1), PolyVec(s2)


def expand_mask(rho_prime: bytes, nonce: int, gamma1: int) -> Poly:
    """Mask polynomial with coefficients in [-gamma1 + 1, gamma1]."""
    out = np.empty((1, N), dtype=np.int64)
    bits = 18 if gamma1 == 1 << 17 else 20
    expand_mask_kernel(_u8(rho_prime), nonce, gamma1, bits, out)
    return Poly(out[0])


def expand_mask_vec(rho_prime: bytes, kappa: int, params: Params) -> PolyVec:
    """Mask vector y for the attempt starting at nonce ``kappa`` (nonces kappa..kappa+l-1)."""
    out = np.empty((params.l, N), dtype=np.int64)
    expand_mask_kernel(_u8(rho_prime), kappa, params.gamma1, params.z_bits, out)
    return PolyVec(out)


def sample_in_ball(c_tilde: bytes, tau: int) -> Poly:
    """Challenge with exactly ``tau`` coefficients in {-1, +1}, the rest zero."""
    out = np.empty(N, dtype=np.int64)
    sample_in_ball_kernel(_u8(c_tilde), tau, out)
    return Poly(out)
