"""Keccak-f[1600] and incremental SHAKE128/SHAKE256.

The permutation and the byte-level absorb/squeeze helpers are numba kernels
so the samplers in :mod:`dilithium_batch.sample` can drive a sponge without
leaving compiled code. :class:`XofStream` is the Python-facing wrapper.

Lanes are addressed as 64-bit words; byte ``p`` of the state lives in lane
``p // 8`` at bit offset ``8 * (p % 8)`` (little-endian, host independent).
"""

from __future__ import annotations

from enum import Enum

import numba
import numpy as np

SHAKE128_RATE = 168
SHAKE256_RATE = 136
SHAKE_PAD = 0x1F

ROUND_CONSTANTS = np.array([
    0x0000000000000001, 0x0000000000008082, 0x800000000000808A,
    0x8000000080008000, 0x000000000000808B, 0x0000000080000001,
    0x8000000080008081, 0x8000000000008009, 0x000000000000008A,
    0x0000000000000088, 0x0000000080008009, 0x000000008000000A,
    0x000000008000808B, 0x800000000000008B, 0x8000000000008089,
    0x8000000000008003, 0x8000000000008002, 0x8000000000000080,
    0x000000000000800A, 0x800000008000000A, 0x8000000080008081,
    0x8000000000008080, 0x0000000080000001, 0x8000000080008008,
], dtype=np.uint64)
ROUND_CONSTANTS.setflags(write=False)

# rotation offsets indexed by lane x + 5*y
RHO_OFFSETS = np.array([
    0, 1, 62, 28, 27,
    36, 44, 6, 55, 20,
    3, 10, 43, 25, 39,
    41, 45, 15, 21, 8,
    18, 2, 61, 56, 14,
], dtype=np.uint64)
RHO_OFFSETS.setflags(write=False)

# destination lane of pi for each source lane: (x, y) -> (y, 2x + 3y)
PI_DEST = np.array([
    y + 5 * ((2 * x + 3 * y) % 5)
    for y in range(5) for x in range(5)
], dtype=np.int64)
PI_DEST.setflags(write=False)

_jit = numba.njit(cache=True, nogil=True)


@_jit
def _rotl(x, n):
    if n == 0:
        return x
    return (x << n) | (x >> (np.uint64(64) - n))


@_jit
def keccak_f1600(state):
    """Apply the 24-round permutation to ``state`` (uint64[25]) in place."""
    c = np.empty(5, dtype=np.uint64)
    b = np.empty(25, dtype=np.uint64)
    for rnd in range(24):
        for x in range(5):
            c[x] = (state[x] ^ state[x + 5] ^ state[x + 10]
                    ^ state[x + 15] ^ state[x + 20])
        for x in range(5):
            dx = c[(x + 4) % 5] ^ _rotl(c[(x + 1) % 5], np.uint64(1))
            for y in range(0, 25, 5):
                state[x + y] ^= dx
        for i in range(25):
            b[PI_DEST[i]] = _rotl(state[i], RHO_OFFSETS[i])
        for y in range(0, 25, 5):
            for x in range(5):
                state[x + y] = b[x + y] ^ (~b[(x + 1) % 5 + y]
                                           & b[(x + 2) % 5 + y])
        state[0] ^= ROUND_CONSTANTS[rnd]


@_jit
def _xor_byte(state, pos, byte):
    state[pos >> 3] ^= np.uint64(byte) << np.uint64((pos & 7) << 3)


@_jit
def _get_byte(state, pos):
    return np.uint8((state[pos >> 3] >> np.uint64((pos & 7) << 3)) & np.uint64(0xFF))


@_jit
def absorb_bytes(state, pos, rate, data):
    """XOR ``data`` into the sponge starting at byte ``pos``; return new pos."""
    for i in range(data.shape[0]):
        _xor_byte(state, pos, data[i])
        pos += 1
        if pos == rate:
            keccak_f1600(state)
            pos = 0
    return pos


@_jit
def finalize_state(state, pos, rate):
    """Apply SHAKE padding (0x1F ... 0x80) and the final permutation."""
    _xor_byte(state, pos, SHAKE_PAD)
    _xor_byte(state, rate - 1, 0x80)
    keccak_f1600(state)


@_jit
def squeeze_bytes(state, pos, rate, out):
    """Fill ``out`` from the squeezing sponge starting at ``pos``; return new pos.

    ``pos == rate`` means the current block is exhausted.
    """
    for i in range(out.shape[0]):
        if pos == rate:
            keccak_f1600(state)
            pos = 0
        out[i] = _get_byte(state, pos)
        pos += 1
    return pos


@_jit
def squeeze_block(state, rate, out):
    """Copy one full rate block into ``out`` then permute for the next block."""
    for i in range(rate):
        out[i] = _get_byte(state, i)
    keccak_f1600(state)


@_jit
def xof_start(state, rate, seed):
    """Reset ``state``, absorb ``seed`` in one shot and finalize."""
    state[:] = 0
    pos = absorb_bytes(state, 0, rate, seed)
    finalize_state(state, pos, rate)


class Phase(Enum):
    ABSORBING = "absorbing"
    SQUEEZING = "squeezing"


class XofStateError(RuntimeError):
    """Raised on absorb after finalize."""


def _as_u8(data) -> np.ndarray:
    if isinstance(data, np.ndarray):
        return np.ascontiguousarray(data, dtype=np.uint8).reshape(-1)
    return np.frombuffer(bytes(data), dtype=np.uint8)


class XofStream:
    """Incremental SHAKE sponge.

    Absorb any number of chunks, then squeeze any number of times. Squeezing
    implicitly finalizes; absorbing after that raises :class:`XofStateError`.
    """

    __slots__ = ("rate", "state", "pos", "phase")

    def __init__(self, rate: int, data=b""):
        if rate not in (SHAKE128_RATE, SHAKE256_RATE):
            raise ValueError(f"unsupported rate {rate}")
        self.rate = rate
        self.state = np.zeros(25, dtype=np.uint64)
        self.pos = 0
        self.phase = Phase.ABSORBING
        if len(data):
            self.absorb(data)

    def absorb(self, data) -> XofStream:
        if self.phase is not Phase.ABSORBING:
            raise XofStateError("cannot absorb after finalize")
        buf = _as_u8(data)
        if buf.size:
            self.pos = absorb_bytes(self.state, self.pos, self.rate, buf)
        return self

    def finalize(self) -> XofStream:
        if self.phase is Phase.ABSORBING:
            finalize_state(self.state, self.pos, self.rate)
            self.pos = 0
            self.phase = Phase.SQUEEZING
        return self

    def squeeze(self, nbytes: int) -> bytes:
        return self.squeeze_into(np.empty(nbytes, dtype=np.uint8)).tobytes()

    def squeeze_into(self, out: np.ndarray) -> np.ndarray:
        self.finalize()
        self.pos = squeeze_bytes(self.state, self.pos, self.rate, out)
        return out

    def copy(self) -> XofStream:
        other = XofStream.__new__(XofStream)
        other.rate = self.rate
        other.state = self.state.copy()
        other.pos = self.pos
        other.phase = self.phase
        return other


def shake128(data=b"") -> XofStream:
    return XofStream(SHAKE128_RATE, data)


def shake256(data=b"") -> XofStream:
    return XofStream(SHAKE256_RATE, data)


def hash_h(parts, outlen: int) -> bytes:
    """SHAKE256 over the concatenation of ``parts``, truncated to ``outlen``."""
    xof = XofStream(SHAKE256_RATE)
    for part in parts:
        xof.absorb(part)
    return xof.squeeze(outlen)
