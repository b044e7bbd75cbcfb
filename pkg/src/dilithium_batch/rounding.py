"""Bit decomposition, hints and infinity-norm checks.

All functions are elementwise over int64 arrays (or Python ints) and
branch-free in the coefficient values; ``alpha`` is ``2 * gamma2`` and must
be one of the two values the parameter sets use.
"""

from __future__ import annotations

import numba
import numpy as np

from .params import D, Q
from .ring import reduce_centered

ALPHA_88 = 2 * ((Q - 1) // 88)   # level 2
ALPHA_32 = 2 * ((Q - 1) // 32)   # levels 3 and 5


class ParameterError(ValueError):
    pass


def power2round(a, d: int = D):
    """Split a in [0, q) as a1 * 2^d + a0 with a0 in (-2^(d-1), 2^(d-1)]."""
    a1 = (a + (1 << (d - 1)) - 1) >> d
    a0 = a - (a1 << d)
    return a1, a0


def _decompose(r, alpha):
    r1 = (r + 127) >> 7
    if alpha == ALPHA_32:
        r1 = ((r1 * 1025 + (1 << 21)) >> 22) & 15
    elif alpha == ALPHA_88:
        r1 = (r1 * 11275 + (1 << 23)) >> 24
        r1 ^= ((43 - r1) >> 31) & r1
    r0 = r - r1 * alpha
    r0 -= (((Q - 1) // 2 - r0) >> 31) & Q
    return r1, r0


_decompose_jit = numba.njit(cache=True, nogil=True)(_decompose)


@numba.njit(cache=True, nogil=True)
def _decompose_array(r, alpha, hi, lo):
    for i in range(r.size):
        hi[i], lo[i] = _decompose_jit(r[i], alpha)


def decompose(r, alpha: int):
    """High/low split of r in [0, q) with respect to ``alpha``.

    Returns (r1, r0) with r = r1 * alpha + r0 (mod q), r0 in (-alpha/2, alpha/2],
    except when r - r0 = q - 1, where the pair becomes (0, r0 - 1).
    """
    if alpha not in (ALPHA_32, ALPHA_88):
        raise ParameterError(f"unsupported alpha {alpha}")
    if isinstance(r, np.ndarray):
        flat = np.ascontiguousarray(r, dtype=np.int64).reshape(-1)
        hi, lo = np.empty_like(flat), np.empty_like(flat)
        _decompose_array(flat, alpha, hi, lo)
        return hi.reshape(r.shape), lo.reshape(r.shape)
    return _decompose(r, alpha)


def highbits(r, alpha: int):
    return decompose(r, alpha)[0]


def lowbits(r, alpha: int):
    return decompose(r, alpha)[1]


def make_hint(z, r, alpha: int):
    """1 where adding z to r changes the high bits; inputs canonical in [0, q)."""
    s = r + z
    s = s - Q * (s >= Q)
    changed = highbits(r, alpha) != highbits(s, alpha)
    return changed.astype(np.int64) if isinstance(changed, np.ndarray) else int(changed)


def use_hint(h, r, alpha: int):
    """Recover highbits(r + z) from r and the hint bit; r canonical in [0, q)."""
    m = (Q - 1) // alpha
    r1, r0 = decompose(r, alpha)
    step = np.where(r0 > 0, 1, -1) if isinstance(r0, np.ndarray) else (1 if r0 > 0 else -1)
    return (r1 + h * step) % m


def chknorm(f, bound: int) -> bool:
    """True (reject) iff some centered coefficient has absolute value >= bound."""
    if bound > (Q - 1) // 8:
        raise ParameterError(f"norm bound {bound} exceeds (q-1)/8")
    return _exceeds(np.ascontiguousarray(f, dtype=np.int64).reshape(-1), bound)


@numba.njit(cache=True, nogil=True)
def _exceeds(f, bound):
    # scans every coefficient; the verdict alone is data dependent
    hit = False
    for i in range(f.size):
        x = f[i] % Q
        x = x - Q * (x > (Q - 1) // 2)
        hit |= abs(x) >= bound
    return hit


def infinity_norm(f) -> int:
    return int(np.max(np.abs(reduce_centered(np.asarray(f))), initial=0))


def hint_weight(h) -> int:
    return int(np.count_nonzero(np.asarray(h)))
