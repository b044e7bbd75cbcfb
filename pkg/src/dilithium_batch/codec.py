"""Round-3 wire formats for polynomials, keys and signatures.

All packings are little-endian bit streams of fixed-width fields. Signed
ranges are offset into non-negative fields first (t0 as 2^12 - a, secrets as
eta - a, z as gamma1 - a).
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .params import N, SEEDBYTES, TRBYTES, Params


class DecodeError(ValueError):
    """Malformed or non-canonical encoding."""


def pack_bits(values: np.ndarray, bits: int) -> bytes:
    v = np.asarray(values, dtype=np.int64).reshape(-1)
    if v.size and (v.min() < 0 or v.max() >= 1 << bits):
        raise ValueError(f"field value outside [0, 2^{bits})")
    planes = ((v[:, None] >> np.arange(bits)) & 1).astype(np.uint8)
    return np.packbits(planes.reshape(-1), bitorder="little").tobytes()


def unpack_bits(data, bits: int, count: int) -> np.ndarray:
    raw = np.frombuffer(bytes(data), dtype=np.uint8)
    if raw.size * 8 != bits * count:
        raise DecodeError(f"expected {bits * count // 8} bytes, got {raw.size}")
    planes = np.unpackbits(raw, bitorder="little").reshape(count, bits)
    return (planes.astype(np.int64) << np.arange(bits)).sum(axis=1)


def _polys(values, count: int) -> np.ndarray:
    return values.reshape(count // N, N) if count > N else values


def pack_t1(t1: np.ndarray) -> bytes:
    return pack_bits(t1, 10)


def unpack_t1(data, npolys: int = 1) -> np.ndarray:
    return _polys(unpack_bits(data, 10, npolys * N), npolys * N)


def pack_t0(t0: np.ndarray) -> bytes:
    return pack_bits((1 << 12) - np.asarray(t0), 13)


def unpack_t0(data, npolys: int = 1) -> np.ndarray:
    return _polys((1 << 12) - unpack_bits(data, 13, npolys * N), npolys * N)


def pack_eta(s: np.ndarray, eta: int) -> bytes:
    return pack_bits(eta - np.asarray(s), 3 if eta == 2 else 4)


def unpack_eta(data, eta: int, npolys: int = 1) -> np.ndarray:
    raw = unpack_bits(data, 3 if eta == 2 else 4, npolys * N)
    if raw.max(initial=0) > 2 * eta:
        raise DecodeError("secret coefficient outside [-eta, eta]")
    return _polys(eta - raw, npolys * N)


def pack_z(z: np.ndarray, gamma1: int) -> bytes:
    return pack_bits(gamma1 - np.asarray(z), 18 if gamma1 == 1 << 17 else 20)


def unpack_z(data, gamma1: int, npolys: int = 1) -> np.ndarray:
    raw = unpack_bits(data, 18 if gamma1 == 1 << 17 else 20, npolys * N)
    return _polys(gamma1 - raw, npolys * N)


def pack_w1(w1: np.ndarray, params: Params) -> bytes:
    return pack_bits(w1, params.w1_bits)


def unpack_w1(data, params: Params, npolys: int = 1) -> np.ndarray:
    raw = unpack_bits(data, params.w1_bits, npolys * N)
    if raw.max(initial=0) >= params.m:
        raise DecodeError("high-bits value outside [0, m)")
    return _polys(raw, npolys * N)


def encode_hint(h: np.ndarray, omega: int) -> bytes:
    """Positions of set bits poly by poly, zero padded to omega, then k cumulative counts."""
    h = np.asarray(h).reshape(-1, N)
    out = bytearray(omega + h.shape[0])
    idx = 0
    for i, row in enumerate(h):
        pos = np.flatnonzero(row)
        if idx + pos.size > omega:
            raise ValueError(f"hint weight exceeds omega={omega}")
        out[idx:idx + pos.size] = pos.astype(np.uint8).tobytes()
        idx += pos.size
        out[omega + i] = idx
    return bytes(out)


def decode_hint(data, k: int, omega: int) -> np.ndarray:
    """Strict inverse of :func:`encode_hint`; rejects every non-canonical encoding."""
    data = bytes(data)
    if len(data) != omega + k:
        raise DecodeError(f"hint must be {omega + k} bytes")
    h = np.zeros((k, N), dtype=np.int64)
    prev = 0
    for i in range(k):
        end = data[omega + i]
        if end < prev or end > omega:
            raise DecodeError("hint counts not monotone or exceed omega")
        for j in range(prev, end):
            if j > prev and data[j] <= data[j - 1]:
                raise DecodeError("hint positions not strictly ascending")
            h[i, data[j]] = 1
        prev = end
    if any(data[prev:omega]):
        raise DecodeError("nonzero hint padding")
    return h


class PublicKey(NamedTuple):
    rho: bytes
    t1: np.ndarray


class SecretKey(NamedTuple):
    rho: bytes
    key: bytes
    tr: bytes
    s1: np.ndarray
    s2: np.ndarray
    t0: np.ndarray


class Signature(NamedTuple):
    c_tilde: bytes
    z: np.ndarray
    h: np.ndarray


def _check_len(data, expected: int, what: str) -> bytes:
    data = bytes(data)
    if len(data) != expected:
        raise DecodeError(f"{what} must be {expected} bytes, got {len(data)}")
    return data


def pack_pk(rho: bytes, t1: np.ndarray) -> bytes:
    return bytes(rho) + pack_t1(t1)


def unpack_pk(data, params: Params) -> PublicKey:
    data = _check_len(data, params.pk_bytes, "public key")
    return PublicKey(data[:SEEDBYTES], unpack_t1(data[SEEDBYTES:], params.k))


def pack_sk(rho: bytes, key: bytes, tr: bytes, s1, s2, t0, params: Params) -> bytes:
    return b"".join([bytes(rho), bytes(key), bytes(tr),
                     pack_eta(s1, params.eta), pack_eta(s2, params.eta),
                     pack_t0(t0)])


def unpack_sk(data, params: Params) -> SecretKey:
    data = _check_len(data, params.sk_bytes, "secret key")
    eta_len = params.eta_bits * 32
    off = 2 * SEEDBYTES + TRBYTES
    s1_end = off + params.l * eta_len
    s2_end = s1_end + params.k * eta_len
    return SecretKey(
        data[:SEEDBYTES], data[SEEDBYTES:2 * SEEDBYTES], data[2 * SEEDBYTES:off],
        unpack_eta(data[off:s1_end], params.eta, params.l).reshape(params.l, N),
        unpack_eta(data[s1_end:s2_end], params.eta, params.k).reshape(params.k, N),
        unpack_t0(data[s2_end:], params.k).reshape(params.k, N),
    )


def pack_sig(c_tilde: bytes, z, h, params: Params, into=None) -> bytes | None:
    """Pack a signature; with ``into`` (a writable buffer of sig_bytes) write in place."""
    packed = (bytes(c_tilde) + pack_z(z, params.gamma1)
              + encode_hint(h, params.omega))
    if into is None:
        return packed
    view = memoryview(into).cast("B")
    if len(view) != params.sig_bytes:
        raise ValueError("destination slot has the wrong size")
    view[:] = packed
    return None


def unpack_sig(data, params: Params) -> Signature:
    data = _check_len(data, params.sig_bytes, "signature")
    z_end = SEEDBYTES + params.l * params.z_bits * 32
    return Signature(
        data[:SEEDBYTES],
        unpack_z(data[SEEDBYTES:z_end], params.gamma1, params.l).reshape(params.l, N),
        decode_hint(data[z_end:], params.k, params.omega),
    )
