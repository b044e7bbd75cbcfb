"""Key generation, signing and verification.

Signing is split into :func:`sign_attempt`, one pass of the rejection loop at
a given nonce, and :func:`sign`, which walks nonces 0, l, 2l, ... until an
attempt is accepted. The batch engine drives :func:`sign_attempt` directly.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import codec
from .keccak import hash_h
from .params import CRHBYTES, N, SEEDBYTES, TRBYTES, Params, get_params
from .ring import (
    column_accumulate,
    freeze,
    intt_tomont_rows,
    matvec_rowmajor,
    mul_intt_tomont_row,
    ntt_rows,
    reduce_centered,
    scale_accumulate,
)
from .rounding import chknorm, decompose, hint_weight, lowbits, make_hint, power2round, use_hint
from .sample import expand_a_columns, expand_a_matrix, expand_mask_vec, expand_secrets, sample_in_ball


class RejectStage(Enum):
    Z_NORM = "z_norm"
    R0_NORM = "r0_norm"
    VT_NORM = "vt_norm"
    HINT_WEIGHT = "hint_weight"


@dataclass(frozen=True)
class AttemptResult:
    kappa: int
    stage: RejectStage | None = None
    c_tilde: bytes | None = None
    z: np.ndarray | None = None
    h: np.ndarray | None = None

    @property
    def accepted(self) -> bool:
        return self.stage is None

    def pack(self, params: Params, into=None):
        if not self.accepted:
            raise ValueError("rejected attempt has no signature")
        return codec.pack_sig(self.c_tilde, self.z, self.h, params, into=into)


@dataclass(frozen=True)
class SignPrecomp:
    """Per-key signing state, immutable and shareable across workers."""

    params: Params
    rho: bytes
    key: bytes
    tr: bytes
    s1_hat: np.ndarray
    s2_hat: np.ndarray
    t0_hat: np.ndarray
    mat: np.ndarray  # cached A_hat, (k, l, 256)

    @classmethod
    def from_secret_key(cls, sk: bytes, params: Params | int) -> SignPrecomp:
        params = get_params(params)
        rho, key, tr, s1, s2, t0 = codec.unpack_sk(sk, params)
        s1_hat, s2_hat, t0_hat = s1.copy(), s2.copy(), t0.copy()
        for v in (s1_hat, s2_hat, t0_hat):
            ntt_rows(v)
            v.setflags(write=False)
        mat = expand_a_matrix(rho, params)
        mat.setflags(write=False)
        return cls(params, rho, key, tr, s1_hat, s2_hat, t0_hat, mat)

    def message_digest(self, msg: bytes) -> bytes:
        return hash_h([self.tr, msg], CRHBYTES)

    def mask_seed(self, mu: bytes) -> bytes:
        return hash_h([self.key, mu], CRHBYTES)


def keygen(zeta: bytes | None = None, params: Params | int = 2) -> tuple[bytes, bytes]:
    """Return packed (pk, sk). ``zeta`` fixes the seed; default draws from os.urandom."""
    p = get_params(params)
    if zeta is None:
        zeta = os.urandom(SEEDBYTES)
    if len(zeta) != SEEDBYTES:
        raise ValueError(f"zeta must be {SEEDBYTES} bytes")
    seeds = hash_h([zeta], 2 * SEEDBYTES + CRHBYTES)
    rho, rho_prime, key = seeds[:32], seeds[32:96], seeds[96:]

    s1, s2 = expand_secrets(rho_prime, p)
    s1_hat = s1.coeffs.copy()
    ntt_rows(s1_hat)
    # A_hat generated and consumed one column at a time
    acc = np.zeros((p.k, N), dtype=np.int64)
    for j, col in enumerate(expand_a_columns(rho, p)):
        column_accumulate(acc, col, s1_hat[j])
    t = reduce_centered(acc)
    intt_tomont_rows(t)
    t = freeze(t + s2.coeffs)
    t1, t0 = power2round(t)

    pk = codec.pack_pk(rho, t1)
    tr = hash_h([pk], TRBYTES)
    sk = codec.pack_sk(rho, key, tr, s1.coeffs, s2.coeffs, t0, p)
    return pk, sk


def _product(c_hat: np.ndarray, b_hat: np.ndarray) -> np.ndarray:
    out = np.empty(N, dtype=np.int64)
    mul_intt_tomont_row(c_hat, b_hat, out)
    return out


def sign_attempt(pre: SignPrecomp, mu: bytes, rho_prime: bytes, kappa: int) -> AttemptResult:
    """One pass of the rejection loop using mask nonces kappa .. kappa + l - 1.

    Each check runs polynomial by polynomial and returns at the first
    violation, in the order z, low bits of w - cs2, ct0, hint weight.
    """
    p = pre.params
    alpha = p.alpha
    y = expand_mask_vec(rho_prime, kappa, p).coeffs
    y_hat = y.copy()
    ntt_rows(y_hat)
    w = np.empty((p.k, N), dtype=np.int64)
    matvec_rowmajor(pre.mat, y_hat, w)
    intt_tomont_rows(w)
    w = freeze(w)
    w1 = decompose(w, alpha)[0]
    c_tilde = hash_h([mu, codec.pack_w1(w1, p)], SEEDBYTES)
    c_hat = sample_in_ball(c_tilde, p.tau).coeffs
    ntt_rows(c_hat.reshape(1, N))

    z = np.empty((p.l, N), dtype=np.int64)
    z_bound = p.gamma1 - p.beta
    for j in range(p.l):
        z[j] = reduce_centered(y[j] + _product(c_hat, pre.s1_hat[j]))
        if chknorm(z[j], z_bound):
            return AttemptResult(kappa, RejectStage.Z_NORM)

    r = np.empty((p.k, N), dtype=np.int64)  # w - c*s2, canonical
    for i in range(p.k):
        r[i] = freeze(w[i] - _product(c_hat, pre.s2_hat[i]))
        if chknorm(lowbits(r[i], alpha), p.gamma2 - p.beta):
            return AttemptResult(kappa, RejectStage.R0_NORM)

    vt = np.empty((p.k, N), dtype=np.int64)
    for i in range(p.k):
        vt[i] = reduce_centered(_product(c_hat, pre.t0_hat[i]))
        if chknorm(vt[i], p.gamma2):
            return AttemptResult(kappa, RejectStage.VT_NORM)

    h = np.empty((p.k, N), dtype=np.int64)
    weight = 0
    for i in range(p.k):
        h[i] = make_hint(freeze(-vt[i]), freeze(r[i] + vt[i]), alpha)
        weight += hint_weight(h[i])
        if weight > p.omega:
            return AttemptResult(kappa, RejectStage.HINT_WEIGHT)

    return AttemptResult(kappa, None, c_tilde, z, h)


def sign_loop(pre: SignPrecomp, msg: bytes, rho_prime: bytes | None = None,
              max_attempts: int = 1 << 16) -> tuple[AttemptResult, int]:
    """Run attempts at kappa = 0, l, 2l, ... and return (accepted result, attempts)."""
    mu = pre.message_digest(msg)
    if rho_prime is None:
        rho_prime = pre.mask_seed(mu)
    ell = pre.params.l
    for n in range(max_attempts):
        res = sign_attempt(pre, mu, rho_prime, n * ell)
        if res.accepted:
            return res, n + 1
    raise RuntimeError(f"no acceptable signature within {max_attempts} attempts")


def sign(sk: bytes, msg: bytes, params: Params | int = 2, *,
         precomp: SignPrecomp | None = None, randomized: bool = False) -> bytes:
    """Sign ``msg``. Deterministic unless ``randomized`` draws a fresh mask seed."""
    pre = precomp or SignPrecomp.from_secret_key(sk, params)
    rho_prime = os.urandom(CRHBYTES) if randomized else None
    res, _ = sign_loop(pre, msg, rho_prime)
    return res.pack(pre.params)


def verify(pk: bytes, msg: bytes, sig: bytes, params: Params | int = 2) -> bool:
    """Accept or reject; any malformed input rejects."""
    p = get_params(params)
    try:
        rho, t1 = codec.unpack_pk(pk, p)
        c_tilde, z, h = codec.unpack_sig(sig, p)
    except codec.DecodeError:
        return False
    if hint_weight(h) > p.omega or chknorm(z, p.gamma1 - p.beta):
        return False

    mu = hash_h([hash_h([pk], TRBYTES), msg], CRHBYTES)
    c_hat = sample_in_ball(c_tilde, p.tau).coeffs
    ntt_rows(c_hat.reshape(1, N))

    acc = np.zeros((p.k, N), dtype=np.int64)
    z_hat = np.empty((1, N), dtype=np.int64)
    for j, col in enumerate(expand_a_columns(rho, p)):
        z_hat[0] = z[j]
        ntt_rows(z_hat)
        column_accumulate(acc, col, z_hat[0])
    t1_hat = np.asarray(t1, dtype=np.int64) << p.d
    ntt_rows(t1_hat)
    scale_accumulate(acc, -c_hat, t1_hat)
    w = reduce_centered(acc)
    intt_tomont_rows(w)
    w1 = use_hint(h, freeze(w), p.alpha)
    return hash_h([mu, codec.pack_w1(w1, p)], SEEDBYTES) == c_tilde

