"""Fast negacyclic multiplication against the quadratic definition."""

# %%
import time

import numpy as np

from dilithium_batch.params import Q
from dilithium_batch.ring import MONT_ONE, Domain, Poly, freeze, intt, ntt, poly_mul

rng = np.random.default_rng(0)
f = Poly(rng.integers(0, Q, 256))
g = Poly(rng.integers(0, Q, 256))


def schoolbook(a, b):
    out = [0] * 256
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            k = i + j
            if k < 256:
                out[k] += x * y
            else:  # X^256 = -1
                out[k - 256] -= x * y
    return [c % Q for c in out]


# %% Same answer, very different cost (the first call compiles the kernels).
poly_mul(f, g)
t = time.perf_counter()
slow = schoolbook(f.coeffs.tolist(), g.coeffs.tolist())
t_slow = time.perf_counter() - t
t = time.perf_counter()
fast = poly_mul(f, g).coeffs.tolist()
t_fast = time.perf_counter() - t
print("equal:", slow == fast, f" schoolbook {t_slow * 1e3:.1f} ms, transform {t_fast * 1e3:.3f} ms")

# %% The forward transform round-trips, and X^255 * X wraps to -1.
print("intt(ntt(f)) == f:", np.array_equal(freeze(intt(ntt(f)).coeffs), f.canonical()))
x255 = Poly(np.eye(256, dtype=np.int64)[255])
x1 = Poly(np.eye(256, dtype=np.int64)[1])
print("X^255 * X =", poly_mul(x255, x1).coeffs[0], "= q - 1")

# %% Montgomery form: 2^32 mod q is the representation of 1.
one_hat = ntt(Poly(np.eye(256, dtype=np.int64)[0]))
print("Montgomery one:", MONT_ONE, " ntt(1) is all ones:",
      one_hat.domain is Domain.NTT and set(freeze(one_hat.coeffs).tolist()) == {1})
