"""Key generation, signing and verification at all three security levels."""

# %%
from dilithium_batch import PARAMS, SignPrecomp, keygen, sign, sign_loop, verify

zeta = bytes(range(32))  # fixed seed so the output below is reproducible
msg = b"attack at dawn"

# %% Sizes follow from the parameter set; signing is deterministic by default.
for level, p in PARAMS.items():
    pk, sk = keygen(zeta, level)
    sig = sign(sk, msg, level)
    print(f"level {level}: k={p.k} l={p.l}  pk={len(pk)}B sk={len(sk)}B sig={len(sig)}B"
          f"  verify={verify(pk, msg, sig, level)}")

# %% Flip a single bit in either input and verification fails.
pk, sk = keygen(zeta, 3)
sig = bytearray(sign(sk, msg, 3))
sig[500] ^= 0x10
print("flipped signature bit ->", verify(pk, msg, bytes(sig), 3))
print("other message        ->", verify(pk, b"attack at dusk", sign(sk, msg, 3), 3))

# %% The signer rejects most candidates. A precomputation keeps the expanded
# matrix and the transformed secrets so repeated signatures skip that work.
pre = SignPrecomp.from_secret_key(sk, 3)
counts = [sign_loop(pre, f"message {i}".encode())[1] for i in range(400)]
print(f"mean attempts over 400 messages: {sum(counts) / len(counts):.2f}"
      f" (max {max(counts)})")
