"""Batch signing with a memory pool, a worker pool and a round trace."""

# %%
import io

from dilithium_batch import SignPrecomp, keygen, sign
from dilithium_batch.batch import MemoryPool, batch_sign, batch_verify, write_trace

pk, sk = keygen(bytes(32), 2)
pre = SignPrecomp.from_secret_key(sk, 2)
msgs = [f"invoice #{i}".encode() for i in range(64)]

# %% The pool holds every per-task buffer up front; nothing is allocated per round.
pool = MemoryPool(2, len(msgs), max(map(len, msgs)), staging=16)
print(f"pool: {pool.nbytes / 1024:.0f} KiB in {len(pool.arenas)} arenas")
out = batch_sign([(pre, m) for m in msgs], psi=16, workers=2, pool=pool)
print(f"{out.rounds} rounds, {len(out.attempts)} attempts for {len(msgs)} signatures")

# %% The batch result is the sequential result, byte for byte.
print("matches sequential:", out.signatures == [sign(sk, m, 2, precomp=pre) for m in msgs])
print("all verify:", all(batch_verify([(pk, m, s) for m, s in zip(msgs, out.signatures)], 2)))

# %% One CSV row per scheduling round.
buf = io.StringIO()
write_trace(out.history, buf)
print("\n".join(buf.getvalue().splitlines()[:6]))
