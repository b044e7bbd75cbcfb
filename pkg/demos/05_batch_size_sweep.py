"""Throughput against batch size, and the cost of speculation on few cores."""

# %%
from dilithium_batch.bench import sweep

for row in sweep(2, [1, 4, 16, 64, 256], None, reps=2):
    print(f"phi={row.phi:4d} psi={row.psi:3d}  {row.throughput_ops:7.0f} sign/s  "
          f"executed/task={row.executed_per_task:.2f}")

# %% A full-width table (psi = phi) speculates on every idle slot. With a
# single worker each speculative attempt is real work, so executed attempts
# per task rise above the sequential mean and throughput drops.
for row in sweep(2, [64], [4, 16, 64], reps=2, check=True):
    print(f"psi={row.psi:3d}  {row.throughput_ops:7.0f} sign/s  "
          f"executed/task={row.executed_per_task:.2f}  same output={row.equivalent}")
