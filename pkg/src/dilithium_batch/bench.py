"""Throughput benchmark and sensitivity sweep, emitting versioned CSV rows.

Every measurement is repeated ``reps`` times and the median is reported.
``latency_ms`` is the wall time of one batch call, so for phi=1 it is the
reciprocal of the throughput.
"""

from __future__ import annotations

import csv
import statistics
import time
from collections.abc import Callable, Iterable, Sequence
from dataclasses import asdict, dataclass

import numpy as np

from .batch.engine import RoundStats, batch_keygen, batch_sign, batch_verify, default_psi, multi_stream_sign
from .params import SEEDBYTES, get_params
from .scheme import SignPrecomp, keygen, sign_loop

SCHEMA_VERSION = 1


@dataclass
class BenchRow:
    schema: int
    op: str
    level: int
    phi: int
    psi: int
    workers: int
    streams: int
    reps: int
    throughput_ops: float
    latency_ms: float
    attempts_mean: float
    executed_per_task: float
    rounds: float
    equivalent: str = ""  # "yes"/"no" when the sweep checks against sequential signing


FIELDS = tuple(BenchRow.__dataclass_fields__)


def write_rows(rows: Iterable[BenchRow], fh, header: bool = True) -> None:
    writer = csv.writer(fh)
    if header:
        writer.writerow(FIELDS)
    for r in rows:
        d = asdict(r)
        writer.writerow([f"{d[f]:.6g}" if isinstance(d[f], float) else d[f] for f in FIELDS])


def _timed(fn: Callable, reps: int):
    times, out = [], None
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), out


def make_workload(level: int, phi: int, seed: int = 0, msg_len: int = 32):
    """One deterministic key and ``phi`` random messages."""
    rng = np.random.default_rng(seed)
    zeta = rng.bytes(SEEDBYTES)
    pk, sk = keygen(zeta, level)
    pre = SignPrecomp.from_secret_key(sk, level)
    msgs = [rng.bytes(msg_len) for _ in range(phi)]
    sign_loop(pre, b"warm-up")  # keep one-time kernel loading out of the timings
    return pk, sk, pre, msgs


def _sign_row(level, pre, msgs, psi, workers, streams, reps,
              trace: Callable[[RoundStats], None] | None = None) -> tuple[BenchRow, list]:
    phi = len(msgs)
    tasks = [(pre, m) for m in msgs]
    ell = pre.params.l
    if psi is None and streams == 1:
        psi = default_psi(phi, workers)

    def run():
        if streams > 1:
            return multi_stream_sign(tasks, streams, psi, workers)
        return [batch_sign(tasks, psi, workers, trace=trace)]

    elapsed, results = _timed(run, reps)
    nonces = [n for r in results for n in r.nonces if n is not None]
    executed = sum(len(r.attempts) for r in results)
    row = BenchRow(SCHEMA_VERSION, "sign", level, phi, psi or 0, workers, streams, reps,
                   phi / elapsed, 1e3 * elapsed,
                   float(np.mean([n // ell + 1 for n in nonces])) if nonces else 0.0,
                   executed / phi, float(max(r.rounds for r in results)))
    sigs = [s for r in results for s in r.signatures]
    return row, sigs


def bench(level: int, phi: int, psi: int | None = None, workers: int = 1, streams: int = 1,
          reps: int = 3, seed: int = 0,
          trace: Callable[[RoundStats], None] | None = None) -> list[BenchRow]:
    """keygen, sign and verify rows for one configuration."""
    p = get_params(level)
    pk, sk, pre, msgs = make_workload(p.level, phi, seed)
    rng = np.random.default_rng(seed + 1)
    zetas = [rng.bytes(SEEDBYTES) for _ in range(phi)]
    rows = []

    elapsed, _ = _timed(lambda: batch_keygen(zetas, p, workers), reps)
    rows.append(BenchRow(SCHEMA_VERSION, "keygen", p.level, phi, 0, workers, 1, reps,
                         phi / elapsed, 1e3 * elapsed, 0.0, 1.0, 1.0))

    row, sigs = _sign_row(p.level, pre, msgs, psi, workers, streams, reps, trace)
    rows.append(row)

    items = [(pk, m, s) for m, s in zip(msgs, sigs)]
    elapsed, flags = _timed(lambda: batch_verify(items, p, workers), reps)
    if not all(flags):
        raise RuntimeError("benchmark produced a signature that does not verify")
    rows.append(BenchRow(SCHEMA_VERSION, "verify", p.level, phi, 0, workers, 1, reps,
                         phi / elapsed, 1e3 * elapsed, 0.0, 1.0, 1.0))
    return rows


def sweep(level: int, phis: Sequence[int], psis: Sequence[int] | None = None,
          workers: int = 1, streams: Sequence[int] = (1,), reps: int = 3, seed: int = 0,
          check: bool = False) -> list[BenchRow]:
    """Sign throughput over a (phi, psi, streams) grid.

    ``psis`` of None uses the default heuristic psi = min(phi, 4 * workers)
    at every batch size; otherwise points with psi > phi are skipped. With ``check`` each point is compared against
    sequential signing.
    """
    p = get_params(level)
    rows = []
    for phi in phis:
        _, _, pre, msgs = make_workload(p.level, phi, seed)
        expected = None
        if check:
            expected = [sign_loop(pre, m)[0].pack(p) for m in msgs]
        for psi in (psis or [default_psi(phi, workers)]):
            if psi > phi:
                continue
            for s in streams:
                row, sigs = _sign_row(p.level, pre, msgs, psi, workers, s, reps)
                if expected is not None:
                    row.equivalent = "yes" if sigs == expected else "no"
                rows.append(row)
    return rows
