"""Batch keygen / sign / verify on a pool of workers.

``batch_sign`` runs fork-join rounds: the coordinator schedules up to psi
attempts, workers execute them (each writes only its own staging slot), and
the coordinator commits the outcomes and copies winners into the task's pool
slot. Kernels release the GIL, so threads give real parallelism.
"""

from __future__ import annotations

import csv
import io
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..keccak import hash_h
from ..params import CRHBYTES, SEEDBYTES, TRBYTES, Params, get_params
from ..scheme import SignPrecomp, keygen, sign_attempt, verify
from .pool import MemoryPool
from .scheduler import Assignment, RoundStats, SchedulerState, TaskStatus, commit_round, schedule_round

TRACE_FIELDS = ("round", "active_tasks", "attempts", "speculative", "idle_slots", "finished")


@dataclass
class SignTask:
    index: int
    precomp: SignPrecomp
    msg: bytes


@dataclass
class BatchResult:
    signatures: list[bytes | None]
    attempts: list[tuple[int, int]]  # executed (task, kappa), in execution order
    nonces: list[int | None]  # accepted kappa per task
    errors: dict[int, BaseException] = field(default_factory=dict)
    history: list[RoundStats] = field(default_factory=list)

    @property
    def rounds(self) -> int:
        return len(self.history)


def default_psi(phi: int, workers: int, multiplier: int = 4) -> int:
    return max(1, min(phi, multiplier * workers))


def write_trace(history: Iterable[RoundStats], fh: io.TextIOBase) -> None:
    writer = csv.writer(fh)
    writer.writerow(TRACE_FIELDS)
    for row in history:
        writer.writerow([getattr(row, f) for f in TRACE_FIELDS])


class _Executor:
    """Inline for one worker, thread pool otherwise."""

    def __init__(self, workers: int):
        if workers < 1:
            raise ValueError("need at least one worker")
        self._pool = ThreadPoolExecutor(workers) if workers > 1 else None

    def map(self, fn: Callable, items: Sequence) -> list:
        if self._pool is None:
            return [fn(x) for x in items]
        return list(self._pool.map(fn, items))

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        if self._pool is not None:
            self._pool.shutdown()


def _capture(fn: Callable) -> Callable:
    def run(x):
        try:
            return fn(x)
        except Exception as exc:  # a failing task must not abort the batch
            return exc
    return run


def _as_tasks(tasks) -> list[SignTask]:
    out = []
    for i, t in enumerate(tasks):
        if isinstance(t, SignTask):
            out.append(SignTask(i, t.precomp, t.msg))
        else:
            pre, msg = t
            out.append(SignTask(i, pre, bytes(msg)))
    return out


def batch_sign(tasks, psi: int | None = None, workers: int = 1, *,
               pool: MemoryPool | None = None, speculate: bool = True,
               trace: Callable[[RoundStats], None] | None = None) -> BatchResult:
    """Sign every task; output order and bytes equal sequential signing.

    ``tasks`` holds :class:`SignTask` objects or ``(SignPrecomp, message)``
    pairs; all must share one parameter set.
    """
    tasks = _as_tasks(tasks)
    if not tasks:
        return BatchResult([], [], [])
    params = tasks[0].precomp.params
    if any(t.precomp.params != params for t in tasks):
        raise ValueError("all tasks in a batch must use the same level")
    phi = len(tasks)
    psi = default_psi(phi, workers) if psi is None else psi
    if psi < 1:
        raise ValueError("psi must be positive")
    if pool is None:
        pool = MemoryPool(params, phi, max(len(t.msg) for t in tasks), staging=psi)
    if pool.phi < phi or "staging" not in pool.arenas or pool["staging"].count < psi:
        raise ValueError("pool too small for this batch")

    # per-task digests, hashed straight from the pool's contiguous streams
    mus, rho_primes = [], []
    for t in tasks:
        pool.load_message(t.index, t.precomp.tr, t.msg)
        mu = hash_h([pool.message_stream(t.index)], CRHBYTES)
        seed = pool.slot("seed_stream", t.index)
        seed[:SEEDBYTES] = np.frombuffer(t.precomp.key, dtype=np.uint8)
        seed[SEEDBYTES:SEEDBYTES + CRHBYTES] = np.frombuffer(mu, dtype=np.uint8)
        rp = pool.slot("rho_prime", t.index)
        rp[:CRHBYTES] = np.frombuffer(hash_h([seed[:SEEDBYTES + CRHBYTES]], CRHBYTES),
                                      dtype=np.uint8)
        mus.append(mu)
        rho_primes.append(rp[:CRHBYTES].tobytes())

    state = SchedulerState(phi, psi, params.l, speculate)
    staging = pool["staging"]
    executed: list[tuple[int, int]] = []

    def run(item: tuple[int, Assignment]):
        slot, asg = item
        t = tasks[asg.task]
        res = sign_attempt(t.precomp, mus[asg.task], rho_primes[asg.task],
                           asg.kappa(params.l))
        if res.accepted:
            res.pack(params, into=staging.slot(slot))
        return res

    run_safe = _capture(run)
    with _Executor(workers) as ex:
        while not state.finished:
            assignments = schedule_round(state)
            results = ex.map(run_safe, list(enumerate(assignments)))
            executed.extend((a.task, a.kappa(params.l)) for a in assignments)
            for slot, task in commit_round(state, assignments, results):
                pool.slot("sig", task)[:] = staging.slot(slot)
            if trace is not None:
                trace(state.history[-1])

    errors = {i: e.error for i, e in enumerate(state.task_lut)
              if e.status is TaskStatus.FAILED}
    sigs = [None if i in errors else pool.signature(i) for i in range(phi)]
    nonces = [state.accepted_nonce(i) for i in range(phi)]
    return BatchResult(sigs, executed, nonces, errors, state.history)


def batch_verify(items: Sequence[tuple[bytes, bytes, bytes]], params: Params | int,
                 workers: int = 1, *, pool: MemoryPool | None = None) -> list[bool]:
    """Verify (pk, msg, sig) triples; order preserving, malformed entries reject."""
    p = get_params(params)
    if pool is not None:
        # stage signatures and messages in their fixed slots, verify from there
        for i, (_, msg, sig) in enumerate(items):
            pool.load_message(i, bytes(TRBYTES), msg)
            if len(sig) == p.sig_bytes:
                pool.slot("sig", i)[:] = np.frombuffer(sig, dtype=np.uint8)
        items = [(pk, pool.message(i), pool.signature(i) if len(sig) == p.sig_bytes else sig)
                 for i, (pk, _, sig) in enumerate(items)]

    def run(item):
        pk, msg, sig = item
        return verify(pk, msg, sig, p)

    with _Executor(workers) as ex:
        out = ex.map(_capture(run), list(items))
    return [r is True for r in out]


def batch_keygen(zetas: Sequence[bytes], params: Params | int,
                 workers: int = 1) -> list[tuple[bytes, bytes]]:
    p = get_params(params)
    with _Executor(workers) as ex:
        return ex.map(lambda z: keygen(z, p), list(zetas))


def multi_stream_sign(tasks, streams: int, psi: int | None = None,
                      workers: int = 1, speculate: bool = True) -> list[BatchResult]:
    """Split the tasks into ``streams`` contiguous partitions and run independent engines.

    Engines share nothing but the read-only precomputations; results are per
    partition, in partition order.
    """
    tasks = _as_tasks(tasks)
    streams = max(1, min(streams, len(tasks)))
    bounds = np.linspace(0, len(tasks), streams + 1).astype(int)
    parts = [tasks[a:b] for a, b in zip(bounds[:-1], bounds[1:])]

    def run(part):
        return batch_sign([(t.precomp, t.msg) for t in part],
                          None if psi is None else min(psi, len(part)),
                          workers, speculate=speculate)

    with _Executor(streams) as ex:
        return ex.map(run, parts)


def simulate(phi: int, psi: int, p_accept: float, seed: int = 0,
             speculate: bool = True, max_depth: int = 512) -> SchedulerState:
    """Run the scheduler against i.i.d. Bernoulli(p_accept) attempt outcomes."""
    rng = np.random.default_rng(seed)
    outcomes = rng.random((phi, max_depth)) < p_accept
    outcomes[:, -1] = True
    state = SchedulerState(phi, psi, 1, speculate)
    while not state.finished:
        asg = schedule_round(state)
        commit_round(state, asg, [bool(outcomes[a.task, a.attempt]) for a in asg])
    return state
