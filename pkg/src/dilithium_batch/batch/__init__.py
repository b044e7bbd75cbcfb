"""Batch signing engine: memory pool, speculative scheduler, executor."""

from .engine import (
    BatchResult,
    SignTask,
    batch_keygen,
    batch_sign,
    batch_verify,
    default_psi,
    multi_stream_sign,
    simulate,
    write_trace,
)
from .pool import ALIGNMENT, MemoryPool, PoolError, pool_create
from .scheduler import Assignment, RoundStats, SchedulerState, TaskStatus, commit_round, schedule_round

__all__ = [
    "ALIGNMENT", "Assignment", "BatchResult", "MemoryPool", "PoolError", "RoundStats",
    "SchedulerState", "SignTask", "TaskStatus", "batch_keygen", "batch_sign", "batch_verify",
    "commit_round", "default_psi", "multi_stream_sign", "pool_create", "schedule_round",
    "simulate", "write_trace",
]
