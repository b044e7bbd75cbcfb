"""Speculative-nonce scheduler for batches of rejection-loop tasks.

Nonces are tracked as attempt indices ``a`` (the mask nonce is ``a * l``).
Each round the coordinator calls :func:`schedule_round`, runs the returned
assignments (in any order, on any number of workers), then feeds the
outcomes to :func:`commit_round`. A task finishes once it holds a valid
attempt and every smaller attempt index has been tried and rejected, so the
result always equals what the sequential loop would have produced.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple


class TaskStatus(Enum):
    PENDING = "pending"
    RUNNING = "running"
    DONE = "done"
    FAILED = "failed"


class SlotState(Enum):
    VALID = "valid"
    INVALID = "invalid"
    ERROR = "error"


class Assignment(NamedTuple):
    task: int
    attempt: int
    speculative: bool

    def kappa(self, ell: int) -> int:
        return self.attempt * ell


@dataclass
class TaskEntry:
    status: TaskStatus = TaskStatus.PENDING
    attempted: set[int] = field(default_factory=set)
    low: int = 0  # every attempt below this index has been tried
    best: int | None = None  # smallest valid attempt seen so far
    error: BaseException | None = None

    def advance_low(self) -> None:
        while self.low in self.attempted:
            self.low += 1

    @property
    def nonce_attempt(self) -> int | None:
        return self.best if self.status is TaskStatus.DONE else None


@dataclass
class RoundStats:
    round: int
    active_tasks: int
    attempts: int
    speculative: int
    idle_slots: int
    finished: int


class SchedulerState:
    """Task LUT (size phi), execution and state LUTs (size psi), order map."""

    def __init__(self, phi: int, psi: int, ell: int = 1, speculate: bool = True):
        if phi < 1 or psi < 1:
            raise ValueError("phi and psi must be positive")
        self.phi = phi
        self.psi = psi
        self.ell = ell
        self.speculate = speculate
        self.task_lut = [TaskEntry() for _ in range(phi)]
        # unfinished tasks in queue order; a dict gives O(1) removal and stable order
        self._open: dict[int, None] = dict.fromkeys(range(phi))
        self.exec_lut: list[Assignment | None] = [None] * psi
        self.state_lut: list[tuple[SlotState, int] | None] = [None] * psi
        self.order_map: dict[int, int] = {}
        self.rounds = 0
        self.history: list[RoundStats] = []

    def unfinished(self) -> list[int]:
        return list(self._open)

    def _close(self, task: int) -> None:
        self._open.pop(task, None)

    @property
    def finished(self) -> bool:
        return not self._open

    def accepted_attempt(self, task: int) -> int | None:
        return self.task_lut[task].nonce_attempt

    def accepted_nonce(self, task: int) -> int | None:
        a = self.accepted_attempt(task)
        return None if a is None else a * self.ell


def _candidates(entry: TaskEntry, start: int):
    """Unattempted indices >= start, below the best known valid attempt."""
    a = max(start, entry.low)
    while entry.best is None or a < entry.best:
        if a not in entry.attempted:
            yield a
        a += 1


def schedule_round(state: SchedulerState) -> list[Assignment]:
    """Pick up to psi (task, attempt) pairs; does not modify ``state``.

    Every unfinished task first gets its smallest untried attempt, in task
    order. Slots left over are filled breadth-first with the next untried
    attempts of unfinished tasks (depth 1 for every task, then depth 2, ...).
    """
    out: list[Assignment] = []
    active = iter(state._open)  # visited lazily: a round touches O(psi) tasks
    gens: dict[int, object] = {}
    depth = 0
    while len(out) < state.psi:
        still = []
        for t in active:
            if len(out) == state.psi:
                break
            if t not in gens:
                gens[t] = _candidates(state.task_lut[t], 0)
            a = next(gens[t], None)
            if a is None:
                continue
            out.append(Assignment(t, a, depth > 0))
            still.append(t)
        if not state.speculate or not still:
            break
        active = iter(still)
        depth += 1
    return out


def _is_valid(result) -> bool | None:
    if isinstance(result, BaseException):
        return None
    accepted = getattr(result, "accepted", result)
    return bool(accepted)


def commit_round(state: SchedulerState, assignments: Sequence[Assignment],
                 results: Sequence) -> list[tuple[int, int]]:
    """Record one round of outcomes.

    ``results[s]`` is the outcome of ``assignments[s]``: an object with an
    ``accepted`` attribute, a bool, or an exception (the task is then marked
    failed). Returns ``(slot, task)`` pairs whose staged signature became the
    task's best candidate this round; the caller copies them into the pool.
    """
    if len(results) != len(assignments):
        raise ValueError("one result per assignment required")
    seen = set()
    improved: dict[int, tuple[int, int]] = {}  # task -> (attempt, slot)
    state.exec_lut = [None] * state.psi
    state.state_lut = [None] * state.psi
    state.order_map = {}
    active_before = len(state._open)
    for slot, (asg, res) in enumerate(zip(assignments, results)):
        entry = state.task_lut[asg.task]
        if (asg.task, asg.attempt) in seen or asg.attempt in entry.attempted:
            raise ValueError(f"attempt {asg.attempt} of task {asg.task} scheduled twice")
        seen.add((asg.task, asg.attempt))
        state.exec_lut[slot] = asg
        entry.attempted.add(asg.attempt)
        if entry.status is TaskStatus.PENDING:
            entry.status = TaskStatus.RUNNING
        valid = _is_valid(res)
        kappa = asg.kappa(state.ell)
        if valid is None:
            state.state_lut[slot] = (SlotState.ERROR, kappa)
            if entry.status is not TaskStatus.DONE:
                entry.status = TaskStatus.FAILED
                entry.error = res
                state._close(asg.task)
            continue
        state.state_lut[slot] = (SlotState.VALID if valid else SlotState.INVALID, kappa)
        if valid and (entry.best is None or asg.attempt < entry.best):
            entry.best = asg.attempt
            improved[asg.task] = (asg.attempt, slot)

    finished = 0
    for task in {a.task for a in assignments}:
        entry = state.task_lut[task]
        entry.advance_low()
        if (entry.status is TaskStatus.RUNNING and entry.best is not None
                and entry.low >= entry.best):
            entry.status = TaskStatus.DONE
            state._close(task)
            finished += 1

    writes = []
    for task, (_, slot) in sorted(improved.items()):
        if state.task_lut[task].status is not TaskStatus.FAILED:
            state.order_map[slot] = task
            writes.append((slot, task))

    state.rounds += 1
    state.history.append(RoundStats(
        round=state.rounds,
        active_tasks=active_before,
        attempts=len(assignments),
        speculative=sum(a.speculative for a in assignments),
        idle_slots=state.psi - len(assignments),
        finished=finished,
    ))
    return writes
