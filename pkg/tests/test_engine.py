import dataclasses
import io
from collections import Counter

import numpy as np
import pytest

from dilithium_batch import keygen, sign, verify
from dilithium_batch.batch import (
    MemoryPool,
    SignTask,
    batch_keygen,
    batch_sign,
    batch_verify,
    default_psi,
    multi_stream_sign,
    simulate,
    write_trace,
)

rng = np.random.default_rng(21)


def _messages(n):
    return [rng.bytes(int(rng.integers(0, 64))) for _ in range(n)]


def test_single_task_any_psi(keys):
    _, sk, pre = keys[2]
    expected = sign(sk, b"one", 2)
    for psi, workers in [(1, 1), (1, 3), (None, 2)]:
        out = batch_sign([(pre, b"one")], psi, workers)
        assert out.signatures == [expected]


@pytest.mark.parametrize("phi,psi,workers", [(5, 1, 1), (12, 5, 2), (20, 20, 3), (9, 4, 8)])
def test_matches_sequential(keys, level, phi, psi, workers):
    pk, sk, pre = keys[level]
    msgs = _messages(phi)
    out = batch_sign([(pre, m) for m in msgs], psi, workers)
    assert out.signatures == [sign(sk, m, level, precomp=pre) for m in msgs]
    assert max(Counter(out.attempts).values()) == 1
    assert not out.errors
    assert all(verify(pk, m, s, level) for m, s in zip(msgs, out.signatures))
    ell = pre.params.l
    sequential = sum(n // ell + 1 for n in out.nonces)
    assert sequential <= len(out.attempts) <= sequential + psi * out.rounds


def test_speculation_off_matches(keys):
    _, _, pre = keys[3]
    msgs = _messages(10)
    on = batch_sign([(pre, m) for m in msgs], 10)
    off = batch_sign([(pre, m) for m in msgs], 10, speculate=False)
    assert on.signatures == off.signatures
    assert on.rounds <= off.rounds


def test_sign_task_objects_and_caller_pool(keys):
    _, sk, pre = keys[2]
    msgs = _messages(6)
    pool = MemoryPool(2, 6, 64, staging=3)
    out = batch_sign([SignTask(i, pre, m) for i, m in enumerate(msgs)], 3, pool=pool)
    assert pool.signatures() == out.signatures == [sign(sk, m, 2) for m in msgs]
    with pytest.raises(ValueError):
        batch_sign([(pre, m) for m in msgs], 4, pool=pool)  # staging too small


def test_failed_task_does_not_abort(keys):
    _, sk, pre = keys[2]
    broken = dataclasses.replace(pre, s1_hat=None)  # every attempt raises
    tasks = [(pre, b"a"), (broken, b"b"), (pre, b"c")]
    out = batch_sign(tasks, 3)
    assert set(out.errors) == {1}
    assert out.signatures[1] is None
    assert out.signatures[0] == sign(sk, b"a", 2) and out.signatures[2] == sign(sk, b"c", 2)


def test_mixed_levels_rejected(keys):
    with pytest.raises(ValueError):
        batch_sign([(keys[2][2], b"a"), (keys[3][2], b"b")])


def test_empty_batch():
    assert batch_sign([]).signatures == []


def test_trace_hook(keys):
    _, _, pre = keys[2]
    rows = []
    out = batch_sign([(pre, m) for m in _messages(8)], 8, trace=rows.append)
    assert rows == out.history
    buf = io.StringIO()
    write_trace(rows, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "round,active_tasks,attempts,speculative,idle_slots,finished"
    assert len(lines) == out.rounds + 1


def test_multi_stream(keys):
    _, sk, pre = keys[5]
    msgs = _messages(11)
    parts = multi_stream_sign([(pre, m) for m in msgs], 3, psi=4, workers=2)
    assert len(parts) == 3
    assert [s for p in parts for s in p.signatures] == [sign(sk, m, 5) for m in msgs]


def test_batch_verify(keys, level):
    pk, sk, pre = keys[level]
    msgs = _messages(6)
    sigs = [sign(sk, m, level, precomp=pre) for m in msgs]
    items = [(pk, m, s) for m, s in zip(msgs, sigs)]
    assert batch_verify(items, level, 2) == [True] * 6
    bad = list(items)
    s = bytearray(sigs[3])
    s[100] ^= 4
    bad[3] = (pk, msgs[3], bytes(s))
    bad[4] = (pk, msgs[4], sigs[4][:-3])  # malformed
    flags = batch_verify(bad, level)
    assert flags == [True, True, True, False, False, True]
    assert flags == [verify(*it, level) for it in bad]
    pool = MemoryPool(level, 6, 64)
    assert batch_verify(bad, level, pool=pool) == flags


def test_batch_keygen():
    seeds = [bytes([i]) * 32 for i in range(5)]
    pairs = batch_keygen(seeds, 2, workers=2)
    assert pairs == [keygen(z, 2) for z in seeds]
    assert batch_keygen(seeds[::-1], 2) == pairs[::-1]
    assert batch_keygen(seeds[:1], 2) == [keygen(seeds[0], 2)]


def test_default_psi():
    assert default_psi(100, 2) == 8
    assert default_psi(3, 8) == 3


def test_simulate_nonces_are_first_success():
    state = simulate(50, 20, 0.3, seed=9)
    table = np.random.default_rng(9).random((50, 512)) < 0.3
    table[:, -1] = True
    assert [state.accepted_attempt(i) for i in range(50)] == \
        [int(np.argmax(row)) for row in table]
