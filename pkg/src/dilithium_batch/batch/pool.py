"""Fixed-layout, 256-byte-aligned task memory pool.

One backing allocation holds every arena; arena ``f`` stores task ``i`` at
byte offset ``i * stride(f)``. Hash-input arenas are laid out so that each
hash call reads one contiguous slice:

* ``msg_stream``  -- tr || M, hashed to the message digest mu
* ``seed_stream`` -- K || mu, hashed to the mask seed rho'
* ``rho_prime``   -- rho', read by every attempt of the task
* ``sig``         -- packed signatures, unpadded so the arena is the output

Nothing is allocated after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..params import CRHBYTES, SEEDBYTES, TRBYTES, Params, get_params

ALIGNMENT = 256


def _round_up(x: int, to: int = ALIGNMENT) -> int:
    return -(-x // to) * to


class PoolError(MemoryError):
    """Pool cannot be created or a task does not fit its slot."""


@dataclass(frozen=True)
class Arena:
    name: str
    stride: int
    count: int
    data: np.ndarray  # uint8 view, base aligned to ALIGNMENT

    def offset(self, i: int) -> int:
        if not 0 <= i < self.count:
            raise IndexError(f"task {i} outside arena {self.name!r} of {self.count}")
        return i * self.stride

    def slot(self, i: int) -> np.ndarray:
        off = self.offset(i)
        return self.data[off:off + self.stride]

    @property
    def address(self) -> int:
        return self.data.ctypes.data


class MemoryPool:
    """Per-task storage for a batch of ``phi`` signing tasks."""

    def __init__(self, params: Params | int, phi: int, msg_capacity: int = 0,
                 staging: int = 0):
        if phi < 1:
            raise ValueError("pool needs at least one task slot")
        self.params = get_params(params)
        self.phi = phi
        self.msg_capacity = msg_capacity
        p = self.params
        layout = [
            ("msg_stream", _round_up(TRBYTES + msg_capacity), phi),
            ("seed_stream", _round_up(SEEDBYTES + CRHBYTES), phi),
            ("rho_prime", _round_up(CRHBYTES), phi),
            ("sig", p.sig_bytes, phi),
        ]
        if staging:
            layout.append(("staging", p.sig_bytes, staging))
        offsets, total = [], 0
        for _, stride, count in layout:
            offsets.append(total)
            total = _round_up(total + stride * count)
        try:
            raw = np.zeros(total + ALIGNMENT, dtype=np.uint8)
        except MemoryError as exc:
            raise PoolError(f"cannot allocate {total} bytes for {phi} tasks") from exc
        shift = (-raw.ctypes.data) % ALIGNMENT
        self._raw = raw
        self._buf = raw[shift:shift + total]
        self.msg_len = np.zeros(phi, dtype=np.int64)
        self.arenas: dict[str, Arena] = {}
        for (name, stride, count), off in zip(layout, offsets):
            view = self._buf[off:off + stride * count]
            self.arenas[name] = Arena(name, stride, count, view)

    @property
    def nbytes(self) -> int:
        return self._buf.nbytes

    def __getitem__(self, name: str) -> Arena:
        return self.arenas[name]

    def offset(self, field: str, i: int) -> int:
        return self.arenas[field].offset(i)

    def slot(self, field: str, i: int) -> np.ndarray:
        return self.arenas[field].slot(i)

    def load_message(self, i: int, tr: bytes, msg: bytes) -> None:
        if len(msg) > self.msg_capacity:
            raise PoolError(f"message of {len(msg)} bytes exceeds slot capacity "
                            f"{self.msg_capacity}")
        slot = self.slot("msg_stream", i)
        slot[:TRBYTES] = np.frombuffer(tr, dtype=np.uint8)
        slot[TRBYTES:TRBYTES + len(msg)] = np.frombuffer(msg, dtype=np.uint8)
        self.msg_len[i] = len(msg)

    def message_stream(self, i: int) -> np.ndarray:
        """tr || M for task i, contiguous."""
        return self.slot("msg_stream", i)[:TRBYTES + self.msg_len[i]]

    def message(self, i: int) -> bytes:
        return self.message_stream(i)[TRBYTES:].tobytes()

    def signature(self, i: int) -> bytes:
        return self.slot("sig", i).tobytes()

    def signatures(self) -> list[bytes]:
        return [self.signature(i) for i in range(self.phi)]


def pool_create(level: Params | int, phi: int, msg_capacity: int = 0,
                staging: int = 0) -> MemoryPool:
    return MemoryPool(level, phi, msg_capacity, staging)
