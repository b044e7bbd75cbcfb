"""Per-level Dilithium parameter sets (round 3)."""

from __future__ import annotations

from dataclasses import dataclass

N = 256
Q = 8380417
D = 13
SEEDBYTES = 32
CRHBYTES = 64
TRBYTES = 32


@dataclass(frozen=True)
class Params:
    level: int
    k: int
    l: int  # noqa: E741
    tau: int
    gamma1: int
    gamma2: int
    eta: int
    omega: int
    n: int = N
    q: int = Q
    d: int = D

    @property
    def beta(self) -> int:
        return self.tau * self.eta

    @property
    def alpha(self) -> int:
        return 2 * self.gamma2

    @property
    def m(self) -> int:
        """Number of high-bit buckets, (q - 1) / (2 * gamma2)."""
        return (self.q - 1) // self.alpha

    @property
    def eta_bits(self) -> int:
        return 3 if self.eta == 2 else 4

    @property
    def z_bits(self) -> int:
        return 18 if self.gamma1 == 1 << 17 else 20

    @property
    def w1_bits(self) -> int:
        return 6 if self.m == 44 else 4

    @property
    def pk_bytes(self) -> int:
        return SEEDBYTES + self.k * 320

    @property
    def sk_bytes(self) -> int:
        return (3 * SEEDBYTES + (self.k + self.l) * self.eta_bits * 32
                + self.k * 416)

    @property
    def sig_bytes(self) -> int:
        return SEEDBYTES + self.l * self.z_bits * 32 + self.omega + self.k

    @property
    def w1_packed_bytes(self) -> int:
        return self.k * self.w1_bits * 32


PARAMS = {
    2: Params(level=2, k=4, l=4, tau=39, gamma1=1 << 17, gamma2=(Q - 1) // 88,
              eta=2, omega=80),
    3: Params(level=3, k=6, l=5, tau=49, gamma1=1 << 19, gamma2=(Q - 1) // 32,
              eta=4, omega=55),
    5: Params(level=5, k=8, l=7, tau=60, gamma1=1 << 19, gamma2=(Q - 1) // 32,
              eta=2, omega=75),
}


def get_params(level: int | Params) -> Params:
    if isinstance(level, Params):
        return level
    try:
        return PARAMS[int(level)]
    except (KeyError, ValueError):
        raise ValueError(f"unsupported security level {level!r}; "
                         f"expected one of {sorted(PARAMS)}") from None
