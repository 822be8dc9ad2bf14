"""Theta characteristics of level two and their combinatorics.

A characteristic is a quadruple ``m = (m1, m2, m3, m4)`` of bits standing for
``a = (m1, m2)/2`` and ``b = (m3, m4)/2``. The associated theta constant is
``Theta_{a,b}(0, tau)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product


@dataclass(frozen=True, order=True)
class ThetaChar:
    m: tuple[int, int, int, int]

    def __post_init__(self):
        if len(self.m) != 4 or any(x not in (0, 1) for x in self.m):
            raise ValueError(f"characteristic must be a bit quadruple, got {self.m!r}")

    @classmethod
    def parse(cls, s: str | tuple | ThetaChar) -> ThetaChar:
        if isinstance(s, ThetaChar):
            return s
        if isinstance(s, str):
            s = s.strip("() ")
            if len(s) != 4:
                raise ValueError(f"bad characteristic string {s!r}")
            return cls(tuple(int(c) for c in s))
        return cls(tuple(int(c) for c in s))

    @property
    def a(self) -> tuple[Fraction, Fraction]:
        return Fraction(self.m[0], 2), Fraction(self.m[1], 2)

    @property
    def b(self) -> tuple[Fraction, Fraction]:
        return Fraction(self.m[2], 2), Fraction(self.m[3], 2)

    @property
    def parity(self) -> int:
        m1, m2, m3, m4 = self.m
        return -1 if (m1 * m3 + m2 * m4) % 2 else 1

    @property
    def is_even(self) -> bool:
        return self.parity == 1

    def swapped(self) -> ThetaChar:
        """Characteristic obtained by exchanging the two coordinates of ``a`` and ``b``."""
        m1, m2, m3, m4 = self.m
        return ThetaChar((m2, m1, m4, m3))

    def __add__(self, other: ThetaChar) -> ThetaChar:
        return ThetaChar(tuple((x + y) % 2 for x, y in zip(self.m, other.m)))

    def __str__(self) -> str:
        return "".join(map(str, self.m))


ALL_CHARS: tuple[ThetaChar, ...] = tuple(ThetaChar(m) for m in product((0, 1), repeat=4))

# Ordering used for psi coordinates throughout the package.
EVEN_CHARS: tuple[ThetaChar, ...] = tuple(
    ThetaChar.parse(s)
    for s in ("0000", "0001", "0010", "0011", "0100", "0110", "1000", "1001", "1100", "1111")
)

ODD_CHARS: tuple[ThetaChar, ...] = tuple(
    ThetaChar.parse(s) for s in ("0101", "1010", "1101", "1110", "1011", "0111")
)

ZERO = ThetaChar((0, 0, 0, 0))


def char(s: str) -> ThetaChar:
    return ThetaChar.parse(s)


@lru_cache(maxsize=None)
def syzygous_triples() -> tuple[tuple[ThetaChar, ThetaChar, ThetaChar], ...]:
    """The 60 triples of even characteristics whose sum is again even."""
    out = tuple(t for t in combinations(EVEN_CHARS, 3) if (t[0] + t[1] + t[2]).is_even)
    assert len(out) == 60
    return out


@lru_cache(maxsize=None)
def gopel_quadruples() -> tuple[tuple[ThetaChar, ...], ...]:
    """The 15 quadruples of even characteristics summing to zero."""
    out = tuple(q for q in combinations(EVEN_CHARS, 4) if q[0] + q[1] + q[2] + q[3] == ZERO)
    assert len(out) == 15
    return out
