"""Polynomial expressions of the symmetric functions Sigma_i in h4, h6, h10, h12.

Each formula is a list of ``(coefficient, (e4, e6, e10, e12))`` terms. The
tables are shared by the series verifier and the valuation machinery above 2.
"""
from __future__ import annotations

from fractions import Fraction as F

WEIGHTS = (4, 6, 10, 12)

SIGMA_PRINTED: dict[int, list[tuple[F, tuple[int, int, int, int]]]] = {
    1: [(F(2), (1, 0, 0, 0))],
    2: [(F(3, 2), (2, 0, 0, 0))],
    3: [(F(29, 54), (3, 0, 0, 0)), (F(-1, 54), (0, 2, 0, 0)), (F(1, 6), (0, 0, 0, 1))],
    4: [
        (F(43, 432), (4, 0, 0, 0)), (F(-1, 54), (1, 2, 0, 0)),
        (F(23, 6), (1, 0, 0, 1)), (F(2, 3), (0, 1, 1, 0)),
    ],
    5: [
        (F(1, 108), (5, 0, 0, 0)), (F(-1, 216), (2, 2, 0, 0)), (F(25, 24), (2, 0, 0, 1)),
        (F(-1, 6), (1, 1, 1, 0)), (F(123, 4), (0, 0, 2, 0)),
    ],
    6: [
        (F(1, 2916), (6, 0, 0, 0)), (F(-1, 2916), (3, 2, 0, 0)), (F(7, 54), (3, 0, 0, 1)),
        (F(-1, 12), (2, 1, 1, 0)), (F(47, 6), (1, 0, 2, 0)), (F(1, 11664), (0, 4, 0, 0)),
        (F(-5, 216), (0, 2, 0, 1)), (F(43, 48), (0, 0, 0, 2)),
    ],
    # first term as printed has weight 20, not 28
    7: [
        (F(1, 162), (2, 0, 0, 1)), (F(-1, 162), (3, 1, 1, 0)), (F(41, 72), (2, 0, 2, 0)),
        (F(-1, 324), (1, 2, 0, 1)), (F(11, 36), (1, 0, 0, 2)), (F(1, 324), (0, 3, 1, 0)),
        (F(-19, 36), (0, 1, 1, 1)),
    ],
    8: [
        (F(1, 108), (3, 0, 2, 0)), (F(1, 36), (2, 0, 0, 2)), (F(-1, 18), (1, 1, 1, 1)),
        (F(5, 216), (0, 2, 2, 0)), (F(-11, 8), (0, 0, 2, 1)),
    ],
    9: [(F(-5, 36), (1, 0, 2, 1)), (F(7, 108), (0, 1, 3, 0)), (F(1, 27), (0, 0, 0, 3))],
    10: [(F(1, 16), (0, 0, 4, 0))],
}


def weight(exps) -> int:
    return sum(w * e for w, e in zip(WEIGHTS, exps))


def monomials_of_weight(k: int) -> list[tuple[int, int, int, int]]:
    out = []
    for e12 in range(k // 12 + 1):
        for e10 in range((k - 12 * e12) // 10 + 1):
            for e6 in range((k - 12 * e12 - 10 * e10) // 6 + 1):
                rest = k - 12 * e12 - 10 * e10 - 6 * e6
                if rest % 4 == 0:
                    out.append((rest // 4, e6, e10, e12))
    return sorted(out)


def unbalanced_terms(i: int, table=None) -> list:
    table = SIGMA_PRINTED if table is None else table
    return [t for t in table[i] if weight(t[1]) != 4 * i]


def _corrected() -> dict:
    table = {i: list(terms) for i, terms in SIGMA_PRINTED.items()}
    # h12 coefficient of Sigma_3 fitted exactly on q-expansions: 11/2
    table[3] = [(F(29, 54), (3, 0, 0, 0)), (F(-1, 54), (0, 2, 0, 0)), (F(11, 2), (0, 0, 0, 1))]
    # weight-balanced first term of Sigma_7: h4^4 h12
    table[7] = [(F(1, 162), (4, 0, 0, 1))] + table[7][1:]
    return table


SIGMA_CORRECTED = _corrected()
