"""Signs of the syzygous triples in the weight-6 form h6.

The sign pattern is forced by modularity. For a generator g of Sp_4(Z) one has
Theta_m(g.tau)^4 = kappa * det(C tau + D)^2 * Theta_{m'}(tau)^4 with kappa = +-1,
and h6(g.tau) = det(C tau + D)^6 h6(tau) then forces s_{g(t)} = kappa_t * s_t.
Propagating from one triple over the generators fixes every sign up to a global
choice, which is pinned by requiring constant term +4.

``FROZEN_SIGNS`` records the result; ``derive_syzygous_signs`` recomputes it
numerically and the test suite checks that both agree.
"""
from __future__ import annotations

from collections import deque
from functools import lru_cache

import numpy as np

from .characteristics import EVEN_CHARS, syzygous_triples

# triples listed in the order of syzygous_triples(); 1 for +, 0 for -
FROZEN_SIGNS = tuple(int(c) for c in "110010000011110110111110010100001100000011001010000011111111")


def _transformation_table(g, taus):
    from .thetanum import eval_theta, symplectic_act

    table = {}
    vals = [{m: eval_theta(m, t) ** 4 for m in EVEN_CHARS} for t in taus]
    for m in EVEN_CHARS:
        ratios = []
        for t, v in zip(taus, vals):
            gt, j = symplectic_act(g, t)
            ratios.append((eval_theta(m, gt) ** 4 / j**2, v))
        found = None
        for m2 in EVEN_CHARS:
            ks = [r / v[m2] for r, v in ratios]
            k = ks[0]
            if all(abs(x - k) < 1e-8 * max(1, abs(k)) for x in ks):
                if abs(k.imag) > 1e-8 or abs(abs(k.real) - 1) > 1e-8:
                    raise ArithmeticError(f"unexpected multiplier {k} for {m}")
                if found is not None:
                    raise ArithmeticError("ambiguous characteristic image")
                found = (m2, 1 if k.real > 0 else -1)
        if found is None:
            raise ArithmeticError(f"no image found for characteristic {m}")
        table[m] = found
    return table


def _generators():
    from .thetanum import J_MATRIX, gl2_embed, translation

    return [
        J_MATRIX,
        translation([[1, 0], [0, 0]]),
        translation([[0, 0], [0, 1]]),
        translation([[0, 1], [1, 0]]),
        gl2_embed([[0, 1], [1, 0]]),
        gl2_embed([[1, 1], [0, 1]]),
    ]


@lru_cache(maxsize=1)
def derive_syzygous_signs() -> dict:
    from .thetanum import SiegelPoint

    taus = [
        SiegelPoint(0.21 + 1.13j, 0.17 + 0.31j, -0.08 + 1.29j),
        SiegelPoint(-0.33 + 0.97j, 0.05 + 0.22j, 0.41 + 1.41j),
    ]
    tables = [_transformation_table(g, taus) for g in _generators()]
    triples = syzygous_triples()
    index = {frozenset(t): t for t in triples}
    signs = {triples[0]: 1}
    queue = deque([triples[0]])
    while queue:
        t = queue.popleft()
        for tab in tables:
            image = frozenset(tab[m][0] for m in t)
            kappa = int(np.prod([tab[m][1] for m in t]))
            t2 = index.get(image)
            if t2 is None:
                raise ArithmeticError("generator does not preserve syzygous triples")
            s2 = signs[t] * kappa
            if t2 in signs:
                if signs[t2] != s2:
                    raise ArithmeticError("inconsistent sign propagation")
            else:
                signs[t2] = s2
                queue.append(t2)
    if len(signs) != len(triples):
        raise ArithmeticError(f"orbit reached {len(signs)} of {len(triples)} triples")
    # constant term: product Theta^4 has constant 1 iff the triple lies in the a = 0 block
    const = sum(s for t, s in signs.items() if all(m.m[0] == m.m[1] == 0 for m in t))
    if const < 0:
        signs = {t: -s for t, s in signs.items()}
    return signs


def syzygous_signs() -> dict:
    if FROZEN_SIGNS is None:
        return derive_syzygous_signs()
    return {t: (1 if b else -1) for t, b in zip(syzygous_triples(), FROZEN_SIGNS)}
