"""Exact truncated Laurent series in U = e^{i pi tau1/4}, W = e^{i pi tau2/2}, Q = e^{i pi tau4/4}.

Series are truncated by total degree ``e_U + e_Q <= order``. The W exponent is
unbounded in principle but finitely supported: for anything generated by theta
constants one has ``|e_W| <= sqrt(e_U * e_Q)``.

Coefficients are kept as Python ints whenever possible and promoted to
``Fraction`` only when a rational scalar enters.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from .characteristics import EVEN_CHARS, ThetaChar, gopel_quadruples, syzygous_triples

# Packed monomial keys: key = (eU*M + eW)*M + eQ, linear in the exponents so
# that multiplying monomials is adding keys.
_M = 1 << 20
_HALF = _M >> 1


def _pack(eu: int, ew: int, eq: int) -> int:
    return (eu * _M + ew) * _M + eq


def _unpack(key: int) -> tuple[int, int, int]:
    eq = key % _M
    rest = (key - eq) // _M
    ew = (rest + _HALF) % _M - _HALF
    eu = (rest - ew) // _M
    return eu, ew, eq


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


class QSeries:
    """Immutable truncated series with exact rational coefficients."""

    __slots__ = ("_terms", "order", "_sorted")

    def __init__(self, coeffs=None, order: int = 0):
        if order < 0:
            raise ValueError("order must be non-negative")
        self.order = int(order)
        terms: dict[int, object] = {}
        for (eu, ew, eq), c in (coeffs or {}).items():
            if eu < 0 or eq < 0:
                raise ValueError(f"negative U/Q exponent in {(eu, ew, eq)}")
            if eu + eq > order or c == 0:
                continue
            k = _pack(eu, ew, eq)
            terms[k] = _norm(terms.get(k, 0) + _as_rational(c))
            if terms[k] == 0:
                del terms[k]
        self._terms = terms
        self._sorted = None

    @classmethod
    def _raw(cls, terms: dict, order: int) -> QSeries:
        s = cls.__new__(cls)
        s._terms = terms
        s.order = order
        s._sorted = None
        return s

    @classmethod
    def one(cls, order: int) -> QSeries:
        return cls._raw({0: 1}, order)

    @classmethod
    def zero(cls, order: int) -> QSeries:
        return cls._raw({}, order)

    @classmethod
    def monomial(cls, eu: int, ew: int, eq: int, order: int, coeff=1) -> QSeries:
        return cls({(eu, ew, eq): coeff}, order)

    # -- access -----------------------------------------------------------
    @property
    def coeffs(self) -> dict[tuple[int, int, int], object]:
        return {_unpack(k): c for k, c in self._terms.items()}

    def __getitem__(self, exps: tuple[int, int, int]):
        return self._terms.get(_pack(*exps), 0)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def constant_term(self):
        return self._terms.get(0, 0)

    def items(self):
        return sorted(self.coeffs.items())

    def _by_degree(self):
        # (degree, key, coeff) sorted by degree, cached
        if self._sorted is None:
            lst = []
            for k, c in self._terms.items():
                eu, _, eq = _unpack(k)
                lst.append((eu + eq, k, c))
            lst.sort(key=lambda t: t[0])
            self._sorted = ([t[0] for t in lst], [t[1] for t in lst], [t[2] for t in lst])
        return self._sorted

    # -- ring operations --------------------------------------------------
    def truncate(self, order: int) -> QSeries:
        if order > self.order:
            raise ValueError(f"cannot raise truncation order {self.order} to {order}")
        if order == self.order:
            return self
        degs, keys, cs = self._by_degree()
        stop = bisect_right(degs, order)
        return QSeries._raw(dict(zip(keys[:stop], cs[:stop])), order)

    def __add__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries._raw({0: _as_rational(other)} if other else {}, self.order)
        order = min(self.order, other.order)
        a, b = self.truncate(order), other.truncate(order)
        out = dict(a._terms)
        for k, c in b._terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = _norm(v)
            else:
                out.pop(k, None)
        return QSeries._raw(out, order)

    __radd__ = __add__

    def __neg__(self):
        return QSeries._raw({k: -c for k, c in self._terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> QSeries:
        c = _as_rational(c)
        if c == 0:
            return QSeries.zero(self.order)
        return QSeries._raw({k: _norm(v * c) for k, v in self._terms.items()}, self.order)

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        return series_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, c):
        if isinstance(c, QSeries):
            raise TypeError("series division is not supported")
        return self.scale(Fraction(1) / _as_rational(c))

    def __pow__(self, k: int):
        return series_pow(self, k)

    def __eq__(self, other):
        if isinstance(other, QSeries):
            order = min(self.order, other.order)
            return self.truncate(order)._terms == other.truncate(order)._terms
        if other == 0:
            return self.is_zero()
        return NotImplemented

    def __hash__(self):
        return hash((self.order, frozenset(self._terms.items())))

    def swap_uq(self) -> QSeries:
        """Exchange the roles of U and Q (i.e. tau1 and tau4)."""
        return QSeries._raw(
            {_pack(eq, ew, eu): c for (eu, ew, eq), c in self.coeffs.items()}, self.order
        )

    def first_difference(self, other: QSeries):
        """Smallest monomial where the two series differ, or None."""
        d = self - other
        if d.is_zero():
            return None
        return min(d.coeffs.items(), key=lambda kv: (kv[0][0] + kv[0][2], kv[0]))

    def evaluate(self, tau1: complex, tau2: complex, tau4: complex) -> complex:
        """Numerically evaluate the retained terms at a point of H_2."""
        import cmath

        u = cmath.exp(1j * math.pi * tau1 / 4)
        w = cmath.exp(1j * math.pi * tau2 / 2)
        q = cmath.exp(1j * math.pi * tau4 / 4)
        total = 0j
        for (eu, ew, eq), c in self.coeffs.items():
            total += float(c) * u**eu * w**ew * q**eq
        return total

    # -- serialization ----------------------------------------------------
    def dumps(self) -> str:
        lines = []
        for (eu, ew, eq), c in self.items():
            c = Fraction(c)
            lines.append(f"{eu} {ew} {eq} {c.numerator}/{c.denominator}")
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def loads(cls, text: str, order: int) -> QSeries:
        coeffs = {}
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            eu, ew, eq, c = line.split()
            coeffs[(int(eu), int(ew), int(eq))] = Fraction(c)
        return cls(coeffs, order)

    def __repr__(self) -> str:
        head = ", ".join(f"{k}: {v}" for k, v in self.items()[:6])
        more = "" if len(self) <= 6 else f", ... ({len(self)} terms)"
        return f"QSeries(order={self.order}, {{{head}{more}}})"


def _as_rational(c):
    if isinstance(c, (int, Fraction)):
        return c
    if isinstance(c, Rational):
        return Fraction(c.numerator, c.denominator)
    raise TypeError(f"series coefficients must be exact rationals, got {type(c).__name__}")


def series_add(a: QSeries, b: QSeries) -> QSeries:
    return a + b


def series_mul(a: QSeries, b: QSeries) -> QSeries:
    order = min(a.order, b.order)
    if len(a) > len(b):
        a, b = b, a
    adeg, akeys, acs = a._by_degree()
    bdeg, bkeys, bcs = b._by_degree()
    out: dict[int, object] = {}
    get = out.get
    for da, ka, ca in zip(adeg, akeys, acs):
        if da > order:
            break
        stop = bisect_right(bdeg, order - da)
        for kb, cb in zip(bkeys[:stop], bcs[:stop]):
            k = ka + kb
            out[k] = get(k, 0) + ca * cb
    return QSeries._raw({k: _norm(v) for k, v in out.items() if v}, order)


def series_pow(a: QSeries, k: int) -> QSeries:
    if not isinstance(k, int) or k < 0:
        raise ValueError("exponent must be a non-negative integer")
    if k == 0:
        return QSeries.one(a.order)
    result = None
    base = a
    while k:
        if k & 1:
            result = base if result is None else result * base
        k >>= 1
        if k:
            base = base * base
    return result


# -- theta constants --------------------------------------------------------

def _lattice_terms(m: ThetaChar, order: int):
    """Yield ((eU, eW, eQ), sign) over lattice points x = n + a with the degree in range."""
    m1, m2, m3, m4 = m.m
    # with x = (2n + m)/2 the exponents are (y1^2, y1*y2, y2^2) for y = 2n + m
    r = math.isqrt(order) + 1
    for y1 in range(-r - m1, r + 1):
        if (y1 - m1) % 2:
            continue
        for y2 in range(-r - m2, r + 1):
            if (y2 - m2) % 2:
                continue
            if y1 * y1 + y2 * y2 > order:
                continue
            # e^{2 i pi x.b} with x.b = (y1*m3 + y2*m4)/4
            # phase is even for even m and odd for odd m; in the odd case the
            # common factor i is stripped
            phase = (y1 * m3 + y2 * m4) % 4
            yield (y1 * y1, y1 * y2, y2 * y2), (1 if phase in (0, 1) else -1)


@lru_cache(maxsize=64)
def _theta_cached(m: ThetaChar, order: int) -> QSeries:
    coeffs: dict = {}
    for exps, s in _lattice_terms(m, order):
        coeffs[exps] = coeffs.get(exps, 0) + s
    return QSeries(coeffs, order)


def theta_truncation_bound(order: int, lam: float) -> float:
    """Bound on |Theta_m - truncation at order| when Im tau >= lam (in the Loewner order).

    The order-N series keeps exactly the lattice points with |x|^2 <= N/4.
    A disc of radius t holds at most (2t + 2)^2 points of Z^2 + a, so shell
    k >= 0 (radii in [rho + k, rho + k + 1)) contributes at most
    (2 rho + 2k + 4)^2 exp(-pi lam (rho + k)^2).
    """
    rho = math.sqrt(order) / 2
    total, k = 0.0, 0
    while True:
        term = (2 * rho + 2 * k + 4) ** 2 * math.exp(-math.pi * lam * (rho + k) ** 2)
        total += term
        if k > 0 and term < total * 1e-17:
            return total * (1 + 1e-12)
        k += 1


def theta_qexp(m, order: int, allow_odd: bool = False) -> QSeries:
    """Fourier expansion of Theta_{a,b}(0, tau) for a characteristic of level two.

    The factor ``e^{-i pi a.b}`` is left out, which keeps every coefficient
    equal to a rational integer; the h-forms are built from this function.
    With ``allow_odd`` an odd characteristic is accepted and the result is
    the series divided by i (its lattice terms are purely imaginary).
    """
    m = ThetaChar.parse(m)
    if order < 1:
        raise ValueError("order must be at least 1")
    if not m.is_even and not allow_odd:
        raise ValueError(f"characteristic {m} is odd; its theta constant vanishes identically")
    return _theta_cached(m, order)


def lattice_theta(m, order: int) -> QSeries:
    """Independent brute-force expansion (used as an oracle in tests)."""
    m = ThetaChar.parse(m)
    a1, a2 = m.a
    b1, b2 = m.b
    r = math.isqrt(order) + 3
    coeffs: dict = {}
    for n1 in range(-r, r + 1):
        for n2 in range(-r, r + 1):
            x1, x2 = n1 + a1, n2 + a2
            e = (4 * x1 * x1, 4 * x1 * x2, 4 * x2 * x2)
            if e[0] + e[2] > order:
                continue
            phase = (x1 * b1 + x2 * b2) % 1
            s = 1 if phase == 0 else -1
            key = tuple(int(v) for v in e)
            coeffs[key] = coeffs.get(key, 0) + s
    return QSeries(coeffs, order)


# -- h-forms and symmetric functions ----------------------------------------

@lru_cache(maxsize=8)
def theta_powers(order: int, k: int) -> tuple[QSeries, ...]:
    """Theta_m^k for the ten even characteristics, in the standard order."""
    if k == 1:
        return tuple(theta_qexp(m, order) for m in EVEN_CHARS)
    if k % 2 == 0:
        half = theta_powers(order, k // 2)
        return tuple(t * t for t in half)
    base = theta_powers(order, 1)
    prev = theta_powers(order, k - 1)
    return tuple(t * s for t, s in zip(base, prev))


def h6_signs() -> dict[tuple, int]:
    """Signs of the syzygous triples entering h6 (see ``h6sign`` module)."""
    from .h6sign import syzygous_signs

    return syzygous_signs()


@lru_cache(maxsize=8)
def hforms_qexp(order: int) -> tuple[QSeries, QSeries, QSeries, QSeries]:
    """The four generators (h4, h6, h10, h12) as exact series."""
    if order < 4:
        raise ValueError("order must be at least 4")
    x = dict(zip(EVEN_CHARS, theta_powers(order, 4)))
    t8 = theta_powers(order, 8)
    t2 = theta_powers(order, 2)

    h4 = sum(t8[1:], t8[0]) / 2

    signs = h6_signs()
    h6 = QSeries.zero(order)
    for tri in syzygous_triples():
        s = signs[tri]
        term = x[tri[0]] * x[tri[1]] * x[tri[2]]
        h6 = h6 + (term if s > 0 else -term)

    prod = t2[0]
    for t in t2[1:]:
        prod = prod * t
    h10 = prod * 2

    h12 = QSeries.zero(order)
    for c in gopel_quadruples():
        term = None
        for m in EVEN_CHARS:
            if m not in c:
                term = x[m] if term is None else term * x[m]
        h12 = h12 + term
    h12 = h12 / 2
    return h4, h6, h10, h12


@lru_cache(maxsize=8)
def _sigmas(order: int) -> tuple[QSeries, ...]:
    xs = theta_powers(order, 8)
    e = [QSeries.one(order)] + [QSeries.zero(order)] * 10
    for k, x in enumerate(xs, start=1):
        for i in range(k, 0, -1):
            e[i] = e[i] + x * e[i - 1]
    return tuple(e)


def sigma_qexp(i: int, order: int) -> QSeries:
    """i-th elementary symmetric function of the ten series Theta_m^8."""
    if not 1 <= i <= 10:
        raise ValueError("i must lie in 1..10")
    if order < 4:
        raise ValueError("order must be at least 4")
    return _sigmas(order)[i]


# -- verification reports ------------------------------------------------------

def eval_h_polynomial(terms, hs, order: int) -> QSeries:
    """Evaluate sum c * h4^a h6^b h10^c h12^d on series (hs in that order)."""
    cache: dict = {}

    def power(idx, k):
        if (idx, k) not in cache:
            cache[(idx, k)] = hs[idx] ** k
        return cache[(idx, k)]

    total = QSeries.zero(order)
    for c, exps in terms:
        mono = QSeries.one(order)
        for idx, k in enumerate(exps):
            if k:
                mono = mono * power(idx, k)
        total = total + mono * c
    return total


def _diff_entry(lhs: QSeries, rhs: QSeries):
    d = lhs.first_difference(rhs)
    if d is None:
        return None
    (eu, ew, eq), _ = d
    return {
        "monomial": [eu, ew, eq],
        "series": str(Fraction(lhs[(eu, ew, eq)])),
        "formula": str(Fraction(rhs[(eu, ew, eq)])),
    }


def verify_sigma_identities(order: int = 64, table: str = "printed") -> list[dict]:
    """Compare each Sigma_i with its polynomial in (h4, h6, h10, h12).

    ``table`` is "printed" (coefficients as published) or "corrected".
    """
    from .identities import SIGMA_CORRECTED, SIGMA_PRINTED, unbalanced_terms

    formulas = {"printed": SIGMA_PRINTED, "corrected": SIGMA_CORRECTED}[table]
    hs = hforms_qexp(order)
    report = []
    for i in range(1, 11):
        lhs = sigma_qexp(i, order)
        rhs = eval_h_polynomial(formulas[i], hs, order)
        diff = _diff_entry(lhs, rhs)
        entry = {
            "identity": f"Sigma_{i}",
            "status": "pass" if diff is None else "fail",
            "order": order,
            "terms_checked": len(lhs),
            "first_difference": diff,
        }
        bad = unbalanced_terms(i, formulas)
        if bad:
            entry["weight_unbalanced_terms"] = [list(e) for _, e in bad]
        report.append(entry)
    return report


VDG_LINEAR = (
    (("1000", 1), ("1100", -1), ("1111", 1), ("1001", -1)),
    (("0000", 1), ("0001", -1), ("0110", -1), ("1100", -1)),
    (("0110", 1), ("0010", -1), ("1111", 1), ("0011", 1)),
    (("0100", 1), ("0000", -1), ("1001", 1), ("0011", 1)),
    (("0100", 1), ("1000", -1), ("0001", 1), ("0010", -1)),
)


def _linear_form(rel, x, order):
    out = QSeries.zero(order)
    for s, c in rel:
        out = out + x[ThetaChar.parse(s)] * c
    return out


def verify_vdg_relations(order: int = 16) -> list[dict]:
    """Linear relations and the quartic among x_m = Theta_m^4.

    The five linear relations are checked as published, followed by the
    corrected third relation and the sign-flipped first relation (which must
    not vanish).
    """
    if order < 1:
        raise ValueError("order must be positive")
    x = dict(zip(EVEN_CHARS, theta_powers(order, 4)))
    report = []
    for k, rel in enumerate(VDG_LINEAR, start=1):
        val = _linear_form(rel, x, order)
        report.append({
            "relation": f"linear_{k}",
            "expression": " ".join(f"{'+' if c > 0 else '-'}x{s}" for s, c in rel),
            "status": "pass" if val.is_zero() else "fail",
            "expect_zero": True,
            "nonzero_terms": len(val),
        })
    sq = [v * v for v in x.values()]
    s2 = sum(sq[1:], sq[0])
    s4 = sum((v * v for v in sq[1:]), sq[0] * sq[0])
    quartic = s2 * s2 - s4 * 4
    report.append({
        "relation": "quartic",
        "expression": "(sum x^2)^2 - 4 sum x^4",
        "status": "pass" if quartic.is_zero() else "fail",
        "expect_zero": True,
        "nonzero_terms": len(quartic),
    })
    # exact null space of the ten series puts the opposite sign on x1111 here
    fixed = tuple((s, -c) if s == "1111" else (s, c) for s, c in VDG_LINEAR[2])
    val = _linear_form(fixed, x, order)
    report.append({
        "relation": "linear_3_corrected",
        "expression": " ".join(f"{'+' if c > 0 else '-'}x{s}" for s, c in fixed),
        "status": "pass" if val.is_zero() else "fail",
        "expect_zero": True,
        "nonzero_terms": len(val),
    })
    flipped = tuple((s, -c) if s == "1111" else (s, c) for s, c in VDG_LINEAR[0])
    val = _linear_form(flipped, x, order)
    report.append({
        "relation": "linear_1_sign_flipped",
        "expression": " ".join(f"{'+' if c > 0 else '-'}x{s}" for s, c in flipped),
        "status": "pass" if not val.is_zero() else "fail",
        "expect_zero": False,
        "nonzero_terms": len(val),
    })
    return report


def _proportional(a: QSeries, b: QSeries) -> bool:
    ta, tb = a._terms, b._terms
    if set(ta) != set(tb):
        return False
    if not ta:
        return True
    k0 = next(iter(ta))
    r = Fraction(ta[k0]) / Fraction(tb[k0])
    return all(Fraction(ta[k]) == r * tb[k] for k in ta)


def verify_char_classification(order: int = 8) -> dict:
    from .characteristics import ALL_CHARS, ODD_CHARS

    series = {m: theta_qexp(m, order, allow_odd=True) for m in ALL_CHARS}
    entries = []
    for m in ALL_CHARS:
        entries.append({
            "char": str(m),
            "parity": "even" if m.is_even else "odd",
            "zero_series": series[m].is_zero(),
            "constant_term": str(series[m].constant_term()),
        })
    odd_zero = [str(m) for m in ALL_CHARS if series[m].is_zero()]
    proportional_pairs = [
        [str(a), str(b)]
        for i, a in enumerate(EVEN_CHARS)
        for b in EVEN_CHARS[i + 1:]
        if _proportional(series[a], series[b])
    ]
    ok = (
        sorted(odd_zero) == sorted(str(m) for m in ODD_CHARS)
        and not proportional_pairs
        and all(not series[m].is_zero() for m in EVEN_CHARS)
    )
    return {
        "status": "pass" if ok else "fail",
        "order": order,
        "zero_series": odd_zero,
        "proportional_even_pairs": proportional_pairs,
        "characteristics": entries,
    }
