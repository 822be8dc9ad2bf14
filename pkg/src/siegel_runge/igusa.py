"""Igusa invariants of genus-2 curves and the integrality tests for reduction type.

The invariants of y^2 = f(x) come from Clebsch's transvectant invariants
A, B, C, D of the binary sextic, converted to Igusa-Clebsch I2..I10 and then to
the Igusa J2..J10. ``igusa_clebsch_from_roots`` is an independent numerical
route through root differences, used as a cross-check.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import comb, factorial

from . import arith
from .arith import QQ, FieldSpec, Place, QuadElement

# -- binary forms -----------------------------------------------------------------
# a form of degree n is a list a[0..n] meaning sum a_i x^(n-i) y^i


def _dx(f):
    n = len(f) - 1
    return [f[i] * (n - i) for i in range(n)]


def _dy(f):
    return [f[i] * i for i in range(1, len(f))]


def _mul(f, g):
    out = [Fraction(0)] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return out


def transvectant(f, g, k: int):
    """k-th transvectant (f, g)_k with the normalisation (n-k)!(m-k)!/(n! m!)."""
    n, m = len(f) - 1, len(g) - 1
    if k > min(n, m):
        raise ValueError("transvectant order exceeds a degree")
    out = [Fraction(0)] * (n + m - 2 * k + 1)
    for j in range(k + 1):
        a = f
        for _ in range(k - j):
            a = _dx(a)
        for _ in range(j):
            a = _dy(a)
        b = g
        for _ in range(j):
            b = _dx(b)
        for _ in range(k - j):
            b = _dy(b)
        s = (-1) ** j * comb(k, j)
        for i, c in enumerate(_mul(a, b)):
            out[i] += s * c
    scale = Fraction(factorial(n - k) * factorial(m - k), factorial(n) * factorial(m))
    return [scale * c for c in out]


# -- curves -------------------------------------------------------------------------

class SingularCurveError(ValueError):
    pass


@dataclass(frozen=True)
class CurveSextic:
    """y^2 = c0 + c1 x + ... + c6 x^6 with exact rational coefficients."""

    coeffs: tuple

    def __post_init__(self):
        cs = tuple(Fraction(c) for c in self.coeffs)
        if len(cs) > 7 or any(c for c in cs[7:]):
            raise ValueError("degree exceeds 6")
        cs = cs + (Fraction(0),) * (7 - len(cs))
        object.__setattr__(self, "coeffs", cs)
        if self.degree not in (5, 6):
            raise SingularCurveError(f"degree {self.degree} polynomial does not define a genus-2 curve")
        if igusa_clebsch(self)[3] == 0:
            raise SingularCurveError("discriminant vanishes")

    @classmethod
    def from_json(cls, obj) -> CurveSextic:
        if not isinstance(obj, dict) or "f" not in obj:
            raise ValueError('curve JSON must be {"f": [c0, ..., c6]}')
        return cls(tuple(Fraction(str(c)) for c in obj["f"]))

    def to_json(self) -> dict:
        return {"f": [_fmt(c) for c in self.coeffs]}

    @property
    def degree(self) -> int:
        for i in range(6, -1, -1):
            if self.coeffs[i]:
                return i
        return -1

    def binary_form(self):
        # homogenise F(x, z) = sum c_i x^i z^(6-i); a quintic gets a root at infinity
        return list(reversed(self.coeffs))

    def scaled(self, mu) -> CurveSextic:
        return CurveSextic(tuple(Fraction(mu) * c for c in self.coeffs))


def _fmt(c: Fraction):
    c = Fraction(c)
    return int(c) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def clebsch_invariants(curve: CurveSextic):
    f = curve.binary_form()
    i = transvectant(f, f, 4)
    delta = transvectant(i, i, 2)
    y1 = transvectant(f, i, 4)
    y2 = transvectant(i, y1, 2)
    y3 = transvectant(i, y2, 2)
    A = transvectant(f, f, 6)[0]
    B = transvectant(i, i, 4)[0]
    C = transvectant(i, delta, 4)[0]
    D = transvectant(y3, y1, 2)[0]
    return A, B, C, D


def igusa_clebsch(curve: CurveSextic):
    """(I2, I4, I6, I10); I10 is the discriminant of the binary sextic."""
    A, B, C, D = clebsch_invariants(curve)
    I2 = -120 * A
    I4 = -720 * A**2 + 6750 * B
    I6 = 8640 * A**3 - 108000 * A * B + 202500 * C
    I10 = (-62208 * A**5 + 972000 * A**3 * B + 1620000 * A**2 * C
           - 3037500 * A * B**2 - 6075000 * B * C - 4556250 * D)
    return I2, I4, I6, I10


def igusa_clebsch_from_roots(coeffs, dps: int = 50):
    """Igusa-Clebsch invariants from root differences (numerical, mpmath).

    Sums run over all of S_6 and are divided by the stabiliser orders.
    A quintic is first moved by (x, z) -> (s x + z, x), which has determinant
    -1 and leaves the even-degree invariants unchanged.
    """
    import mpmath

    cs = [Fraction(c) for c in coeffs] + [Fraction(0)] * (7 - len(coeffs))
    if cs[6] == 0:
        s = next(s for s in itertools.count(1) if sum(c * s**i for i, c in enumerate(cs)) != 0)
        # G(x, z) = F(s x + z, x) = sum c_i (s x + z)^i x^(6-i)
        g = [Fraction(0)] * 7
        for i, c in enumerate(cs):
            for j in range(i + 1):
                # (s x + z)^i contributes C(i,j) s^j x^j z^(i-j); times x^(6-i)
                g[j + 6 - i] += c * comb(i, j) * Fraction(s) ** j
        cs = g
    with mpmath.workdps(dps):
        a = mpmath.mpf(cs[6].numerator) / cs[6].denominator
        poly = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(cs)]
        r = mpmath.polyroots(poly, maxsteps=400, extraprec=4 * dps)
        d = [[(r[i] - r[j]) ** 2 for j in range(6)] for i in range(6)]
        s2 = s4 = s6 = 0
        for p in itertools.permutations(range(6)):
            q = lambda i, j: d[p[i]][p[j]]
            t = q(0, 1) * q(1, 2) * q(2, 0) * q(3, 4) * q(4, 5) * q(5, 3)
            s2 += q(0, 1) * q(2, 3) * q(4, 5)
            s4 += t
            s6 += t * q(0, 3) * q(1, 4) * q(2, 5)
        I10 = a**10 * mpmath.fprod(d[i][j] for i in range(6) for j in range(i + 1, 6))
        return (complex(a**2 * s2 / 48), complex(a**4 * s4 / 72),
                complex(a**6 * s6 / 12), complex(I10))


# -- J invariants ---------------------------------------------------------------------

@dataclass(frozen=True)
class JInvariants:
    J2: object
    J4: object
    J6: object
    J8: object
    J10: object

    WEIGHTS = (2, 4, 6, 8, 10)

    def __post_init__(self):
        for name in ("J2", "J4", "J6", "J8", "J10"):
            v = getattr(self, name)
            if not isinstance(v, QuadElement):
                object.__setattr__(self, name, Fraction(v))
        if _is_zero(self.J10):
            raise ValueError("J10 = 0")

    @classmethod
    def of(cls, values) -> JInvariants:
        return cls(*values)

    def as_tuple(self):
        return (self.J2, self.J4, self.J6, self.J8, self.J10)

    def relation_holds(self) -> bool:
        return 4 * self.J8 == self.J2 * self.J6 - self.J4 * self.J4

    def scaled(self, lam) -> JInvariants:
        return JInvariants(*(lam**w * j for w, j in zip(self.WEIGHTS, self.as_tuple())))

    def to_json(self) -> dict:
        return {n: str(v) if isinstance(v, QuadElement) else _fmt(v)
                for n, v in zip(("J2", "J4", "J6", "J8", "J10"), self.as_tuple())}


def _is_zero(x) -> bool:
    return x.is_zero() if isinstance(x, QuadElement) else x == 0


def j_from_igusa_clebsch(I2, I4, I6, I10) -> JInvariants:
    J2 = Fraction(I2) / 8
    J4 = (4 * J2**2 - I4) / 96
    J6 = (8 * J2**3 - 160 * J2 * J4 - I6) / 576
    J8 = (J2 * J6 - J4**2) / 4
    J10 = Fraction(I10) / 4096
    return JInvariants(J2, J4, J6, J8, J10)


def igusa_from_sextic(curve) -> JInvariants:
    if not isinstance(curve, CurveSextic):
        curve = CurveSextic(tuple(curve))
    J = j_from_igusa_clebsch(*igusa_clebsch(curve))
    assert J.relation_holds()
    return J


def aux_invariants(J: JInvariants):
    """(I4, I12) in the normalisation where I4 = h4/2 and I12 = (2h4^3 - h6^2)/(2^10 3^3)."""
    J2, J4, J6, J8 = J.J2, J.J4, J.J6, J.J8
    I4 = J2**2 - 24 * J4
    I12 = -8 * J4**3 + 9 * J2 * J4 * J6 - 27 * J6**2 - J2**2 * J8
    return I4, I12


# -- the h-form side ----------------------------------------------------------------

def j_from_h(h4, h6, h10, h12):
    """J2..J10 as functions of the generators; works for numbers or sympy symbols."""
    u = h12 / h10
    J2 = u / 2
    J4 = (u**2 - 2 * h4) / 96
    J6 = (u**3 - 6 * h4 * u + 4 * h6) / 3456
    J8 = (u**4 - 12 * h4 * u**2 + 16 * h6 * u - 12 * h4**2) / 110592
    J10 = h10 / 8192
    return J2, J4, J6, J8, J10


def h_from_j(J: JInvariants):
    """Inverse of ``j_from_h`` on the locus where the J-relation holds."""
    h10 = 8192 * J.J10
    h12 = 2 * J.J2 * h10
    u = 2 * J.J2
    h4 = (u**2 - 96 * J.J4) / 2
    h6 = (3456 * J.J6 - u**3 + 6 * h4 * u) / 4
    return h4, h6, h10, h12


P48_TERMS = (
    (1, (0, 0, 0, 4)),
    (-12, (1, 0, 2, 2)),
    (16, (0, 1, 3, 1)),
    (-12, (2, 0, 4, 0)),
)


def p48_qexp(order: int):
    """P48 = h12^4 - 12 h4 h12^2 h10^2 + 16 h6 h12 h10^3 - 12 h4^2 h10^4 as a series."""
    from .qseries import eval_h_polynomial, hforms_qexp

    if order < 12:
        raise ValueError("order must be at least 12")
    return eval_h_polynomial([(Fraction(c), e) for c, e in P48_TERMS], hforms_qexp(order), order)


def p48_from_h(vh4, vh6, vh10, vh12, v2=1):
    """Term-wise lower bound for v(P48) from valuations of the generators."""
    vals = (vh4, vh6, vh10, vh12)
    best = math.inf
    for c, e in P48_TERMS:
        v = Fraction(arith.factorize(abs(c)).get(2, 0)) * v2
        for k, x in zip(e, vals):
            if k:
                v = v + k * x
        best = min(best, v)
    return best


def symbolic_h_identities() -> dict:
    """Check with sympy that the J(h) substitution gives the stated h-identities."""
    import sympy as sp

    h4, h6, h10, h12 = sp.symbols("h4 h6 h10 h12")
    J2, J4, J6, J8, J10 = j_from_h(h4, h6, h10, h12)
    I4 = J2**2 - 24 * J4
    I12 = -8 * J4**3 + 9 * J2 * J4 * J6 - 27 * J6**2 - J2**2 * J8
    p48 = sum(c * h4**e[0] * h6**e[1] * h10**e[2] * h12**e[3] for c, e in P48_TERMS)
    return {
        "I4": sp.simplify(I4 - h4 / 2) == 0,
        "I12": sp.simplify(I12 - (2 * h4**3 - h6**2) / (2**10 * 3**3)) == 0,
        "J8_relation": sp.simplify(4 * J8 - (J2 * J6 - J4**2)) == 0,
        "P48": sp.simplify(2**12 * 3**3 * h10**4 * J8 - p48) == 0,
    }


def series_h_identities(order: int = 48, include_i12: bool = False) -> dict:
    """The I4, I12, J8 and P48 identities on q-expansions, denominators cleared.

    With N_k = h10^(k/2) J_k(h) (polynomials in the generators):
    N2^2 - 24 N4 = h4 h10^2 / 2 and
    -8 N4^3 + 9 N2 N4 N6 - 27 N6^2 - N2^2 N8 = (2 h4^3 - h6^2) h10^6 / (2^10 3^3).
    The second only sees nonzero terms once the order exceeds 6 * 16 + 8
    (h10 starts in degree 16, 2 h4^3 - h6^2 in degree 8).
    """
    from .qseries import hforms_qexp

    h4, h6, h10, h12 = hforms_qexp(order)
    h10_2 = h10 * h10
    N2 = h12 / 2
    N4 = (h12 * h12 - h4 * h10_2 * 2) / 96
    N6 = (h12 * h12 * h12 - h4 * h12 * h10_2 * 6 + h6 * h10_2 * h10 * 4) / 3456
    N8 = (h12**4 - h4 * h12 * h12 * h10_2 * 12 + h6 * h12 * h10_2 * h10 * 16
          - h4 * h4 * h10_2 * h10_2 * 12) / 110592
    out = {
        "I4": N2 * N2 - N4 * 24 == h4 * h10_2 / 2,
        "J8_relation": N8 * 4 == N2 * N6 - N4 * N4,
        "P48": N8 * (2**12 * 3**3) == p48_qexp(order),
        "order": order,
    }
    if include_i12:
        lhs = N4 * N4 * N4 * (-8) + N2 * N4 * N6 * 9 - N6 * N6 * 27 - N2 * N2 * N8
        rhs = (h4 * h4 * h4 * 2 - h6 * h6) * (h10_2 * h10_2 * h10_2) / (2**10 * 3**3)
        out["I12"] = lhs == rhs
        out["I12_nonvacuous"] = not rhs.is_zero()
    return out


# -- reduction type at finite places ------------------------------------------------

class Reduction(str, Enum):
    GOOD_JACOBIAN = "GoodJacobian"
    GOOD_PRODUCT = "GoodProduct"


WITNESS_NAMES = ("J2^5/J10", "J4^5/J10^2", "J6^5/J10^3", "J8^5/J10^4")


def _as_place(place, K: FieldSpec) -> Place:
    if isinstance(place, Place):
        return place
    ps = arith.primes_above(int(place), K)
    if len(ps) != 1:
        raise ValueError(f"{place} splits in {K}; pass a prime ideal")
    return ps[0]


def _field_of(J: JInvariants) -> FieldSpec:
    ds = {x.d for x in J.as_tuple() if isinstance(x, QuadElement) and x.d is not None}
    if len(ds) > 1:
        raise ValueError("J-invariants lie in different fields")
    return FieldSpec(ds.pop()) if ds else QQ


def witnesses(J: JInvariants, place) -> tuple:
    """Valuations of J2k^5 / J10^k (k = 1..4); a zero numerator counts as +inf."""
    K = _field_of(J) if not isinstance(place, Place) else place.field
    P = _as_place(place, K)
    v10 = arith.valuation(J.J10, P)
    out = []
    for k, x in enumerate((J.J2, J.J4, J.J6, J.J8), start=1):
        if _is_zero(x):
            out.append(math.inf)
        else:
            out.append(5 * arith.valuation(x, P) - k * v10)
    return tuple(out)


def good_jacobian_test(J: JInvariants, place):
    w = witnesses(J, place)
    return all(x >= 0 for x in w), w


@dataclass
class PlaceClass:
    place: Place
    classification: Reduction
    witnesses: tuple
    h_route_witnesses: tuple | None = None

    @property
    def routes_agree(self) -> bool:
        return self.h_route_witnesses is None or self.h_route_witnesses == self.witnesses

    def to_json(self) -> dict:
        return {
            "prime": self.place.p,
            "ideal": self.place.key(),
            "classification": self.classification.value,
            "witnesses": {n: _fmt_val(v) for n, v in zip(WITNESS_NAMES, self.witnesses)},
            "routes_agree": self.routes_agree,
        }


def _fmt_val(v):
    if v == math.inf:
        return "inf"
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def _rational_parts(x):
    """Integers whose prime divisors cover every place where x can have nonzero valuation."""
    if isinstance(x, QuadElement):
        n = x.norm()
        return [n.numerator, n.denominator, x.denominator()]
    x = Fraction(x)
    return [x.numerator, x.denominator]


def candidate_primes(J: JInvariants, trial_bound: int = 10**6, general: bool = True) -> list[int]:
    """Primes where some witness may be negative: those dividing J10 or a denominator of J2k."""
    ints = list(_rational_parts(J.J10))
    for x in (J.J2, J.J4, J.J6, J.J8):
        if not _is_zero(x):
            parts = _rational_parts(x)
            ints.extend(parts[1:])
    primes = set()
    for n in ints:
        if abs(n) > 1:
            primes.update(arith.factorize(n, trial_bound, general))
    return sorted(primes)


def _h_route_witnesses(J: JInvariants, P: Place):
    # rebuild J from the generator values and rerun the quotients
    h4, h6, h10, h12 = h_from_j(J)
    J2, J4, J6, J8, J10 = j_from_h(h4, h6, h10, h12)
    return witnesses(JInvariants(J2, J4, J6, J8, J10), P)


def classify_places(J: JInvariants, field=None, assume_potentially_good: bool = True,
                    trial_bound: int = 10**6, general: bool = True, both_routes: bool = True):
    """Classify the candidate places of K; returns (places, s_P).

    Under the potentially-good hypothesis a place is GoodProduct exactly when
    the jacobian integrality test fails there. Every place outside the
    candidate list passes the test.
    """
    if not assume_potentially_good:
        raise ValueError("classification requires potentially good reduction everywhere")
    K = FieldSpec.parse(field) if field is not None else _field_of(J)
    out = []
    for p in candidate_primes(J, trial_bound, general):
        for P in arith.primes_above(p, K):
            ok, w = good_jacobian_test(J, P)
            hw = _h_route_witnesses(J, P) if both_routes and J.relation_holds() else None
            out.append(PlaceClass(P, Reduction.GOOD_JACOBIAN if ok else Reduction.GOOD_PRODUCT, w, hw))
    s_P = sum(1 for pc in out if pc.classification is Reduction.GOOD_PRODUCT)
    return out, s_P


@dataclass
class ClassificationReport:
    field: FieldSpec
    J: JInvariants
    places: list = field(default_factory=list)
    s_P: int = 0

    def to_json(self) -> dict:
        return {
            "field": str(self.field),
            "J": self.J.to_json(),
            "J_relation_holds": self.J.relation_holds(),
            "places": [pc.to_json() for pc in self.places],
            "s_P": self.s_P,
        }


def classify_curve(curve: CurveSextic, field=QQ, **kw) -> ClassificationReport:
    J = igusa_from_sextic(curve)
    places, s = classify_places(J, field, **kw)
    return ClassificationReport(FieldSpec.parse(field), J, places, s)
