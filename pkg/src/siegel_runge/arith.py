"""Arithmetic over Q and the Euclidean imaginary quadratic fields.

Elements are ``a + b*sqrt(d)`` with rational a, b. The rings of integers are
norm-Euclidean for d in {-1, -2, -3, -7, -11}, so content ideals of coordinate
tuples are principal and computed by a gcd. Valuations at a prime ideal P are
integers ord_P; the matching absolute value is |x|_P = p^(-ord_P(x)/e_P), which
extends |.|_p, and the local degree is n_P = e_P f_P.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from sympy.ntheory import sqrt_mod

SUPPORTED_D = (-1, -2, -3, -7, -11)


class FactorizationError(RuntimeError):
    pass


# -- fields and elements -----------------------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    d: int | None = None  # None for Q

    def __post_init__(self):
        if self.d is not None and self.d not in SUPPORTED_D:
            raise ValueError(f"unsupported field Q(sqrt({self.d})); choose d in {SUPPORTED_D}")

    @classmethod
    def parse(cls, s) -> FieldSpec:
        if isinstance(s, FieldSpec):
            return s
        if s in (None, "Q", "QQ", "rationals"):
            return cls(None)
        if isinstance(s, int):
            return cls(s)
        m = re.fullmatch(r"Q\(sqrt\((-?\d+)\)\)", str(s).replace(" ", ""))
        if m:
            return cls(int(m.group(1)))
        raise ValueError(f"cannot parse field {s!r}")

    @property
    def degree(self) -> int:
        return 1 if self.d is None else 2

    @property
    def is_rational(self) -> bool:
        return self.d is None

    @property
    def discriminant(self) -> int:
        if self.d is None:
            return 1
        return self.d if self.d % 4 == 1 else 4 * self.d

    def __str__(self):
        return "Q" if self.d is None else f"Q(sqrt({self.d}))"

    def element(self, a, b=0) -> QuadElement:
        return QuadElement(Fraction(a), Fraction(b), self.d)

    def omega(self) -> QuadElement:
        """Generator of the ring of integers over Z."""
        if self.d is None:
            return self.element(1)
        if self.d % 4 == 1:
            return self.element(Fraction(1, 2), Fraction(1, 2))
        return self.element(0, 1)


QQ = FieldSpec(None)


@dataclass(frozen=True)
class QuadElement:
    a: Fraction
    b: Fraction
    d: int | None

    def __post_init__(self):
        if self.d is None and self.b != 0:
            raise ValueError("irrational part in Q")

    @property
    def field(self) -> FieldSpec:
        return FieldSpec(self.d)

    def _coerce(self, other) -> QuadElement:
        if isinstance(other, QuadElement):
            if other.d != self.d and other.b != 0 and self.b != 0:
                raise ValueError("elements of different fields")
            if other.d != self.d and other.b == 0:
                return QuadElement(other.a, Fraction(0), self.d)
            return other
        return QuadElement(Fraction(other), Fraction(0), self.d)

    def _d_of(self, other: QuadElement):
        return self.d if self.d is not None else other.d

    def __add__(self, other):
        o = self._coerce(other)
        return QuadElement(self.a + o.a, self.b + o.b, self._d_of(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadElement(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        d = self._d_of(o)
        dd = d if d is not None else 0
        return QuadElement(self.a * o.a + dd * self.b * o.b, self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def conj(self) -> QuadElement:
        return QuadElement(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        dd = self.d if self.d is not None else 0
        return self.a * self.a - dd * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a if self.d is not None else self.a

    def inverse(self) -> QuadElement:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conj()
        return QuadElement(c.a / n, c.b / n, self.d)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = QuadElement(Fraction(1), Fraction(0), self.d)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except (ValueError, TypeError):
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def to_complex(self) -> complex:
        if self.d is None:
            return complex(float(self.a))
        return complex(float(self.a), 0) + float(self.b) * complex(0, math.sqrt(-self.d))

    def is_integral(self) -> bool:
        # minimal polynomial x^2 - tr x + N has integer coefficients
        if self.d is None:
            return self.a.denominator == 1
        return self.trace().denominator == 1 and self.norm().denominator == 1

    def denominator(self) -> int:
        """Smallest positive integer n with n*x integral."""
        n = math.lcm(self.a.denominator, self.b.denominator)
        for k in sorted(_divisors(n)):
            if (self * k).is_integral():
                return k
        return n

    def __str__(self):
        if self.d is None or self.b == 0:
            return f"{self.a.numerator}/{self.a.denominator}"
        sign = "+" if self.b >= 0 else "-"
        b = abs(self.b)
        return f"{self.a.numerator}/{self.a.denominator}{sign}{b.numerator}/{b.denominator}*sqrt({self.d})"

    __repr__ = __str__


def _divisors(n: int):
    out = set()
    for i in range(1, math.isqrt(n) + 1):
        if n % i == 0:
            out.add(i)
            out.add(n // i)
    return out


_ELEM_RE = re.compile(
    r"^\s*([+-]?\d+(?:/\d+)?)\s*(?:([+-])\s*(\d+(?:/\d+)?)\s*\*\s*sqrt\(\s*(-?\d+)\s*\))?\s*$"
)


def parse_element(s, field: FieldSpec = QQ) -> QuadElement:
    """Parse "a/b" or "a/b+c/d*sqrt(d)" (ints and plain fractions also accepted)."""
    field = FieldSpec.parse(field)
    if isinstance(s, QuadElement):
        return s
    if isinstance(s, (int, Fraction)):
        return field.element(s)
    if isinstance(s, (list, tuple)) and len(s) == 2:
        return field.element(Fraction(str(s[0])), Fraction(str(s[1])))
    m = _ELEM_RE.match(str(s))
    if not m:
        raise ValueError(f"cannot parse field element {s!r}")
    a = Fraction(m.group(1))
    if m.group(2) is None:
        return field.element(a)
    d = int(m.group(4))
    if field.d != d:
        raise ValueError(f"element {s!r} does not lie in {field}")
    b = Fraction(m.group(3)) * (1 if m.group(2) == "+" else -1)
    return field.element(a, b)


# -- Euclidean structure --------------------------------------------------------------

def _round_integral(x: QuadElement) -> QuadElement:
    """A nearest element of the ring of integers (for the Euclidean algorithm)."""
    K = x.field
    if K.d is None:
        return K.element(round(x.a))
    if K.d % 4 == 1:
        # x = u + v*omega, omega = (1 + sqrt d)/2: v = 2b, u = a - b
        v = 2 * x.b
        best = None
        for vv in (math.floor(v), math.ceil(v)):
            uu = round(x.a - Fraction(vv, 2))
            cand = K.element(Fraction(uu) + Fraction(vv, 2), Fraction(vv, 2))
            n = (x - cand).norm()
            if best is None or n < best[0]:
                best = (n, cand)
        return best[1]
    return K.element(round(x.a), round(x.b))


def divides(a: QuadElement, b: QuadElement) -> bool:
    if a.is_zero():
        return b.is_zero()
    return (b / a).is_integral()


def gcd(a: QuadElement, b: QuadElement) -> QuadElement:
    """A generator of the ideal (a, b) for integral a, b."""
    while not b.is_zero():
        q = _round_integral(a / b)
        r = a - q * b
        if not r.is_zero() and r.norm() >= b.norm():
            raise ArithmeticError("Euclidean step failed; field not norm-Euclidean")
        a, b = b, r
    return a


def content_ideal(xs) -> tuple[QuadElement, int]:
    """(g, n) with (x_i) = (g)/n as fractional ideals; n a positive integer, g integral."""
    xs = [x for x in xs if not x.is_zero()]
    if not xs:
        raise ValueError("zero tuple has no content")
    n = math.lcm(*(x.denominator() for x in xs))
    g = xs[0] * n
    for x in xs[1:]:
        g = gcd(g, x * n)
    return g, n


# -- factorisation ---------------------------------------------------------------------

def factorize(n: int, trial_bound: int = 10**6, general: bool = True) -> dict[int, int]:
    """Prime factorisation of |n| by trial division, then sympy for the cofactor."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f <= trial_bound and f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        if f * f > n:
            out[n] = out.get(n, 0) + 1
        elif not general:
            raise FactorizationError(f"cofactor {n} exceeds the trial-division bound")
        else:
            import sympy

            for p, e in sympy.factorint(n).items():
                out[int(p)] = out.get(int(p), 0) + int(e)
    return dict(sorted(out.items()))


# -- places -------------------------------------------------------------------------------

@dataclass(frozen=True)
class Place:
    """A place of Q or of an imaginary quadratic field.

    Finite places carry the rational prime p, a generator (a, b) of the prime
    ideal, ramification e and residue degree f.
    """

    field: FieldSpec
    p: int | None  # None for the archimedean place
    gen: tuple | None = None
    e: int = 1
    f: int = 1

    @property
    def is_archimedean(self) -> bool:
        return self.p is None

    @property
    def local_degree(self) -> int:
        if self.p is None:
            return self.field.degree  # real place of Q or the complex place
        return self.e * self.f

    @property
    def norm(self) -> int:
        return self.p**self.f

    def generator(self) -> QuadElement:
        return self.field.element(*self.gen)

    def key(self) -> str:
        if self.p is None:
            return "inf"
        if self.field.is_rational:
            return str(self.p)
        return f"({self.generator()})"

    def __str__(self):
        return self.key()


def infinite_place(field=QQ) -> Place:
    return Place(FieldSpec.parse(field), None)


def _prime_generator(K: FieldSpec, p: int) -> QuadElement:
    """Generator of a prime ideal above a split or ramified p: gcd(p, omega - r), r a root mod p."""
    w = K.omega()
    tr, nm = int(w.trace()), int(w.norm())
    if p == 2:
        r = next(x for x in range(2) if (x * x - tr * x + nm) % 2 == 0)
    else:
        s = sqrt_mod((tr * tr - 4 * nm) % p, p)
        r = (tr + s) * pow(2, -1, p) % p
    pi = gcd(K.element(p), w - r)
    if abs(pi.norm()) != p:
        raise ArithmeticError(f"no prime of norm {p} found in {K}")
    return pi


@lru_cache(maxsize=None)
def primes_above(p: int, field=QQ) -> tuple[Place, ...]:
    K = FieldSpec.parse(field)
    if K.is_rational:
        return (Place(K, p, (Fraction(p), Fraction(0))),)
    D = K.discriminant
    if D % p == 0:
        pi = _prime_generator(K, p)
        return (Place(K, p, (pi.a, pi.b), e=2, f=1),)
    if p == 2:
        split = D % 8 == 1
    else:
        split = pow(D % p, (p - 1) // 2, p) == 1
    if not split:
        return (Place(K, p, (Fraction(p), Fraction(0)), e=1, f=2),)
    pi = _prime_generator(K, p)
    c = pi.conj()
    first, second = sorted([pi, c], key=lambda z: (z.a, z.b))
    return (Place(K, p, (first.a, first.b)), Place(K, p, (second.a, second.b)))


def ord_place(x: QuadElement, place: Place):
    """Integer valuation ord_P(x) (math.inf for 0)."""
    if place.is_archimedean:
        raise ValueError("archimedean place has no valuation")
    if x.is_zero():
        return math.inf
    K = place.field
    x = x if isinstance(x, QuadElement) else K.element(x)
    if K.is_rational:
        return _vp_rat(x.a, place.p)
    n = x.denominator()
    alpha = x * n
    pi = place.generator()
    k = 0
    while divides(pi, alpha):
        alpha = alpha / pi
        k += 1
    # ord_P(n) for the rational integer n
    return k - place.e * _vp_rat(Fraction(n), place.p)


def _vp_rat(x: Fraction, p: int) -> int:
    x = Fraction(x)
    n, d, k = x.numerator, x.denominator, 0
    while n % p == 0:
        n //= p
        k += 1
    while d % p == 0:
        d //= p
        k -= 1
    return k


def valuation(x, place) -> Fraction:
    """ord_P(x) for a prime ideal P, or v_p(x) for a rational prime p."""
    if isinstance(place, int):
        place = primes_above(place, QQ)[0]
    if not isinstance(x, QuadElement):
        x = place.field.element(Fraction(x))
    v = ord_place(x, place)
    return v if v == math.inf else Fraction(v)


def log_abs(x: QuadElement, place: Place) -> float:
    """log |x|_v with |.|_v extending the usual |.| or |.|_p."""
    if x.is_zero():
        return -math.inf
    if place.is_archimedean:
        return math.log(abs(x.to_complex()))
    return -ord_place(x, place) * math.log(place.p) / place.e


def log_norm(xs, place: Place) -> float:
    return max(log_abs(x, place) for x in xs)


# -- heights --------------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjPoint:
    coords: tuple

    def __post_init__(self):
        if not self.coords or all(c.is_zero() for c in self.coords):
            raise ValueError("projective point with all coordinates zero")

    @classmethod
    def of(cls, coords, field=QQ) -> ProjPoint:
        K = FieldSpec.parse(field)
        return cls(tuple(parse_element(c, K) for c in coords))

    @property
    def field(self) -> FieldSpec:
        ds = {c.d for c in self.coords if not c.is_zero() and c.b != 0}
        return FieldSpec(ds.pop()) if ds else FieldSpec(self.coords[0].d)

    def scaled(self, lam) -> ProjPoint:
        return ProjPoint(tuple(c * lam for c in self.coords))


def weil_height(P: ProjPoint, field=None) -> float:
    """Absolute logarithmic Weil height of a projective point."""
    K = FieldSpec.parse(field) if field is not None else P.field
    coords = [c if c.d == K.d else QuadElement(c.a, c.b, K.d) for c in P.coords]
    if any(c.d != K.d and c.b != 0 for c in coords):
        raise ValueError("coordinates do not lie in the given field")
    g, n = content_ideal(coords)
    # clear the content: y_i = n x_i / g has content (1), so finite places contribute 0
    arch = max(math.log(abs((c * n).to_complex())) for c in coords if not c.is_zero())
    finite = -math.log(abs(float(g.a if K.is_rational else g.norm())))  # log N_{K/Q}(g)
    nv = K.degree  # local degree of the single archimedean place
    return (nv * arch + finite) / K.degree


def product_formula_sum(x: QuadElement) -> float:
    """sum_v n_v log|x|_v over all places of the field of x (should vanish)."""
    K = x.field
    total = K.degree * math.log(abs(x.to_complex()))
    n = Fraction(x.norm())
    primes = set(factorize(n.numerator)) | set(factorize(n.denominator))
    for p in primes:
        for P in primes_above(p, K):
            total += P.local_degree * log_abs(x, P)
    return total


# -- M_K-constants -------------------------------------------------------------------------

class MKConstant:
    """Finitely supported family of reals indexed by places of one field."""

    def __init__(self, field=QQ, values: dict | None = None):
        self.field = FieldSpec.parse(field)
        self.values: dict[Place, float] = {}
        for pl, c in (values or {}).items():
            if pl.field != self.field:
                raise ValueError("place of another field")
            if c != 0:
                self.values[pl] = float(c)

    @classmethod
    def zero(cls, field=QQ) -> MKConstant:
        return cls(field)

    @classmethod
    def log_abs_of(cls, x: QuadElement) -> MKConstant:
        """(log|x|_v)_v, finitely supported for x != 0."""
        if x.is_zero():
            raise ValueError("log|0| is not finite")
        K = x.field
        vals = {infinite_place(K): log_abs(x, infinite_place(K))}
        n = Fraction(x.norm())
        for p in set(factorize(n.numerator)) | set(factorize(n.denominator)):
            for P in primes_above(p, K):
                vals[P] = log_abs(x, P)
        return cls(K, vals)

    def __getitem__(self, place: Place) -> float:
        return self.values.get(place, 0.0)

    def support(self):
        return sorted(self.values, key=lambda pl: (pl.p or 0, str(pl)))

    def _check(self, other):
        if other.field != self.field:
            raise ValueError("M_K-constants over different fields")

    def __add__(self, other: MKConstant) -> MKConstant:
        self._check(other)
        keys = set(self.values) | set(other.values)
        return MKConstant(self.field, {k: self[k] + other[k] for k in keys})

    def maximum(self, other: MKConstant) -> MKConstant:
        self._check(other)
        keys = set(self.values) | set(other.values)
        return MKConstant(self.field, {k: max(self[k], other[k]) for k in keys})

    def extend(self, field) -> MKConstant:
        """Pull back to an extension: c_w = c_v for w above v."""
        L = FieldSpec.parse(field)
        if not self.field.is_rational and L != self.field:
            raise ValueError("only extensions of Q are supported")
        out = {}
        for pl, c in self.values.items():
            above = (infinite_place(L),) if pl.is_archimedean else primes_above(pl.p, L)
            for w in above:
                out[w] = c
        return MKConstant(L, out)

    def restrict_max(self, field=QQ) -> MKConstant:
        """Push down to a subfield: c_v = max over w above v."""
        K = FieldSpec.parse(field)
        if not K.is_rational:
            raise ValueError("restriction only to Q is supported")
        out: dict = {}
        for w, c in self.values.items():
            v = infinite_place(K) if w.is_archimedean else primes_above(w.p, K)[0]
            out[v] = max(out.get(v, -math.inf), c)
        # places of L above v missing from the support contribute 0 to the max
        for v in list(out):
            above = (infinite_place(self.field),) if v.is_archimedean else primes_above(v.p, self.field)
            if any(w not in self.values for w in above):
                out[v] = max(out[v], 0.0)
        return MKConstant(K, out)

    def averaged_sum(self) -> float:
        """(1/[K:Q]) sum_v n_v c_v."""
        return sum(pl.local_degree * c for pl, c in self.values.items()) / self.field.degree

    def to_json(self) -> dict:
        return {str(pl): c for pl, c in sorted(self.values.items(), key=lambda kv: str(kv[0]))}


def mk_combine(op: str, *consts: MKConstant, field=None) -> MKConstant:
    if op == "max":
        out = consts[0]
        for c in consts[1:]:
            out = out.maximum(c)
        return out
    if op == "sum":
        out = consts[0]
        for c in consts[1:]:
            out = out + c
        return out
    if op == "extend":
        return consts[0].extend(field)
    if op == "restrict":
        return consts[0].restrict_max(field if field is not None else QQ)
    raise ValueError(f"unknown M_K-constant operation {op!r}")


# -- tubular neighbourhoods -----------------------------------------------------------------

@dataclass(frozen=True)
class HomogeneousPoly:
    terms: tuple  # ((coeff QuadElement, exponent tuple), ...)

    @classmethod
    def of(cls, terms, field=QQ) -> HomogeneousPoly:
        K = FieldSpec.parse(field)
        return cls(tuple((parse_element(c, K), tuple(e)) for c, e in terms))

    @property
    def degree(self) -> int:
        degs = {sum(e) for _, e in self.terms}
        if len(degs) != 1:
            raise ValueError("polynomial is not homogeneous")
        return degs.pop()

    def __call__(self, xs) -> QuadElement:
        total = None
        for c, e in self.terms:
            t = c
            for x, k in zip(xs, e):
                if k:
                    t = t * x**k
            total = t if total is None else total + t
        return total


@dataclass
class TubularData:
    generators: list
    constant: MKConstant

    def __post_init__(self):
        for g in self.generators:
            _ = g.degree


def in_tubular_neighbourhood(P: ProjPoint, T: TubularData, place: Place) -> bool:
    """log|g_j(x)|_w < deg g_j * log||x||_w + c_v for every generator."""
    xs = P.coords
    ln = log_norm(xs, place)
    c = T.constant[place] if place.field == T.constant.field else 0.0
    for g in T.generators:
        val = g(xs)
        lhs = -math.inf if val.is_zero() else log_abs(val, place)
        if not lhs < g.degree * ln + c:
            return False
    return True


def reduces_into(P: ProjPoint, generators, place) -> bool:
    """Whether P reduces modulo the prime into the zero set of the generators."""
    if isinstance(place, int):
        place = primes_above(place, P.field)[0]
    if place.is_archimedean:
        raise ValueError("reduction needs a finite place")
    return in_tubular_neighbourhood(P, TubularData(list(generators), MKConstant.zero(place.field)), place)
