"""Runge conditions, divisor combinatorics and the assembled height bounds.

Couples (a, b) are pairs of vectors in (Z/nZ)^2, written as integer tuples.
The singular couples are (n/2)(a', b') with a', b' in {0,1}^2 and a'.b' odd.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import arith, igusa, padic, thetanum
from .arith import FieldSpec
from .characteristics import EVEN_CHARS

C_A = 0.42
C_B_DEFAULT = 1.33
C_B_CONSERVATIVE = 1.22
FINITE_SLACK = Fraction(21, 2)  # multiple of log 2 in both assembled bounds
T_MIN = math.sqrt(3) / 2


def _check_n(n: int):
    if n < 2 or n % 2:
        raise ValueError(f"n must be even and at least 2, got {n}")


@dataclass(frozen=True)
class RungeParams:
    n: int

    def __post_init__(self):
        _check_n(self.n)

    @property
    def r(self) -> int:
        return divisor_count(self.n)

    @property
    def m_Y(self) -> int:
        return my(self.n)


def divisor_count(n: int) -> int:
    _check_n(n)
    return n**4 // 2 + 2


def my(n: int) -> int:
    _check_n(n)
    return n * n - 3


def singular_couples(n: int) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    _check_n(n)
    h = n // 2
    out = []
    for bits in itertools.product((0, 1), repeat=4):
        a, b = bits[:2], bits[2:]
        if (a[0] * b[0] + a[1] * b[1]) % 2:
            out.append(((h * a[0], h * a[1]), (h * b[0], h * b[1])))
    return out


def is_regular(a, b, n: int) -> bool:
    _check_n(n)
    key = (tuple(x % n for x in a), tuple(x % n for x in b))
    return key not in set(singular_couples(n))


def regular_classes_bruteforce(n: int) -> int:
    """Number of regular couples modulo (a, b) ~ (-a, -b), by enumeration."""
    _check_n(n)
    seen = set()
    for v in itertools.product(range(n), repeat=4):
        a, b = v[:2], v[2:]
        if not is_regular(a, b, n):
            continue
        neg = tuple((-x) % n for x in v)
        seen.add(min(v, neg))
    return len(seen)


def torsion_counts(n: int):
    """(2-torsion on the product theta divisor, n-torsion not 2-torsion there, jacobian bound)."""
    _check_n(n)
    return 7, 2 * (n * n - 4), math.sqrt(2) * n * n + 0.5


def tubular_runge_condition(n: int, s: int) -> bool:
    _check_n(n)
    if s < 1:
        raise ValueError("s counts at least the archimedean places")
    return my(n) * s < divisor_count(n)


def curve_runge_condition(size_s: int, r: int) -> bool:
    return size_s < r


# -- bounds -------------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundValue:
    value: float
    display: float
    formula: str
    constant: float | None = None

    def to_json(self) -> dict:
        d = {"value": self.value, "display": self.display, "formula": self.formula}
        if self.constant is not None:
            d["constant"] = self.constant
        return d


def _check_t(t: float):
    if not t >= T_MIN - 1e-15:
        raise ValueError(f"t must be at least sqrt(3)/2, got {t}")


def bound_case_a() -> BoundValue:
    v = -4 * math.log(C_A) + float(FINITE_SLACK) * math.log(2)
    return BoundValue(v, 10.75, "-4 log 0.42 + (21/2) log 2", C_A)


def bound_case_b(t: float, c_b: float = C_B_DEFAULT) -> BoundValue:
    _check_t(t)
    if not c_b > 0:
        raise ValueError("c_b must be positive")
    v = 4 * math.pi * t - 4 * math.log(c_b) + float(FINITE_SLACK) * math.log(2)
    slack = -4 * math.log(c_b) + float(FINITE_SLACK) * math.log(2)
    shown = round(slack, 2) if c_b != C_B_DEFAULT else 6.14
    return BoundValue(v, 4 * math.pi * t + shown, f"4 pi t + {shown:.2f}", c_b)


def faltings_bound(case: str, t: float | None = None) -> float:
    if case == "a":
        return 1070.0
    if case == "b":
        if t is None:
            raise ValueError("case b needs t")
        _check_t(t)
        return 2 * math.pi * t + 535 * math.log(2 * math.pi * t + 9)
    raise ValueError(f"unknown case {case!r}")


# -- audit -----------------------------------------------------------------------------------

@dataclass
class RungeReport:
    mode: str
    field: str
    degree: int
    n: int
    archimedean_places: int
    places: list
    s_P: int | None
    condition: dict
    bound: dict
    faltings_bound: float
    h_psi: dict | None = None
    warnings: list = field(default_factory=list)
    curve: dict | None = None
    J: dict | None = None

    @property
    def verdict(self) -> bool | None:
        return self.condition.get("verdict")

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "field": self.field,
            "degree": self.degree,
            "n": self.n,
            "curve": self.curve,
            "J": self.J,
            "archimedean_places": self.archimedean_places,
            "places": self.places,
            "s_P": self.s_P,
            "condition": self.condition,
            "verdict": self.verdict,
            "bound": self.bound,
            "faltings_bound": self.faltings_bound,
            "h_psi": self.h_psi,
            "warnings": list(self.warnings),
        }


def _condition(mode: str, s_P: int, K: FieldSpec, n_arch: int) -> dict:
    if mode == "a":
        ok = s_P < 4 and K.degree <= 2
        return {"statement": "s_P < 4 and [K:Q] <= 2", "s_P": s_P, "degree": K.degree, "verdict": ok}
    lhs = s_P + n_arch
    return {"statement": "s_P + |M_K^inf| < 10", "lhs": lhs, "rhs": 10, "verdict": lhs < 10}


def _finite_exponent(places, K: FieldSpec) -> Fraction:
    """Certified 2-adic exponent for Theta^8 ratios: the worst case over primes above 2."""
    by_ideal = {pc.place: pc.classification for pc in places}
    worst = Fraction(0)
    for P in arith.primes_above(2, K):
        cls = by_ideal.get(P, igusa.Reduction.GOOD_JACOBIAN)
        case = "jacobian" if cls is igusa.Reduction.GOOD_JACOBIAN else "product"
        worst = max(worst, padic.theta8_ratio_bound(case, 1))
    return worst


def estimate_h_psi(taus, places, K: FieldSpec, eps: float = 1e-12) -> tuple[dict, list]:
    """Upper estimate for h(psi(P)) from archimedean theta values and the 2-adic ratio bound.

    h = (1/[K:Q]) sum_v n_v log max_i |x_i / x_j|_v for any coordinate j that is
    nonzero; the archimedean terms are evaluated, the finite ones bounded by
    (e/2) log 2 with e the certified Theta^8 exponent at primes above 2.
    """
    warnings = []
    coords_per_place = []
    for tau in taus:
        red, _ = thetanum.reduce_to_F2(tau)
        coords, err = thetanum.psi_point(red)
        coords_per_place.append((coords, err))
        for m, x in zip(EVEN_CHARS, coords):
            if abs(x) <= max(err, 1e-10 * max(abs(c) for c in coords)):
                warnings.append(
                    f"coordinate x_{m} vanishes at the given period matrix: the point lies on a theta "
                    "divisor, outside the integral-point hypothesis"
                )
    nv = K.degree  # one archimedean place with local degree [K:Q]
    best = None
    for j, m in enumerate(EVEN_CHARS):
        if any(abs(c[j]) <= max(err, 1e-300) for c, err in coords_per_place):
            continue
        arch = sum(nv * math.log(max(abs(x) for x in c) / abs(c[j])) for c, _ in coords_per_place) / K.degree
        if best is None or arch < best[0]:
            best = (arch, m)
    exp = _finite_exponent(places, K)
    finite = float(exp / 2) * math.log(2)
    if best is None:
        raise ArithmeticError("every coordinate vanishes somewhere")
    return {
        "reference_coordinate": str(best[1]),
        "archimedean": best[0],
        "finite_bound": finite,
        "finite_exponent": padic.fmt_val(exp),
        "estimate": best[0] + finite,
    }, warnings


def audit(J: igusa.JInvariants, mode: str, field=None, taus=None, t: float | None = None,
          c_b: float = C_B_DEFAULT, n: int = 2, curve=None, trial_bound: int = 10**6,
          general_factor: bool = True) -> RungeReport:
    if mode not in ("a", "b"):
        raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")
    K = FieldSpec.parse(field) if field is not None else _default_field(J)
    n_arch = 1
    taus = list(taus or [])
    if taus and len(taus) != n_arch:
        raise ValueError(f"{K} has {n_arch} archimedean place(s) but {len(taus)} period matrices were given")
    warnings = []
    if mode == "b":
        t = T_MIN if t is None else t
        bound = bound_case_b(t, c_b)
        falt = faltings_bound("b", t)
    else:
        bound = bound_case_a()
        falt = faltings_bound("a")
    bound_json = bound.to_json()
    if mode == "b" and c_b != C_B_DEFAULT:
        warnings.append(f"bound assembled with c_b = {c_b} instead of the default {C_B_DEFAULT}")

    if n != 2:
        _check_n(n)
        cond = {
            "statement": "(n^2 - 3) s < n^4/2 + 2",
            "n": n,
            "verdict": None,
            "classification": "unavailable for n > 2",
        }
        return RungeReport(mode, str(K), K.degree, n, n_arch, [], None, cond, bound_json, falt,
                           None, warnings, curve, J.to_json())

    places, s_P = igusa.classify_places(J, K, trial_bound=trial_bound, general=general_factor)
    for pc in places:
        if not pc.routes_agree:
            warnings.append(f"raw J and h-normalised witnesses disagree at {pc.place.key()}")
    cond = _condition(mode, s_P, K, n_arch)
    h_psi = None
    if taus:
        h_psi, w = estimate_h_psi(taus, places, K)
        h_psi["bound"] = bound.display
        h_psi["within_bound"] = h_psi["estimate"] <= bound.display
        warnings.extend(w)
        if mode == "b":
            for tau in taus:
                red, _ = thetanum.reduce_to_F2(tau)
                if red.tau4.imag > t + 1e-12:
                    warnings.append(f"reduced Im tau4 = {red.tau4.imag:.6g} exceeds t = {t}")
    return RungeReport(mode, str(K), K.degree, n, n_arch, [pc.to_json() for pc in places], s_P, cond,
                       bound_json, falt, h_psi, sorted(set(warnings)), curve, J.to_json())


def _default_field(J) -> FieldSpec:
    return igusa._field_of(J)
