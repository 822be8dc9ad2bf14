"""Valuations, Newton polygons and the theta-ratio bounds at places above 2.

All valuations are exact ``Fraction`` values measured in units where the place
is normalised by ``v(2) = v2``; ``math.inf`` stands for the valuation of 0.

At a place above 2 the ten values Theta_m^8 are the roots of
    P(X) = prod (X - Theta_m^8) = sum_k (-1)^(10-k) Sigma_{10-k} X^k,
so their valuations are minus the slopes of the Newton polygon of P. Lower
bounds ``lambda_i`` for v(Sigma_i) (after normalising by a suitable power of a
reference form) bound those slopes; the spread between the largest and smallest
slope bounds the ratio of any Theta^8 to the largest one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .identities import SIGMA_CORRECTED, SIGMA_PRINTED

INF = math.inf


def v_p(x, p: int = 2):
    """p-adic valuation of a rational number (inf for 0)."""
    x = Fraction(x)
    if x == 0:
        return INF
    n, d, k = x.numerator, x.denominator, 0
    while n % p == 0:
        n //= p
        k += 1
    while d % p == 0:
        d //= p
        k -= 1
    return k


def _frac(v):
    if v is None or v == INF:
        return INF
    return Fraction(v)


def fmt_val(v) -> str:
    if v == INF:
        return "inf"
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


# -- Newton polygons -----------------------------------------------------------

@dataclass
class NewtonPolygon:
    points: list  # (index, valuation)
    vertices: list = field(default_factory=list)
    slopes: list = field(default_factory=list)  # (slope, multiplicity)

    def to_json(self) -> dict:
        return {
            "points": [[i, fmt_val(v)] for i, v in self.points],
            "vertices": [[i, fmt_val(v)] for i, v in self.vertices],
            "slopes": [[fmt_val(s), m] for s, m in self.slopes],
        }


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def newton_polygon(points) -> NewtonPolygon:
    """Lower convex hull of (index, valuation) points; infinite valuations are skipped."""
    pts = [(int(i), _frac(v)) for i, v in points]
    idx = [i for i, _ in pts]
    if len(set(idx)) != len(idx):
        raise ValueError("indices must be distinct")
    finite = sorted((i, v) for i, v in pts if v != INF)
    if len(finite) < 2:
        raise ValueError("need at least two points with finite valuation")
    hull: list = []
    for p in finite:
        # pop while the turn is clockwise or straight, so collinear points drop out
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    slopes = []
    for a, b in zip(hull, hull[1:]):
        slopes.append((Fraction(b[1] - a[1], 1) / (b[0] - a[0]), b[0] - a[0]))
    return NewtonPolygon(sorted(pts, key=lambda t: t[0]), hull, slopes)


def newton_polygon_bruteforce(points) -> list:
    """Vertices of the lower hull by checking every pair of points (oracle)."""
    finite = sorted((int(i), _frac(v)) for i, v in points if _frac(v) != INF)
    n = len(finite)
    edges = set()
    for a in range(n):
        for b in range(a + 1, n):
            (x1, y1), (x2, y2) = finite[a], finite[b]
            ok = True
            for c in range(n):
                if c in (a, b):
                    continue
                x, y = finite[c]
                # line through a, b at x
                yl = y1 + Fraction(y2 - y1) * (x - x1) / (x2 - x1)
                # a collinear point outside [x1, x2] means the segment is not maximal
                if y < yl or (y == yl and not x1 < x < x2):
                    ok = False
                    break
            if ok:
                edges.add((finite[a], finite[b]))
    return sorted({p for e in edges for p in e})


# -- Sigma valuation bounds ----------------------------------------------------

_TABLES = {"printed": SIGMA_PRINTED, "corrected": SIGMA_CORRECTED}


@dataclass(frozen=True)
class SigmaCoeffTable:
    terms: dict  # i -> list of (v2 of coefficient, (e4, e6, e10, e12))

    @classmethod
    def from_formulas(cls, name: str = "corrected") -> SigmaCoeffTable:
        src = _TABLES[name]
        return cls({i: [(v_p(c), e) for c, e in src[i]] for i in src})


def sigma_val_lower_bound(i: int, vh4, vh6, vh10, vh12, v2, table: str = "corrected"):
    """Term-wise lower bound for v(Sigma_i) given bounds on v(h4), v(h6), v(h10), v(h12)."""
    if not 1 <= i <= 10:
        raise ValueError("i must lie in 1..10")
    v2 = Fraction(v2)
    if v2 <= 0:
        raise ValueError("v2 must be positive")
    vh = (vh4, vh6, vh10, vh12)
    tab = SigmaCoeffTable.from_formulas(table).terms[i]
    best = INF
    for c2, exps in tab:
        val = c2 * v2
        for e, v in zip(exps, vh):
            if e:
                val = val + e * _frac(v)
        best = min(best, val)
    return best


def _tight_terms(i: int, vh, v2, table: str) -> int:
    tab = SigmaCoeffTable.from_formulas(table).terms[i]
    vals = [c2 * v2 + sum(e * _frac(v) for e, v in zip(exps, vh) if e) for c2, exps in tab]
    m = min(vals)
    return sum(1 for x in vals if x == m)


# -- constraints ----------------------------------------------------------------

def case_a_constraints(v2=1) -> dict:
    """Bounds for v(h4), v(h6), v(h12) when v(h10) = 0 and the Igusa quotients are integral.

    With h10 normalised, J_{2k} is a polynomial in h4, h6, h12 and
    v(J_{2k}^5 / J_10^k) >= 0 reads v(J_{2k}) >= -13k/5 * v2 since J_10 = h10/2^13.
    Each new quotient involves one new h, bounded from the previous ones.
    """
    v2 = Fraction(v2)
    need = {k: Fraction(-13 * k, 5) * v2 for k in (1, 2, 3)}
    # J2 = h12 / 2
    v12 = need[1] + v2
    # J4 = (h12^2 - 2 h4) / (2^5 3)
    poly4 = need[2] + 5 * v2
    v4 = min(poly4, 2 * v12) - v2
    # J6 = (h12^3 - 6 h4 h12 + 4 h6) / (2^7 3^3)
    poly6 = need[3] + 7 * v2
    v6 = min(poly6, 3 * v12, v2 + v4 + v12) - 2 * v2
    return {"vh4": v4, "vh6": v6, "vh10": Fraction(0), "vh12": v12}


# exponents of P48-normalised h4, h6, h10 taken from the Liu contract
CASE_B_CONTRACT = {"vh4": Fraction(-13, 3), "vh6": Fraction(-3), "vh10": Fraction(-4, 3)}
CASE_B_H12_PUBLISHED = Fraction(-7, 2)


def p48_terms():
    """(coefficient, exponents) of P48 = h12^4 - 12 h4 h12^2 h10^2 + 16 h6 h12 h10^3 - 12 h4^2 h10^4."""
    return [
        (Fraction(1), (0, 0, 0, 4)),
        (Fraction(-12), (1, 0, 2, 2)),
        (Fraction(16), (0, 1, 3, 1)),
        (Fraction(-12), (2, 0, 4, 0)),
    ]


def case_b_h12_bound(v2=1):
    """Lower bound on v(h12) with v(P48) = 0, from the Newton polygon in the variable h12."""
    v2 = Fraction(v2)
    c = {k: v * v2 for k, v in CASE_B_CONTRACT.items()}
    # coefficient valuations of P48 - P48 viewed as a polynomial in h12
    pts = {
        4: Fraction(0),
        2: 2 * v2 + c["vh4"] + 2 * c["vh10"],
        1: 4 * v2 + c["vh6"] + 3 * c["vh10"],
        0: min(Fraction(0), 2 * v2 + 2 * c["vh4"] + 4 * c["vh10"]),
    }
    # every root y satisfies v(y) >= -(largest slope into the leading point)
    steepest = max((pts[4] - pts[k]) / (4 - k) for k in (0, 1, 2))
    return -steepest


def case_b_constraints(v2=1) -> dict:
    v2 = Fraction(v2)
    out = {k: v * v2 for k, v in CASE_B_CONTRACT.items()}
    out["vh12"] = CASE_B_H12_PUBLISHED * v2
    return out


def case_b_refined_constraints(v2=1) -> dict:
    """Subcase v(h10) > v(h12) + 19/6 v2: then v(h12) = 0 and v(h10) > 19/6 v2."""
    v2 = Fraction(v2)
    out = case_b_constraints(v2)
    out["vh12"] = Fraction(0)
    out["vh10"] = Fraction(19, 6) * v2
    return out


def p48_val_lower_bound(vh4, vh6, vh10, vh12, v2=1):
    v2 = Fraction(v2)
    vh = (vh4, vh6, vh10, vh12)
    best = INF
    for c, exps in p48_terms():
        val = v_p(c) * v2 + sum(e * _frac(v) for e, v in zip(exps, vh) if e)
        best = min(best, val)
    return best


# -- lambda tables ----------------------------------------------------------------

PUBLISHED_LAMBDAS = {
    "a": [Fraction(x, 5) for x in (-16, -47, -73, -104, -125, -156, -112, -83, -44, -20)],
    "b": [Fraction(-10, 3), Fraction(-29, 3), Fraction(-14), Fraction(-64, 3), Fraction(-71, 3),
          Fraction(-84, 3), Fraction(-55, 3), Fraction(-53, 3), Fraction(-71, 6), Fraction(-28, 3)],
    # i = 1..9
    "b_refined": [Fraction(-10, 3), Fraction(-29, 3), Fraction(-14), Fraction(-64, 3), Fraction(-71, 3),
                  Fraction(-84, 3), Fraction(-51, 3), Fraction(-32, 3), Fraction(0)],
}


def _lambdas(cons: dict, v2, table: str, n: int = 10):
    return [
        sigma_val_lower_bound(i, cons["vh4"], cons["vh6"], cons["vh10"], cons["vh12"], v2, table)
        for i in range(1, n + 1)
    ]


def case_a_lambdas(v2=1, table: str = "corrected") -> list:
    """(lambda_1 .. lambda_10), in valuation units, for jacobian reduction above 2."""
    v2 = Fraction(v2)
    if v2 <= 0:
        raise ValueError("v2 must be positive")
    return _lambdas(case_a_constraints(v2), v2, table)


def case_b_lambdas(v2=1, table: str = "corrected") -> dict:
    """Main table (i = 1..10) and the refined h10-small table (i = 1..9)."""
    v2 = Fraction(v2)
    if v2 <= 0:
        raise ValueError("v2 must be positive")
    cons = case_b_refined_constraints(v2)
    refined = _lambdas(cons, v2, table, 9)
    # the subcase is strict in v(h10); probe just above the boundary
    vh = (cons["vh4"], cons["vh6"], cons["vh10"] + Fraction(1, 10**6) * v2, cons["vh12"])
    return {
        "main": _lambdas(case_b_constraints(v2), v2, table),
        "refined": refined,
        # with v(h10) strictly above its bound, one term of Sigma_9 attains the minimum
        "refined_i9_tight_terms": _tight_terms(9, vh, v2, table),
    }


def lambda_discrepancies(table: str = "corrected") -> list[dict]:
    """Entries where the published lambda tables differ from recomputation (v2 = 1)."""
    rec = {"a": case_a_lambdas(1, table)}
    b = case_b_lambdas(1, table)
    rec["b"], rec["b_refined"] = b["main"], b["refined"]
    out = []
    for name, pub in PUBLISHED_LAMBDAS.items():
        for i, (p, r) in enumerate(zip(pub, rec[name]), start=1):
            out.append({"table": name, "i": i, "published": fmt_val(p), "recomputed": fmt_val(r), "agree": p == r})
    return out


# -- slope bounds and the ratio exponent --------------------------------------

def slope_bounds(lams, exact_low_index: int | None = None, top_valuation=Fraction(0)):
    """Bounds on the Newton polygon slopes of sum_k Sigma_{10-k} X^k.

    ``lams[i-1]`` bounds v(Sigma_i) from below; the leading coefficient (i = 0)
    has valuation ``top_valuation``. The highest slope is at most
    max_i (top - lambda_i)/i. If Sigma_j for ``j = exact_low_index`` is known
    exactly, slopes to the right of its point are at least
    min over i < j of (lambda_i - lambda_j)/(j - i).
    """
    n = len(lams)
    high = max((top_valuation - lams[i - 1]) / i for i in range(1, n + 1))
    low = None
    if exact_low_index is not None:
        j = exact_low_index
        cands = [(lams[i - 1] - lams[j - 1]) / (j - i) for i in range(1, j)]
        cands.append((top_valuation - lams[j - 1]) / j)
        low = min(cands)
    return low, high


def _lp_lowest_slope_case_b(v2: Fraction, table: str):
    """Lowest slope when v(h10) <= v(h12) + 19/6 v2 (h10 not small).

    v(Sigma_10) = 4 v(h10) - 4 v2 exactly, and the k-th slope from the first
    point is (v(Sigma_{10-k}) - v(Sigma_10))/k. Each term bound is linear in
    (v4, v6, v10, v12), so the minimum over the feasible region is a pair of
    linear programs (the region is the union of v12 <= 0 and v10 <= 13/6 v2,
    forced by v(P48) = 0).
    """
    from scipy.optimize import linprog

    c = case_b_constraints(v2)
    lo = [float(c["vh4"]), float(c["vh6"]), float(c["vh10"]), float(c["vh12"])]
    tab = SigmaCoeffTable.from_formulas(table).terms
    best = None
    for k in range(1, 11):
        i = 10 - k
        terms = [(0, (0, 0, 0, 0))] if i == 0 else tab[i]
        for c2, e in terms:
            obj = [e[0], e[1], e[2] - 4, e[3]]
            for region in ("v12<=0", "v10<=13/6"):
                A = [[0, 0, 1, -1]]
                b = [float(Fraction(19, 6) * v2)]
                if region == "v12<=0":
                    A.append([0, 0, 0, 1])
                    b.append(0.0)
                else:
                    A.append([0, 0, 1, 0])
                    b.append(float(Fraction(13, 6) * v2))
                res = linprog(obj, A_ub=A, b_ub=b, bounds=[(x, None) for x in lo], method="highs")
                if res.status != 0:
                    raise ArithmeticError(f"linear program failed: {res.message}")
                val = Fraction(res.fun + float(c2 * v2 + 4 * v2)).limit_denominator(1000) / k
                if best is None or val < best[0]:
                    best = (val, k, list(e), region)
    return best


def theta8_ratio_derivation(case: str, v2=1, table: str = "corrected") -> dict:
    """Full derivation of the Theta^8 ratio exponent for the two reduction types."""
    v2 = Fraction(v2)
    if v2 <= 0:
        raise ValueError("v2 must be positive")
    case = ReductionType(case).value
    if case == "jacobian":
        lams = case_a_lambdas(v2, table)
        low, high = slope_bounds(lams, exact_low_index=10)
        pts = [(k, lams[10 - k - 1]) for k in range(10)] + [(10, Fraction(0))]
        poly = newton_polygon(pts)
        derived = high - low
        published = 12 * v2
        return {
            "case": case,
            "lambdas": [fmt_val(x) for x in lams],
            "lowest_slope_bound": fmt_val(low),
            "highest_slope_bound": fmt_val(high),
            "table_polygon": poly.to_json(),
            "derived_exponent": fmt_val(derived),
            "published_exponent": fmt_val(published),
            "certified": derived <= published,
            "exceptions": 0,
        }
    b = case_b_lambdas(v2, table)
    _, high = slope_bounds(b["main"])
    # h10 small: Sigma_9 exact, second lowest slope from the refined table
    refined = b["refined"] + [None]
    low_small = min((refined[i - 1] - refined[8]) / (9 - i) for i in range(1, 9))
    low_small = min(low_small, (0 - refined[8]) / 9)
    lp = _lp_lowest_slope_case_b(v2, table)
    low_big = lp[0]
    derived = max(high - low_small, high - low_big)
    published = 21 * v2
    return {
        "case": case,
        "lambdas_main": [fmt_val(x) for x in b["main"]],
        "lambdas_refined": [fmt_val(x) for x in b["refined"]],
        "refined_sigma9_exact": b["refined_i9_tight_terms"] == 1,
        "highest_slope_bound": fmt_val(high),
        "second_lowest_slope_bound_h10_small": fmt_val(low_small),
        "lowest_slope_bound_h10_not_small": fmt_val(low_big),
        "lowest_slope_witness": {"k": lp[1], "term": lp[2], "region": lp[3]},
        "published_slope_range": ["-47/3", "16/3"],
        "derived_exponent": fmt_val(derived),
        "published_exponent": fmt_val(published),
        "certified": derived <= published,
        "exceptions": 1,
    }


class ReductionType(str, Enum):
    JACOBIAN = "jacobian"
    PRODUCT = "product"


def theta8_ratio_bound(case, v2=1, table: str = "corrected"):
    """Exponent e with |Theta_m^8| / max |Theta^8| >= |2|^e (all m, or all but one for products).

    Returns the published exponent (12 v2 or 21 v2) once the Newton polygon
    derivation certifies it, otherwise the derived exponent.
    """
    d = theta8_ratio_derivation(case, v2, table)
    if d["certified"]:
        return Fraction(d["published_exponent"])
    return Fraction(d["derived_exponent"])


def vanishing_count_contract(case, p_divides_2: bool) -> dict:
    """Expected number of strictly smaller theta coordinates at a prime of good reduction."""
    case = ReductionType(case)
    if not p_divides_2:
        exact = 0 if case is ReductionType.JACOBIAN else 1
        return {"case": case.value, "p_divides_2": False, "kind": "exact", "count": exact}
    exps = {ReductionType.JACOBIAN: (0, Fraction(12, 8)), ReductionType.PRODUCT: (1, Fraction(21, 8))}
    at_most, theta_exp = exps[case]
    return {
        "case": case.value,
        "p_divides_2": True,
        "kind": "at_most",
        "count": at_most,
        "theta_scale_exponent": fmt_val(theta_exp),
        "description": f"at most {at_most} coordinate(s) below |2|^{fmt_val(theta_exp)} times the largest, on the Theta scale",
    }
