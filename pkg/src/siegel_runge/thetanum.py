"""Numerical theta constants on the Siegel half-space of degree two.

Evaluation is by direct lattice summation with an analytic tail bound, so the
returned value carries an explicit absolute error. The module also provides the
symplectic action, reduction to the fundamental domain F_2 and the
archimedean smallness counts.
"""
from __future__ import annotations

import cmath
import json
import math
import random
from dataclasses import dataclass, field

import numpy as np

from .characteristics import EVEN_CHARS, ThetaChar

MIN_EPS = 1e-12
F2_TOL = 1e-9
_UNIT = 2.0**-52


@dataclass(frozen=True)
class SiegelPoint:
    tau1: complex
    tau2: complex
    tau4: complex

    def __post_init__(self):
        y1, y2, y4 = self.tau1.imag, self.tau2.imag, self.tau4.imag
        if not (y1 > 0 and y1 * y4 - y2 * y2 > 0):
            raise ValueError(f"imaginary part is not positive definite: {self}")

    @classmethod
    def from_matrix(cls, t) -> SiegelPoint:
        t = np.asarray(t, dtype=complex)
        return cls(complex(t[0, 0]), complex((t[0, 1] + t[1, 0]) / 2), complex(t[1, 1]))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.tau1, self.tau2], [self.tau2, self.tau4]], dtype=complex)

    @property
    def imag(self) -> np.ndarray:
        return self.matrix.imag

    def lambda_min(self) -> float:
        return float(np.linalg.eigvalsh(self.imag)[0])

    def to_json(self) -> dict:
        return {k: [getattr(self, k).real, getattr(self, k).imag] for k in ("tau1", "tau2", "tau4")}

    @classmethod
    def from_json(cls, d) -> SiegelPoint:
        if isinstance(d, str):
            d = json.loads(d)
        try:
            return cls(*(complex(d[k][0], d[k][1]) for k in ("tau1", "tau2", "tau4")))
        except (KeyError, IndexError, TypeError) as exc:
            raise ValueError(f"malformed tau record: {d!r}") from exc

    def __str__(self):
        return f"[[{self.tau1}, {self.tau2}], [{self.tau2}, {self.tau4}]]"


I_TAU = SiegelPoint(1j, 0j, 1j)

_J = np.block([[np.zeros((2, 2), int), np.eye(2, dtype=int)], [-np.eye(2, dtype=int), np.zeros((2, 2), int)]])


@dataclass(frozen=True)
class SymplecticMatrix:
    m: tuple  # 16 ints, row-major

    def __post_init__(self):
        arr = self.array
        if arr.shape != (4, 4):
            raise ValueError("symplectic matrix must be 4x4")
        if not np.array_equal(arr.T @ _J @ arr, _J):
            raise ValueError(f"matrix is not symplectic: {self.m}")

    @classmethod
    def from_array(cls, a) -> SymplecticMatrix:
        return cls(tuple(int(x) for x in np.asarray(a).reshape(-1)))

    @classmethod
    def from_blocks(cls, A, B, C, D) -> SymplecticMatrix:
        return cls.from_array(np.block([[np.asarray(A), np.asarray(B)], [np.asarray(C), np.asarray(D)]]))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.m, dtype=np.int64).reshape(4, 4)

    @property
    def blocks(self):
        a = self.array
        return a[:2, :2], a[:2, 2:], a[2:, :2], a[2:, 2:]

    def __matmul__(self, other: SymplecticMatrix) -> SymplecticMatrix:
        return SymplecticMatrix.from_array(self.array @ other.array)

    def inverse(self) -> SymplecticMatrix:
        # M^{-1} = -J M^T J for symplectic M
        return SymplecticMatrix.from_array(-_J @ self.array.T @ _J)

    def to_list(self) -> list[list[int]]:
        return [list(self.m[4 * i:4 * i + 4]) for i in range(4)]


IDENTITY = SymplecticMatrix.from_array(np.eye(4, dtype=int))
J_MATRIX = SymplecticMatrix.from_array(_J)


def translation(S) -> SymplecticMatrix:
    S = np.asarray(S, dtype=int)
    return SymplecticMatrix.from_blocks(np.eye(2, dtype=int), S, np.zeros((2, 2), int), np.eye(2, dtype=int))


def gl2_embed(U) -> SymplecticMatrix:
    """tau -> U tau U^t."""
    U = np.asarray(U, dtype=int)
    det = round(np.linalg.det(U))
    if abs(det) != 1:
        raise ValueError("U must lie in GL_2(Z)")
    uinv_t = np.array([[U[1, 1], -U[1, 0]], [-U[0, 1], U[0, 0]]]) * det
    return SymplecticMatrix.from_blocks(U, np.zeros((2, 2), int), np.zeros((2, 2), int), uinv_t)


def symplectic_act(g: SymplecticMatrix, tau: SiegelPoint, tol: float = 1e-12):
    """Return (g.tau, det(C tau + D))."""
    A, B, C, D = g.blocks
    t = tau.matrix
    den = C @ t + D
    j = complex(np.linalg.det(den))
    scale = max(1.0, float(np.abs(den).max())) ** 2
    if abs(j) <= tol * scale:
        raise ValueError("C tau + D is numerically singular")
    new = (A @ t + B) @ np.linalg.inv(den)
    return SiegelPoint.from_matrix((new + new.T) / 2), j


# -- theta evaluation ---------------------------------------------------------

def tail_bound(lam: float, R: int) -> float:
    """Upper bound for sum of exp(-pi lam |x|^2) over x in Z^2 + a with |x|_inf >= R.

    At most 8(k+1) points of Z^2 + a (a half-integral) have sup norm in [k, k+1),
    and |x|_2 >= |x|_inf. Writing k = R + j, k^2 >= R^2 + 2Rj, so the tail is
    at most 8 e^{-pi lam R^2} sum_j (R + j + 1) r^j with r = e^{-2 pi lam R}.
    """
    r = math.exp(-2 * math.pi * lam * R)
    return 8 * math.exp(-math.pi * lam * R * R) * ((R + 1) / (1 - r) + r / (1 - r) ** 2)


def truncation_radius(lam: float, eps: float) -> int:
    R = 1
    while tail_bound(lam, R) > eps / 2:
        R += 1
    return R


def _lattice_points(m: ThetaChar, R: int):
    a1, a2 = m.m[0] / 2, m.m[1] / 2
    rng = np.arange(-R - 1, R + 1)
    x1 = rng + a1
    x2 = rng + a2
    x1 = x1[np.abs(x1) < R]
    x2 = x2[np.abs(x2) < R]
    return np.meshgrid(x1, x2, indexing="ij")


def _check_eps(eps: float):
    if not eps > 0:
        raise ValueError("eps must be positive")
    if eps < MIN_EPS:
        raise ValueError(f"double precision kernel needs eps >= {MIN_EPS}")


def eval_theta(m, tau: SiegelPoint, eps: float = 1e-12, backend: str = "float") -> complex:
    """Theta_{a,b}(0, tau) to absolute accuracy eps."""
    m = ThetaChar.parse(m)
    if backend == "mpmath":
        return _eval_theta_mp(m, tau, eps)
    _check_eps(eps)
    lam = tau.lambda_min()
    R = truncation_radius(lam, eps)
    x1, x2 = _lattice_points(m, R)
    b1, b2 = m.m[2] / 2, m.m[3] / 2
    expo = 1j * math.pi * (x1 * x1 * tau.tau1 + 2 * x1 * x2 * tau.tau2 + x2 * x2 * tau.tau4)
    expo += 2j * math.pi * (x1 * b1 + x2 * b2)
    terms = np.exp(expo)
    # a posteriori rounding estimate: exp loses about |argument| ulps, pairwise
    # summation about log2(n) more
    mags = np.abs(terms)
    rounding = float((mags * (4 + np.abs(expo) + math.log2(max(terms.size, 2)))).sum()) * _UNIT
    if rounding > eps / 2:
        raise ValueError("eps too small for double precision at this tau")
    return complex(terms.sum())


def _eval_theta_mp(m: ThetaChar, tau: SiegelPoint, eps: float) -> complex:
    import mpmath

    if not eps > 0:
        raise ValueError("eps must be positive")
    dps = max(20, int(-math.log10(eps)) + 10)
    with mpmath.workdps(dps):
        lam = tau.lambda_min()
        R = truncation_radius(lam, max(eps, 1e-300))
        t1, t2, t4 = (mpmath.mpc(z.real, z.imag) for z in (tau.tau1, tau.tau2, tau.tau4))
        a1, a2 = mpmath.mpf(m.m[0]) / 2, mpmath.mpf(m.m[1]) / 2
        b1, b2 = mpmath.mpf(m.m[2]) / 2, mpmath.mpf(m.m[3]) / 2
        total = mpmath.mpc(0)
        for n1 in range(-R - 1, R + 1):
            x1 = n1 + a1
            if abs(x1) >= R:
                continue
            for n2 in range(-R - 1, R + 1):
                x2 = n2 + a2
                if abs(x2) >= R:
                    continue
                e = mpmath.j * mpmath.pi * (x1 * x1 * t1 + 2 * x1 * x2 * t2 + x2 * x2 * t4)
                e += 2 * mpmath.j * mpmath.pi * (x1 * b1 + x2 * b2)
                total += mpmath.exp(e)
        return complex(total)


@dataclass
class ThetaVector:
    values: dict = field(default_factory=dict)  # ThetaChar -> complex, even chars only
    eps: float = 0.0

    def __post_init__(self):
        for m in self.values:
            if not ThetaChar.parse(m).is_even:
                raise ValueError(f"odd characteristic {m} in theta vector")

    def as_list(self) -> list[complex]:
        return [self.values[m] for m in EVEN_CHARS]

    def ratios(self) -> list[float]:
        mags = [abs(v) for v in self.as_list()]
        top = max(mags)
        if top == 0:
            raise ValueError("all-zero theta vector")
        return sorted(x / top for x in mags)


def theta_vector(tau: SiegelPoint, eps: float = 1e-12) -> ThetaVector:
    return ThetaVector({m: eval_theta(m, tau, eps) for m in EVEN_CHARS}, eps)


def count_small(v, c: float) -> int:
    """Number of entries with |v_m| < c * max |v_m'|."""
    if not c > 0:
        raise ValueError("c must be positive")
    vals = v.as_list() if isinstance(v, ThetaVector) else list(v)
    mags = [abs(x) for x in vals]
    top = max(mags)
    if top == 0:
        raise ValueError("all-zero vector")
    return sum(1 for x in mags if x < c * top)


def psi_point(tau: SiegelPoint, eps: float = 1e-12):
    """The ten coordinates Theta_m^4(tau) and a bound on their absolute error."""
    vals = theta_vector(tau, eps).as_list()
    coords = [v**4 for v in vals]
    err = max(4 * eps * (abs(v) + eps) ** 3 for v in vals) + 4 * _UNIT * max(abs(c) for c in coords)
    return coords, err


# -- F_2 reduction -----------------------------------------------------------

def _gottschling() -> list[tuple[str, SymplecticMatrix]]:
    out = []
    z = np.zeros((2, 2), int)
    e11 = np.array([[1, 0], [0, 0]])
    e22 = np.array([[0, 0], [0, 1]])
    m1 = SymplecticMatrix.from_blocks(e22, -e11, e11, e22)  # |tau1| >= 1
    m4 = SymplecticMatrix.from_blocks(e11, -e22, e22, e11)  # |tau4| >= 1
    out.append(("tau1", m1))
    out.append(("tau4", m4))
    V = gl2_embed([[1, -1], [0, 1]])  # (1,1) entry becomes tau1 - 2 tau2 + tau4
    for s in (1, -1):
        out.append((f"tau1+tau4-2tau2{'+' if s > 0 else '-'}1", m1 @ translation(s * e11) @ V))
    shapes = [
        [[1, 0], [0, 0]], [[0, 0], [0, 1]], [[1, 0], [0, 1]], [[1, 0], [0, -1]],
        [[0, 1], [1, 0]], [[1, 1], [1, 0]], [[0, 1], [1, 1]],
    ]
    I2 = np.eye(2, dtype=int)
    out.append(("det(tau)", SymplecticMatrix.from_blocks(z, -I2, I2, z)))
    for S in shapes:
        for s in (1, -1):
            S_ = s * np.array(S)
            out.append((f"det(tau+{S_.tolist()})", SymplecticMatrix.from_blocks(z, -I2, I2, S_)))
    assert len(out) == 19
    return out


GOTTSCHLING = _gottschling()


def _minkowski_step(tau: SiegelPoint):
    """GL_2(Z) reduction of Im tau to 0 <= 2 y2 <= y1 <= y4; returns (tau', U-matrix)."""
    g = IDENTITY
    for _ in range(200):
        y = tau.imag
        y1, y2, y4 = y[0, 0], y[0, 1], y[1, 1]
        if y1 > y4 + 1e-15 * y4:
            step = gl2_embed([[0, 1], [1, 0]])
        else:
            k = round(y2 / y1)
            if k == 0:
                break
            step = gl2_embed([[1, 0], [-k, 1]])
        tau, _ = symplectic_act(step, tau)
        g = step @ g
    if tau.tau2.imag < 0:
        step = gl2_embed([[1, 0], [0, -1]])
        tau, _ = symplectic_act(step, tau)
        g = step @ g
    return tau, g


def _translate_step(tau: SiegelPoint):
    S = -np.round(tau.matrix.real).astype(int)
    S = np.array([[S[0, 0], S[0, 1]], [S[0, 1], S[1, 1]]])
    if not S.any():
        return tau, IDENTITY
    g = translation(S)
    tau, _ = symplectic_act(g, tau)
    return tau, g


def f2_violations(tau: SiegelPoint, tol: float = F2_TOL) -> list[str]:
    """Names of the defining inequalities of F_2 that fail by more than tol."""
    bad = []
    y = tau.imag
    y1, y2, y4 = y[0, 0], y[0, 1], y[1, 1]
    if not (-tol <= 2 * y2 <= y1 + tol):
        bad.append("0<=2y2<=y1")
    if y1 > y4 + tol:
        bad.append("y1<=y4")
    for z in (tau.tau1, tau.tau2, tau.tau4):
        if abs(z.real) > 0.5 + tol:
            bad.append("|Re|<=1/2")
            break
    for name, g in GOTTSCHLING:
        _, j = symplectic_act(g, tau)
        if abs(j) < 1 - tol:
            bad.append(name)
    return bad


def is_in_F2(tau: SiegelPoint, tol: float = F2_TOL) -> bool:
    return not f2_violations(tau, tol)


def reduce_to_F2(tau: SiegelPoint, tol: float = F2_TOL, max_iter: int = 10_000):
    """Return (tau', gamma) with gamma.tau = tau' and tau' in F_2 up to tol."""
    gamma = IDENTITY
    cur = tau
    for _ in range(max_iter):
        cur, g = _minkowski_step(cur)
        gamma = g @ gamma
        cur, g = _translate_step(cur)
        gamma = g @ gamma
        best = None
        for _, h in GOTTSCHLING:
            _, j = symplectic_act(h, cur)
            if abs(j) < 1 - tol and (best is None or abs(j) < best[0]):
                best = (abs(j), h)
        if best is None:
            # applying a symplectic step can leave Im tau unreduced only via the
            # loop above, so here all conditions hold
            if is_in_F2(cur, tol):
                check, _ = symplectic_act(gamma, tau)
                if np.abs(check.matrix - cur.matrix).max() > max(tol, 1e-9) * max(1.0, np.abs(cur.matrix).max()):
                    raise ArithmeticError("reduction certificate does not reproduce the output")
                return cur, gamma
            continue
        cur, _ = symplectic_act(best[1], cur)
        gamma = best[1] @ gamma
    raise RuntimeError("F_2 reduction did not terminate; tolerance may be too tight")


# -- dominant terms and archimedean estimates ---------------------------------

_STRENG_GROUPS = {
    "constant": ("0000", "0001", "0010", "0011"),
    "tau4": ("0100", "0110"),
    "tau1": ("1000", "1001"),
    "mixed": ("1100", "1111"),
}
STRENG_CONSTANTS = {"constant": 0.405, "tau4": 0.348, "tau1": 0.348, "mixed": 0.438}


def dominant_term(m, tau: SiegelPoint) -> complex:
    """Leading part of Theta_m read off from its Fourier expansion."""
    m = ThetaChar.parse(m)
    s = str(m)
    if s in _STRENG_GROUPS["constant"]:
        return 1.0
    if s in _STRENG_GROUPS["tau4"]:
        return 2 * cmath.exp(1j * math.pi * tau.tau4 / 4)
    if s in _STRENG_GROUPS["tau1"]:
        return 2 * cmath.exp(1j * math.pi * tau.tau1 / 4)
    if s in _STRENG_GROUPS["mixed"]:
        eps_m = 1 if s == "1100" else -1
        pref = 2 * cmath.exp(1j * math.pi * (tau.tau1 + tau.tau4 - 2 * tau.tau2) / 4)
        return pref * (1 + eps_m * cmath.exp(1j * math.pi * tau.tau2))
    raise ValueError(f"no dominant term for odd characteristic {m}")


def _mixed_ratio(m: ThetaChar, tau: SiegelPoint, kmax: int = 41) -> complex:
    """Theta_m / dominant_term for a = (1/2, 1/2), summed in a form stable at tau2 = 0.

    Terms with |y1| = p, |y2| = q (p, q odd) pair up into cos or sin of
    pi*p*q*tau2/2; dividing by the (1,1) pair gives sin(kz)/sin(z) or
    cos(kz)/cos(z) with k = pq, z = pi tau2/2, expanded as exponential sums.
    """
    odd_b = m.m[2] == 1
    z = math.pi * tau.tau2 / 2
    total = 0j
    for p in range(1, kmax + 1, 2):
        for q in range(1, kmax + 1, 2):
            ex = 1j * math.pi * ((p * p - 1) * tau.tau1 + (q * q - 1) * tau.tau4) / 4
            if ex.real < -60:
                continue
            k = p * q
            if odd_b:
                # sin(kz)/sin(z) = sum_{j} e^{2ijz}, j = -(k-1)/2 .. (k-1)/2
                ratio = sum(cmath.exp(2j * jj * z) for jj in range(-(k - 1) // 2, (k - 1) // 2 + 1))
                sign = (-1) ** (((p - q) // 2) % 2)
            else:
                ratio = cmath.cos(k * z) / cmath.cos(z)
                sign = 1
            total += sign * ratio * cmath.exp(ex)
    return total


def streng_deviation(m, tau: SiegelPoint, eps: float = 1e-12) -> float:
    """|Theta_m / dominant_term - 1|."""
    m = ThetaChar.parse(m)
    if m.m[0] == 1 and m.m[1] == 1:
        return abs(_mixed_ratio(m, tau) - 1)
    return abs(eval_theta(m, tau, eps) / dominant_term(m, tau) - 1)


def check_streng_bounds(tau: SiegelPoint, tol: float = F2_TOL) -> bool:
    """True iff the four dominant-term inequalities hold at the reduced point tau."""
    if not is_in_F2(tau, tol):
        raise ValueError("check_streng_bounds expects a point of F_2")
    for group, chars in _STRENG_GROUPS.items():
        bound = STRENG_CONSTANTS[group]
        for m in chars:
            if not streng_deviation(m, tau) < bound:
                return False
    return True


# -- sampling helpers ----------------------------------------------------------

def sample_F2(rng: random.Random, ymax: float = 3.0, tol: float = F2_TOL) -> SiegelPoint:
    """Rejection sampler on F_2 with y4 <= ymax."""
    lo = math.sqrt(3) / 2
    while True:
        y1 = rng.uniform(lo, ymax)
        y4 = rng.uniform(y1, ymax)
        y2 = rng.uniform(0, y1 / 2)
        re = [rng.uniform(-0.5, 0.5) for _ in range(3)]
        try:
            tau = SiegelPoint(complex(re[0], y1), complex(re[1], y2), complex(re[2], y4))
        except ValueError:
            continue
        if is_in_F2(tau, -tol if tol else 0.0):
            return tau


def random_symplectic(rng: random.Random, length: int = 6) -> SymplecticMatrix:
    """A random word in J, elementary translations and GL_2 generators."""
    gens = [
        J_MATRIX,
        translation([[1, 0], [0, 0]]), translation([[0, 0], [0, 1]]), translation([[0, 1], [1, 0]]),
        translation([[-1, 0], [0, 0]]), translation([[0, 0], [0, -1]]), translation([[0, -1], [-1, 0]]),
        gl2_embed([[0, 1], [1, 0]]), gl2_embed([[1, 1], [0, 1]]), gl2_embed([[1, -1], [0, 1]]),
    ]
    g = IDENTITY
    for _ in range(length):
        g = rng.choice(gens) @ g
    return g
