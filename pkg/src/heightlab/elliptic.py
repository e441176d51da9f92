"""Elliptic curves y^2 = x^3 + a x + b over Q and C.

Period lattices and quasi-periods come from Carlson symmetric integrals and
Eisenstein series, with the computed pair certified against the curve by
reconstructing (a, b) from the q-expansion.  The lattice is normalized to the
differential dx/(2y), so the analytic parametrization is exactly
(x, y) = (wp(z), wp'(z)/2) and wp(omega/2) hits the 2-torsion x-coordinates.

The global Neron-Tate height is a pure Tate limit over exact arithmetic
(gmpy2 integers), with the archimedean Neron function available separately
through the normalized sigma function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

import mpmath as mp

try:
    import gmpy2
    from gmpy2 import mpz
except ImportError:  # pragma: no cover - gmpy2 is a hard dependency in practice
    gmpy2 = None
    mpz = int

from .errors import (
    CoordinateOverflowError,
    PoleAtLatticePointError,
    PrecisionUnreachableError,
    SingularCurveError,
    UnsupportedPointClassError,
)

DEFAULT_PRECISION_BITS = 128
MAX_TATE_DEPTH = 12  # size-driven cap: exact coordinates grow like 4^k digits
SMALL_ORBIT_BITS = 200_000  # orbits staying this small may iterate deeper
DEEP_TATE_DEPTH = 40
COORD_BIT_BUDGET = 400_000_000


def _F(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class CurveQ:
    """y^2 = x^3 + a x + b with exact rational a, b and nonzero discriminant."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", _F(self.a))
        object.__setattr__(self, "b", _F(self.b))
        if self.discriminant == 0:
            raise SingularCurveError(f"discriminant vanishes for a={self.a}, b={self.b}")

    @property
    def discriminant(self) -> Fraction:
        return -16 * (4 * self.a**3 + 27 * self.b**2)

    def contains(self, x: Fraction, y: Fraction) -> bool:
        x, y = _F(x), _F(y)
        return y * y == x**3 + self.a * x + self.b

    def integral_model(self) -> tuple["CurveQ", int]:
        """Scale (x, y) -> (u^2 x, u^3 y) so coefficients become integers."""
        u = 1
        da, db = self.a.denominator, self.b.denominator
        m = da * db // gcd(da, db)
        while (self.a * u**4).denominator != 1 or (self.b * u**6).denominator != 1:
            u *= m
        return CurveQ(self.a * u**4, self.b * u**6), u

    @classmethod
    def from_json(cls, obj: dict) -> "CurveQ":
        return cls(_parse_rat(obj["a"]), _parse_rat(obj["b"]))

    def to_json(self) -> dict:
        return {"a": str(self.a), "b": str(self.b)}


def _parse_rat(v) -> Fraction:
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10**12)
    if isinstance(v, dict):
        return Fraction(int(v["num"]), int(v["den"]))
    raise ValueError(f"cannot parse rational from {v!r}")


# ---------------------------------------------------------------------------
# Eisenstein series (q = e^{2 pi i tau}, |q| small after reduction)


def _eisenstein(tau, weight_coeff, power, terms=None):
    q = mp.exp(2j * mp.pi * tau)
    if terms is None:
        terms = max(8, int(mp.mp.prec * 0.70 / (-mp.log(abs(q), 2))) + 2)
    s = mp.mpf(0)
    for n in range(1, terms + 1):
        qn = q**n
        s += n**power * qn / (1 - qn)
    return 1 + weight_coeff * s


def eisenstein_e2(tau):
    return _eisenstein(tau, -24, 1)


def eisenstein_e4(tau):
    return _eisenstein(tau, 240, 3)


def eisenstein_e6(tau):
    return _eisenstein(tau, -504, 5)


@dataclass(frozen=True)
class PeriodLattice:
    """Periods and quasi-periods of dx/(2y), with tau in the fundamental domain."""

    omega1: mp.mpc
    omega2: mp.mpc
    eta1: mp.mpc
    eta2: mp.mpc
    tau: mp.mpc
    precision_bits: int
    disc: mp.mpc  # lattice discriminant g2^3 - 27 g3^2 (= curve discriminant)

    @property
    def nome(self):
        return mp.exp(1j * mp.pi * self.tau)

    def legendre_residual(self) -> float:
        return float(abs(self.eta1 * self.omega2 - self.eta2 * self.omega1 - 2j * mp.pi))

    def coords(self, z) -> tuple[mp.mpf, mp.mpf]:
        """Real (s, t) with z = s omega1 + t omega2."""
        w1, w2 = self.omega1, self.omega2
        det = mp.re(w1) * mp.im(w2) - mp.im(w1) * mp.re(w2)
        zr, zi = mp.re(z), mp.im(z)
        s = (zr * mp.im(w2) - zi * mp.re(w2)) / det
        t = (zi * mp.re(w1) - zr * mp.im(w1)) / det
        return s, t

    def reduce(self, z) -> mp.mpc:
        """Representative of z mod the lattice with coordinates in [0, 1)."""
        s, t = self.coords(z)
        return (s - mp.floor(s)) * self.omega1 + (t - mp.floor(t)) * self.omega2

    def eta_linear(self, z) -> mp.mpc:
        """R-linear quasi-period map: s omega1 + t omega2 -> s eta1 + t eta2."""
        s, t = self.coords(z)
        return s * self.eta1 + t * self.eta2

    def is_lattice_point(self, z, tol=None) -> bool:
        s, t = self.coords(z)
        tol = tol if tol is not None else mp.mpf(2) ** (-self.precision_bits // 2)
        ds = abs(s - mp.nint(s))
        dt = abs(t - mp.nint(t))
        return ds < tol and dt < tol


def periods(curve: CurveQ, precision_bits: int = DEFAULT_PRECISION_BITS) -> PeriodLattice:
    """Period lattice of dx/(2y) via Carlson R_F, certified by q-expansion."""
    a, b = curve.a, curve.b
    guard = 40
    with mp.workprec(precision_bits + guard):
        af, bf = mp.mpf(a.numerator) / a.denominator, mp.mpf(b.numerator) / b.denominator
        roots = mp.polyroots([mp.mpf(1), mp.mpf(0), af, bf], extraprec=guard)
        roots = sorted(roots, key=lambda r: (mp.re(r), mp.im(r)))
        cands = []
        for i in range(3):
            j, k = [m for m in range(3) if m != i]
            cands.append(2 * mp.elliprf(0, roots[i] - roots[j], roots[i] - roots[k]))
        target = mp.mpf(2) ** (-(precision_bits // 2))
        best = None
        for i in range(3):
            for j in range(3):
                if i == j:
                    continue
                w1, w2 = cands[i], cands[j]
                if abs(w1) < target or abs(w2) < target:
                    continue
                if mp.im(w2 / w1) < 0:
                    w2 = -w2
                if mp.im(w2 / w1) <= 0:
                    continue
                w1r, w2r = _reduce_basis(w1, w2)
                tau = w2r / w1r
                g2 = (2 * mp.pi / w1r) ** 4 * eisenstein_e4(tau) / 12
                g3 = (2 * mp.pi / w1r) ** 6 * eisenstein_e6(tau) / 216
                res = abs(g2 + 4 * af) + abs(g3 + 4 * bf)
                if best is None or res < best[0]:
                    best = (res, w1r, w2r, tau)
        if best is None or best[0] > target * (1 + abs(af) ** 2 + abs(bf) ** 2):
            raise PrecisionUnreachableError(
                f"period search failed for a={a}, b={b} (residual {best[0] if best else 'n/a'})"
            )
        _, w1, w2, tau = best
        eta1 = mp.pi**2 / (3 * w1) * eisenstein_e2(tau)
        eta2 = (eta1 * w2 - 2j * mp.pi) / w1
        qbar = mp.exp(2j * mp.pi * tau)
        disc = (2 * mp.pi / w1) ** 12 * qbar * mp.qp(qbar) ** 24
        return PeriodLattice(
            omega1=mp.mpc(w1),
            omega2=mp.mpc(w2),
            eta1=mp.mpc(eta1),
            eta2=mp.mpc(eta2),
            tau=mp.mpc(tau),
            precision_bits=precision_bits,
            disc=mp.mpc(disc),
        )


def _reduce_basis(w1, w2):
    """Unimodular change of basis until tau = w2/w1 is in the fundamental domain."""
    for _ in range(200):
        tau = w2 / w1
        n = mp.nint(mp.re(tau))
        if n != 0:
            w2 = w2 - n * w1
            tau = w2 / w1
        if abs(tau) < 1 - mp.mpf(2) ** (-mp.mp.prec + 8):
            w1, w2 = w2, -w1
        else:
            break
    # prefer a real positive primary period when the domain allows it
    eps = mp.mpf(2) ** (-mp.mp.prec // 2)
    best = None
    for cand1, cand2 in ((w1, w2), (-w2, w1), (w2, -w1)):
        if mp.re(cand1) < 0 or (mp.re(cand1) == 0 and mp.im(cand1) < 0):
            cand1, cand2 = -cand1, -cand2
        tau = cand2 / cand1
        if mp.im(tau) <= 0:
            continue
        in_domain = abs(mp.re(tau)) <= mp.mpf("0.5") + eps and abs(tau) >= 1 - eps
        if not in_domain:
            continue
        is_real = abs(mp.im(cand1)) < eps * abs(cand1)
        if best is None or (is_real and not best[0]):
            best = (is_real, cand1, cand2)
    if best is None:
        return w1, w2
    return best[1], best[2]


# ---------------------------------------------------------------------------
# Points and the full model


@dataclass(frozen=True)
class EPoint:
    """Point of E: exact rationals (x, y), a complex parameter z, or the identity."""

    is_identity: bool = False
    x: Optional[Fraction] = None
    y: Optional[Fraction] = None
    z: Optional[mp.mpc] = None

    @classmethod
    def identity(cls) -> "EPoint":
        return cls(is_identity=True)

    @classmethod
    def exact(cls, x, y) -> "EPoint":
        return cls(x=_F(x), y=_F(y))

    @classmethod
    def param(cls, z) -> "EPoint":
        return cls(z=mp.mpc(z))

    @property
    def is_exact(self) -> bool:
        return self.is_identity or self.x is not None

    def __repr__(self):
        if self.is_identity:
            return "EPoint(O)"
        if self.x is not None:
            return f"EPoint({self.x}, {self.y})"
        return f"EPoint(z={mp.nstr(self.z, 10)})"


class EllipticModel:
    """Curve over Q together with its period lattice and special functions."""

    def __init__(self, curve: CurveQ, precision_bits: int = DEFAULT_PRECISION_BITS):
        self.curve = curve
        self.precision_bits = precision_bits
        self.lattice = periods(curve, precision_bits)
        self._orbit_cache: dict = {}
        self._int_curve, self._int_scale = curve.integral_model()
        self._dup_resultant = _duplication_resultant(self._int_curve)

    # -- special functions -------------------------------------------------

    def _prec(self):
        return mp.workprec(self.precision_bits + 24)

    def sigma(self, z) -> mp.mpc:
        """Weierstrass sigma via theta series."""
        L = self.lattice
        with self._prec():
            z = mp.mpc(z)
            v = mp.pi * z / L.omega1
            q = L.nome
            t1 = mp.jtheta(1, v, q)
            t1p0 = mp.jtheta(1, 0, q, 1)
            return (L.omega1 / mp.pi) * mp.exp(L.eta1 * z * z / (2 * L.omega1)) * t1 / t1p0

    def wp(self, z) -> mp.mpc:
        """Weierstrass wp normalized so that wp' ^2 = 4 (wp^3 + a wp + b)."""
        L = self.lattice
        with self._prec():
            z = mp.mpc(z)
            if L.is_lattice_point(z):
                raise PoleAtLatticePointError("wp has a pole on the lattice")
            v = mp.pi * z / L.omega1
            q = L.nome
            t1 = mp.jtheta(1, v, q)
            t2 = mp.jtheta(2, v, q)
            t1p0 = mp.jtheta(1, 0, q, 1)
            t20 = mp.jtheta(2, 0, q)
            t30 = mp.jtheta(3, 0, q)
            t40 = mp.jtheta(4, 0, q)
            core = (t1p0 * t2 / (t20 * t1)) ** 2 + (t30**4 + t40**4) / 3
            return (mp.pi / L.omega1) ** 2 * core

    def wp_prime(self, z) -> mp.mpc:
        """wp'(z) = -sigma(2z)/sigma(z)^4."""
        L = self.lattice
        with self._prec():
            z = mp.mpc(z)
            if L.is_lattice_point(z):
                raise PoleAtLatticePointError("wp' has a pole on the lattice")
            if L.is_lattice_point(2 * z):
                return mp.mpc(0)  # 2-torsion
            return -self.sigma(2 * z) / self.sigma(z) ** 4

    def point_coords(self, z) -> tuple[mp.mpc, mp.mpc]:
        """(x, y) = (wp(z), wp'(z)/2) on y^2 = x^3 + a x + b."""
        return self.wp(z), self.wp_prime(z) / 2

    def elliptic_log(self, P: EPoint) -> mp.mpc:
        """Parameter z (mod lattice) with wp(z) = x(P), wp'(z)/2 = y(P)."""
        if P.is_identity:
            return mp.mpc(0)
        if P.x is None:
            return self.lattice.reduce(P.z)
        L = self.lattice
        with self._prec():
            xf = mp.mpf(P.x.numerator) / P.x.denominator
            yf = mp.mpf(P.y.numerator) / P.y.denominator
            tol = mp.mpf(2) ** (-self.precision_bits // 2)
            if yf == 0:
                for i, j in ((1, 0), (0, 1), (1, 1)):
                    z = (i * L.omega1 + j * L.omega2) / 2
                    if abs(self.wp(z) - xf) < tol * (1 + abs(xf)):
                        return L.reduce(z)
                raise PrecisionUnreachableError(f"no half-period matches {P}")
            for z0 in self._log_seeds(xf):
                z = self._newton_log(z0, xf)
                if z is None:
                    continue
                px, py = self.point_coords(z)
                if abs(px - xf) < tol * (1 + abs(xf)):
                    if abs(py - yf) < tol * (1 + abs(yf)):
                        return L.reduce(z)
                    if abs(py + yf) < tol * (1 + abs(yf)):
                        return L.reduce(-z)
            raise PrecisionUnreachableError(f"elliptic log failed for {P}")

    def _log_seeds(self, xf, grid: int = 24):
        """Fundamental-domain grid points ranked by |wp - xf|, best first."""
        L = self.lattice
        cands = []
        for i in range(grid):
            for j in range(grid):
                s = (i + mp.mpf("0.5")) / grid
                t = (j + mp.mpf("0.5")) / grid
                z = s * L.omega1 + t * L.omega2
                try:
                    score = abs(self.wp(z) - xf)
                except PoleAtLatticePointError:
                    continue
                cands.append((score, z))
        cands.sort(key=lambda c: c[0])
        return [z for _, z in cands[:6]]

    def _newton_log(self, z, xf, steps=80):
        L = self.lattice
        tol = mp.mpf(2) ** (-self.precision_bits - 4)
        for _ in range(steps):
            if L.is_lattice_point(z):
                return None
            fx = self.wp(z) - xf
            if abs(fx) < tol * (1 + abs(xf)):
                return z
            d = self.wp_prime(z)
            if abs(d) < mp.mpf(2) ** (-self.precision_bits):
                z = z + L.omega1 * mp.mpf("1e-3")  # off a critical point
                continue
            step = fx / d
            cap = abs(L.omega1) / 8
            if abs(step) > cap:
                step = step / abs(step) * cap
            z = z - step
        return z if abs(self.wp(z) - xf) < mp.mpf(2) ** (-self.precision_bits // 2) * (1 + abs(xf)) else None

    # -- group law ----------------------------------------------------------

    def add(self, P: EPoint, Q: EPoint) -> EPoint:
        if P.is_identity:
            return Q
        if Q.is_identity:
            return P
        if P.is_exact and Q.is_exact:
            return self._add_exact(P, Q)
        zP = self.elliptic_log(P)
        zQ = self.elliptic_log(Q)
        z = self.lattice.reduce(zP + zQ)
        if self.lattice.is_lattice_point(z):
            return EPoint.identity()
        return EPoint.param(z)

    def negate(self, P: EPoint) -> EPoint:
        if P.is_identity:
            return P
        if P.is_exact:
            return EPoint.exact(P.x, -P.y)
        return EPoint.param(self.lattice.reduce(-P.z))

    def _add_exact(self, P: EPoint, Q: EPoint) -> EPoint:
        a = self.curve.a
        x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
        if x1 == x2:
            if y1 == -y2:
                return EPoint.identity()
            # tangent
            lam = (3 * x1 * x1 + a) / (2 * y1)
        else:
            lam = (y2 - y1) / (x2 - x1)
        x3 = lam * lam - x1 - x2
        y3 = lam * (x1 - x3) - y1
        return EPoint.exact(x3, y3)

    def mul(self, n: int, P: EPoint) -> EPoint:
        if n == 0 or P.is_identity:
            return EPoint.identity()
        if n < 0:
            return self.mul(-n, self.negate(P))
        if not P.is_exact:
            z = self.lattice.reduce(n * self.elliptic_log(P))
            if self.lattice.is_lattice_point(z):
                return EPoint.identity()
            return EPoint.param(z)
        acc = EPoint.identity()
        addend = P
        while n:
            if n & 1:
                acc = self.add(acc, addend)
            n >>= 1
            if n:
                addend = self.add(addend, addend)
        return acc

    # -- torsion ------------------------------------------------------------

    def torsion_points(self, n: int, primitive: bool = False) -> list[EPoint]:
        """All n^2 points z = (i omega1 + j omega2)/n; primitive keeps exact order n."""
        if n < 1:
            raise ValueError("n must be >= 1")
        L = self.lattice
        out = []
        for i in range(n):
            for j in range(n):
                if primitive and gcd(gcd(i, j), n) != 1:
                    continue
                if i == 0 and j == 0:
                    if not primitive or n == 1:
                        out.append(EPoint.identity())
                    continue
                out.append(EPoint.param((i * L.omega1 + j * L.omega2) / n))
        return out

    @staticmethod
    def primitive_torsion_count(n: int) -> int:
        cnt = n * n
        m = n
        p = 2
        while p * p <= m:
            if m % p == 0:
                cnt -= cnt // (p * p)
                while m % p == 0:
                    m //= p
            p += 1
        if m > 1:
            cnt -= cnt // (m * m)
        return cnt

    # -- heights ------------------------------------------------------------

    def neron_local_archimedean(self, z) -> float:
        """Archimedean Neron function: -log|sigma(z) e^{-z eta(z)/2}| - (1/12) log|disc|.

        Lambda-periodic, even, and normalized to have Haar average zero (the
        recorded constant is -(1/12) log|disc|); satisfies the duplication law
        lam(2z) = 4 lam(z) - log|wp'(z)| + quasi_parallelogram_constant.
        """
        L = self.lattice
        with self._prec():
            z = mp.mpc(z)
            if L.is_lattice_point(z):
                raise PoleAtLatticePointError("Neron function has a pole at lattice points")
            z = L.reduce(z)
            eta = L.eta_linear(z)
            val = -mp.log(abs(self.sigma(z) * mp.exp(-z * eta / 2))) - mp.log(abs(L.disc)) / 12
            return float(val)

    @property
    def normalization_constant(self) -> float:
        """Recorded additive constant of the Neron function: -(1/12) log|disc|."""
        return float(-mp.log(abs(self.lattice.disc)) / 12)

    @property
    def quasi_parallelogram_constant(self) -> float:
        """c with lam(2z) = 4 lam(z) - log|wp'(z)| + c; equals (1/4) log|disc|."""
        return float(mp.log(abs(self.lattice.disc)) / 4)

    def neron_tate(self, P: EPoint, tolerance: float = 1e-7) -> "NeronTateResult":
        """hhat(P) = lim 4^-k (1/2) h(x([2^k] P)) by exact doubling.

        Stops when three consecutive estimates agree within tolerance or depth
        reaches the size cap (orbits whose coordinates stay small may iterate
        deeper; a repeated x-coordinate means the orbit is finite, i.e. the
        point is torsion and the height is exactly zero).  The returned error
        bound comes from the measured defect |h(x(2Q)) - 4 h(x(Q))| along the
        tail of the orbit.
        """
        if not P.is_exact:
            raise UnsupportedPointClassError("Neron-Tate limit needs an exact rational point")
        if P.is_identity:
            return NeronTateResult(0.0, 0.0, 0, True)
        if not self.curve.contains(P.x, P.y):
            raise ValueError(f"{P} is not on {self.curve.to_json()}")
        u = self._int_scale
        X = P.x * u * u
        p = mpz(X.numerator)
        q = mpz(X.denominator)
        ac = self._int_curve
        an, bn = mpz(int(ac.a)), mpz(int(ac.b))
        raw_h = 0.5 * _logmax(p, q)
        ests = [raw_h]
        defects: list[float] = []
        key = (int(p), int(q))
        seen = {key}
        k = 0
        while True:
            k += 1
            nxt = self._orbit_cache.get(key)
            if nxt is None:
                nxt = _x_double(p, q, an, bn, self._dup_resultant)
                if _bits(nxt[0]) + _bits(nxt[1]) > COORD_BIT_BUDGET:
                    raise CoordinateOverflowError(
                        f"doubling orbit exceeded {COORD_BIT_BUDGET} bits at depth {k}"
                    )
                self._orbit_cache[key] = nxt
            p, q = nxt
            key = (int(p), int(q))
            if key in seen or q == 0:
                # finite doubling orbit: the point is torsion
                return NeronTateResult(0.0, 0.0, k, True)
            seen.add(key)
            h = 0.5 * _logmax(p, q)
            defects.append(abs(h - 4 * raw_h))
            raw_h = h
            ests.append(h / 4**k)
            if k >= 3:
                diffs = [abs(ests[-m] - ests[-m - 1]) for m in (1, 2, 3)]
                if max(diffs) < tolerance:
                    defect = max(defects[-3:])
                    return NeronTateResult(ests[-1], defect / 4**k / 3, k, True)
            small = _bits(p) + _bits(q) < SMALL_ORBIT_BITS
            if k >= DEEP_TATE_DEPTH or (k >= MAX_TATE_DEPTH and not small):
                break
        defect = max(defects[-3:]) if len(defects) >= 3 else (max(defects) if defects else 0.0)
        err = defect / 4**k / 3
        return NeronTateResult(ests[-1], err, k, False)

    def is_torsion(self, P: EPoint, tol: float = 1e-8) -> bool:
        r = self.neron_tate(P)
        return r.value < tol


@dataclass(frozen=True)
class NeronTateResult:
    value: float
    error_bound: float
    depth: int
    converged: bool


def _bits(n) -> int:
    return int(gmpy2.num_digits(n, 2)) if gmpy2 is not None else int(n).bit_length()


def _logmax(p, q) -> float:
    ap, aq = abs(p), abs(q)
    m = ap if ap >= aq else aq
    if gmpy2 is not None:
        e = gmpy2.num_digits(m, 2) - 1
        mant = gmpy2.mpfr(m) / gmpy2.mpfr(2) ** e
        return float(e) * math.log(2) + math.log(float(mant))
    return _int_log(int(m))


def _int_log(n: int) -> float:
    e = n.bit_length() - 64
    if e <= 0:
        return math.log(n)
    return math.log(n >> e) + e * math.log(2)


def _x_double(p, q, a, b, resultant):
    """x([2]P) as a reduced fraction: gcd content divides 4 Res, stripped cheaply."""
    p2 = p * p
    q2 = q * q
    aq2 = a * q2
    t = p2 - aq2
    num = t * t - 8 * b * p * q * q2
    den = 4 * q * (p * (p2 + aq2) + b * q * q2)
    if den < 0:
        num, den = -num, -den
    r = resultant
    while True:
        g = gmpy2.gcd(num, r) if gmpy2 is not None else gcd(int(num), int(r))
        if g <= 1:
            break
        g = gmpy2.gcd(den, g) if gmpy2 is not None else gcd(int(den), int(g))
        if g <= 1:
            break
        num //= g
        den //= g
    return num, den


def _duplication_resultant(curve: CurveQ):
    """4 |Res_x(x^4 - 2a x^2 - 8b x + a^2, x^3 + a x + b)| for integral a, b."""
    a, b = int(curve.a), int(curve.b)
    f = [1, 0, -2 * a, -8 * b, a * a]
    g = [1, 0, a, b]
    return mpz(4 * abs(_resultant_int(f, g)))


def _resultant_int(f: Sequence[int], g: Sequence[int]) -> int:
    """Integer resultant via fraction-free elimination of the Sylvester matrix."""
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([0] * i + list(f) + [0] * (n - 1 - i))
    for i in range(m):
        rows.append([0] * i + list(g) + [0] * (m - 1 - i))
    mat = [[Fraction(x) for x in row] for row in rows]
    det = Fraction(1)
    for col in range(size):
        piv = next((r for r in range(col, size) if mat[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            mat[col], mat[piv] = mat[piv], mat[col]
            det = -det
        det *= mat[col][col]
        inv = 1 / mat[col][col]
        for r in range(col + 1, size):
            factor = mat[r][col] * inv
            if factor:
                mat[r] = [x - factor * y for x, y in zip(mat[r], mat[col])]
    assert det.denominator == 1
    return int(det)


def curve_from_json(obj: dict) -> CurveQ:
    return CurveQ.from_json(obj)


def point_from_json(obj: dict, model: Optional[EllipticModel] = None) -> EPoint:
    """{x, y} rationals, {s, t} lattice coordinates, or {identity: true}."""
    if obj.get("identity"):
        return EPoint.identity()
    if "x" in obj:
        return EPoint.exact(_parse_rat(obj["x"]), _parse_rat(obj["y"]))
    if "s" in obj:
        if model is None:
            raise ValueError("lattice-coordinate points need an EllipticModel context")
        L = model.lattice
        with mp.workprec(model.precision_bits + 16):
            z = mp.mpf(str(obj["s"])) * L.omega1 + mp.mpf(str(obj["t"])) * L.omega2
            if L.is_lattice_point(z):
                return EPoint.identity()
            return EPoint.param(L.reduce(z))
    raise ValueError(f"cannot parse point from {obj!r}")
