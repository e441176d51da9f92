"""Rank-1 torus extensions G of an elliptic curve, as complex-analytic groups.

The model is G(C) = (C x C*)/Lambda, where lambda in Lambda acts by
(z, w) -> (z + lambda, a(lambda) w) with the constant automorphy factor
a(lambda) = exp(etahat(lambda) u).  Here etahat is the quasi-period map of the
lattice extended R-linearly and u is a complex parameter representing the
extension class (a point of the dual curve under the self-duality of E).

This makes the additive Weil function closed-form,

    lambda_G(z, w) = log|w| - Re(etahat(z) u),

independent of the representative and exactly additive.  Torsion points and
Haar samples of the maximal compact subgroup are constructed in exponent
arithmetic so that lambda_G vanishes on them identically.  The isogeny ladder
divides the extension class: level n carries u_n = (u + branch)/n and the
degree-n isogeny (z, w) -> (z, w^n e^{-cz}) down to G, where the exponent c
(zero for the default branch) is the unique linear unit making the cocycles
match.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

import mpmath as mp
import numpy as np

from .algnum import AlgebraicNumber, toric_canonical_height
from .elliptic import CurveQ, EllipticModel, EPoint
from .errors import (
    FiberZeroError,
    UnsupportedPointClassError,
    ZeroInputError,
)

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class GPoint:
    """Point of G in the normalized chart: base coordinates (s, t) in [0, 1),
    fiber coordinate w != 0.  The identity is (0, 0, 1)."""

    s: mp.mpf
    t: mp.mpf
    w: mp.mpc

    def __post_init__(self):
        if self.w == 0:
            raise FiberZeroError("w = 0 lies on the boundary divisor, not in G")

    @property
    def is_identity(self) -> bool:
        return self.s == 0 and self.t == 0 and self.w == 1

    def __repr__(self):
        return f"GPoint(s={mp.nstr(self.s, 8)}, t={mp.nstr(self.t, 8)}, w={mp.nstr(self.w, 8)})"


class GModel:
    """The extension of elliptic.curve by the multiplicative group with class [u]."""

    def __init__(self, elliptic: EllipticModel, u, precision_bits: Optional[int] = None):
        self.elliptic = elliptic
        self.precision_bits = precision_bits or elliptic.precision_bits
        L = elliptic.lattice
        self.lattice = L
        with mp.workprec(self.precision_bits + 16):
            self.u = mp.mpc(u)
            self.eta1_u = L.eta1 * self.u
            self.eta2_u = L.eta2 * self.u
            su, tu = L.coords(self.u)
            self.is_split = L.is_lattice_point(self.u)
            self._u_coords = (su, tu)

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_class_point(cls, elliptic: EllipticModel, point: EPoint,
                         precision_bits: Optional[int] = None) -> "GModel":
        """Extension class realized by a point of E (u = elliptic log of the point)."""
        return cls(elliptic, elliptic.elliptic_log(point), precision_bits)

    def _prec(self):
        return mp.workprec(self.precision_bits + 16)

    def same_model(self, other: "GModel") -> bool:
        with self._prec():
            return (
                self.elliptic is other.elliptic
                and abs(self.u - other.u) < mp.mpf(2) ** (-self.precision_bits // 2)
            )

    # -- cocycle in exponent arithmetic --------------------------------------

    def cocycle_exponent(self, m: int, n: int) -> mp.mpc:
        """etahat(m omega1 + n omega2) u; additive in (m, n) exactly."""
        return m * self.eta1_u + n * self.eta2_u

    def cocycle(self, m: int, n: int) -> mp.mpc:
        with self._prec():
            return mp.exp(self.cocycle_exponent(m, n))

    # -- chart reduction and group law ---------------------------------------

    def point(self, s, t, w) -> GPoint:
        """Canonical reduction of the representative (s omega1 + t omega2, w)."""
        with self._prec():
            s, t, w = mp.mpf(s), mp.mpf(t), mp.mpc(w)
            if w == 0:
                raise FiberZeroError("w = 0 lies on the boundary divisor, not in G")
            m, n = mp.floor(s), mp.floor(t)
            if m != 0 or n != 0:
                w = w * mp.exp(-self.cocycle_exponent(int(m), int(n)))
                s, t = s - m, t - n
            return GPoint(s, t, w)

    def point_zw(self, z, w) -> GPoint:
        s, t = self.lattice.coords(z)
        return self.point(s, t, w)

    def identity(self) -> GPoint:
        return GPoint(mp.mpf(0), mp.mpf(0), mp.mpc(1))

    def z_of(self, p: GPoint) -> mp.mpc:
        return p.s * self.lattice.omega1 + p.t * self.lattice.omega2

    def g_add(self, p: GPoint, q: GPoint) -> GPoint:
        with self._prec():
            return self.point(p.s + q.s, p.t + q.t, p.w * q.w)

    def g_neg(self, p: GPoint) -> GPoint:
        with self._prec():
            return self.point(-p.s, -p.t, 1 / p.w)

    def g_sub(self, p: GPoint, q: GPoint) -> GPoint:
        return self.g_add(p, self.g_neg(q))

    def g_mul(self, n: int, p: GPoint) -> GPoint:
        if n == 0:
            return self.identity()
        with self._prec():
            if n < 0:
                return self.g_neg(self.g_mul(-n, p))
            return self.point(n * p.s, n * p.t, p.w**n)

    # -- Weil function and heights -------------------------------------------

    def weil_lambda(self, p: GPoint) -> float:
        """lambda_G(z, w) = log|w| - Re(etahat(z) u); exactly additive."""
        with self._prec():
            val = mp.log(abs(p.w)) - mp.re((p.s * self.eta1_u + p.t * self.eta2_u))
            return float(val)

    def fiber_invariant(self, p: GPoint) -> mp.mpc:
        """W = w exp(-etahat(z) u); representative-independent, |W| = e^{lambda_G}."""
        with self._prec():
            return p.w * mp.exp(-(p.s * self.eta1_u + p.t * self.eta2_u))

    def compact_coords(self, p: GPoint) -> tuple[float, float, float]:
        """(s, t, tau) with tau = arg(W)/2pi in [0, 1); Haar on the maximal
        compact subgroup is the uniform measure in these coordinates."""
        with self._prec():
            W = self.fiber_invariant(p)
            tau = mp.arg(W) / (2 * mp.pi)
            tau = tau - mp.floor(tau)
            return (float(p.s), float(p.t), float(tau))

    def archimedean_fiber_height(self, p: GPoint) -> float:
        """|lambda_G|; vanishes exactly on the maximal compact subgroup."""
        return abs(self.weil_lambda(p))

    @staticmethod
    def canonical_height_fiber0(alpha: AlgebraicNumber) -> float:
        """Total canonical height of the point (identity base, fiber alpha).

        The base contribution vanishes over the identity, so this is the toric
        canonical height of alpha for the divisor [0] + [inf] on the fiber.
        """
        if alpha.min_poly.constant == 0:
            raise ZeroInputError("alpha = 0 lies on the boundary divisor")
        return toric_canonical_height(alpha)

    # -- torsion and Haar sampling --------------------------------------------

    def torsion_point(self, N: int, i: int, j: int, k: int) -> GPoint:
        """The torsion point indexed (i, j, k): base (i omega1 + j omega2)/N and
        fiber the k-th N-th root of the cocycle at (i, j); order N/gcd(i,j,k,N)."""
        with self._prec():
            expo = self.cocycle_exponent(i, j) / N
            w = mp.exp(expo + 2j * mp.pi * k / N)
            return GPoint(mp.mpf(i) / N, mp.mpf(j) / N, w)

    def torsion_points_G(self, N: int, primitive: bool = False) -> list[GPoint]:
        """All N^3 torsion points (or the primitive ones of exact order N)."""
        if N < 1:
            raise ValueError("N must be >= 1")
        out = []
        for i in range(N):
            for j in range(N):
                for k in range(N):
                    if primitive and gcd(gcd(i, j), gcd(k, N)) != 1:
                        continue
                    out.append(self.torsion_point(N, i, j, k))
        return out

    @staticmethod
    def torsion_order(N: int, i: int, j: int, k: int) -> int:
        return N // gcd(gcd(i, j), gcd(k, N))

    @staticmethod
    def primitive_torsion_count(N: int) -> int:
        cnt = N**3
        m = N
        p = 2
        while p * p <= m:
            if m % p == 0:
                cnt -= cnt // p**3
                while m % p == 0:
                    m //= p
            p += 1
        if m > 1:
            cnt -= cnt // m**3
        return cnt

    def max_compact_sample(self, count: int, rng_seed: int) -> list[GPoint]:
        """i.i.d. Haar samples of the maximal compact subgroup; every sample has
        weil_lambda = 0 by construction."""
        if count < 1:
            raise ValueError("count must be >= 1")
        s, t, tau = self.max_compact_sample_columns(count, rng_seed)
        return [self.compact_point(si, ti, ki) for si, ti, ki in zip(s, t, tau)]

    def max_compact_sample_columns(self, count: int, rng_seed: int):
        """Columnar Haar samples (s, t, tau) uniform in [0,1)^3 (tau = theta/2pi)."""
        rng = np.random.default_rng(rng_seed)
        return rng.random(count), rng.random(count), rng.random(count)

    def compact_point(self, s, t, tau) -> GPoint:
        """Point of the maximal compact with coordinates (s, t, tau)."""
        with self._prec():
            s, t = mp.mpf(float(s)), mp.mpf(float(t))
            expo = s * self.eta1_u + t * self.eta2_u
            w = mp.exp(mp.re(expo) + 2j * mp.pi * mp.mpf(float(tau)))
            return GPoint(s, t, w)

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        su, tu = self._u_coords
        digits = max(20, self.precision_bits // 3)
        return {
            "curve": self.elliptic.curve.to_json(),
            "u": {"s": mp.nstr(su, digits), "t": mp.nstr(tu, digits)},
            "precision_bits": self.precision_bits,
        }

    @classmethod
    def from_json(cls, obj: dict, elliptic: Optional[EllipticModel] = None) -> "GModel":
        precision = int(obj.get("precision_bits", 0)) or None
        if elliptic is None:
            curve = CurveQ.from_json(obj["curve"])
            elliptic = EllipticModel(curve, precision or 128)
        u_spec = obj["u"]
        if "x" in u_spec:
            pt = EPoint.exact(Fraction(str(u_spec["x"])), Fraction(str(u_spec["y"])))
            return cls.from_class_point(elliptic, pt, precision)
        L = elliptic.lattice
        with mp.workprec((precision or elliptic.precision_bits) + 16):
            u = mp.mpf(str(u_spec["s"])) * L.omega1 + mp.mpf(str(u_spec["t"])) * L.omega2
        return cls(elliptic, u, precision)


# ---------------------------------------------------------------------------
# Isogeny ladder


@dataclass(frozen=True)
class LadderLevel:
    """Level n of the ladder: a model G_n with n u_n = u + branch, and the
    degree-n isogeny phi_n: G_n -> G dividing the extension class."""

    n: int
    branch: tuple[int, int]
    base: GModel
    level_model: GModel
    u_n: mp.mpc
    c: mp.mpc  # exponent of the linear unit in phi_n; zero for branch (0, 0)

    def phi(self, p: GPoint) -> GPoint:
        """phi_n(z, w) = (z, w^n e^{-c z}); satisfies
        lambda_G(phi(p)) = n lambda_{G_n}(p) exactly."""
        base = self.base
        with base._prec():
            z = p.s * base.lattice.omega1 + p.t * base.lattice.omega2
            w = p.w**self.n * mp.exp(-self.c * z)
            return GPoint(p.s, p.t, w)

    def kernel(self) -> list[GPoint]:
        """The n fiber n-th roots of unity in G_n."""
        return [
            GPoint(mp.mpf(0), mp.mpf(0), mp.exp(2j * mp.pi * mp.mpf(k) / self.n))
            for k in range(self.n)
        ]

    def divide(self, p: GPoint) -> GPoint:
        """The canonical preimage of p under phi_n (principal fiber root)."""
        base = self.base
        with base._prec():
            z = p.s * base.lattice.omega1 + p.t * base.lattice.omega2
            w = mp.exp((mp.log(p.w) + self.c * z) / self.n)
            return GPoint(p.s, p.t, w)

    def cocycle_residual(self) -> float:
        """max over generators of |n etahat(omega_i) u_n - etahat(omega_i) u
        - etahat(omega_i) branch|; identically zero in exponent arithmetic."""
        base = self.base
        L = base.lattice
        lam_b = self.branch[0] * L.omega1 + self.branch[1] * L.omega2
        worst = 0.0
        with base._prec():
            for eta in (L.eta1, L.eta2):
                res = abs(self.n * (eta * self.u_n) - eta * base.u - eta * lam_b)
                worst = max(worst, float(res))
        return worst


def ladder_level(model: GModel, n: int, branch: tuple[int, int] = (0, 0)) -> LadderLevel:
    """Choose the n-division u_n = (u + b1 omega1 + b2 omega2)/n of the class."""
    if n < 1:
        raise ValueError("n must be >= 1")
    L = model.lattice
    b1, b2 = branch
    with model._prec():
        lam_b = b1 * L.omega1 + b2 * L.omega2
        u_n = (model.u + lam_b) / n
        c = (L.eta1 * lam_b - 2j * mp.pi * b2) / L.omega1
        level_model = GModel(model.elliptic, u_n, model.precision_bits)
        return LadderLevel(n=n, branch=(b1, b2), base=model,
                           level_model=level_model, u_n=mp.mpc(u_n), c=mp.mpc(c))


def phi_n(level: LadderLevel, p: GPoint) -> GPoint:
    return level.phi(p)


def point_height_ladder(level: LadderLevel, fiber_alpha: Optional[AlgebraicNumber] = None,
                        torsion: bool = False) -> float:
    """Canonical height of the phi_n-preimages of an exactly-computable point:
    n^-1 hhat_M(x) + hhat_{pi*N}(x).

    Supported classes are torsion points (both terms vanish) and points over
    the identity with algebraic fiber coordinate alpha (base term vanishes,
    toric term is the canonical fiber height).
    """
    if torsion:
        return 0.0
    if fiber_alpha is not None:
        return GModel.canonical_height_fiber0(fiber_alpha) / level.n
    raise UnsupportedPointClassError(
        "only torsion points and identity-fiber algebraic points are exactly computable"
    )


def alpha_m(model: GModel, points: Sequence[GPoint]) -> list[GPoint]:
    """Successive differences (x1 - x2, ..., x_{m-1} - x_m)."""
    if len(points) < 2:
        raise ValueError("need at least two points")
    return [model.g_sub(points[i], points[i + 1]) for i in range(len(points) - 1)]


def build_extension(elliptic: EllipticModel, u, precision_bits: Optional[int] = None) -> GModel:
    """Model of the extension of E by the multiplicative group with class [u]."""
    return GModel(elliptic, u, precision_bits)
