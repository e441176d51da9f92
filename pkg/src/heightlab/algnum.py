"""Exact algebraic numbers over Q presented by integer minimal polynomials.

Carries the absolute logarithmic Weil height (via the Mahler measure of the
minimal polynomial) and the canonical height for the divisor [0] + [inf] on
the multiplicative group, which vanishes exactly on roots of unity.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

import mpmath as mp

from .errors import NonSquarefreeError, PrecisionUnreachableError, ZeroInputError

DEFAULT_PRECISION_BITS = 128

_TERM_RE = re.compile(
    r"""\s*(?P<sign>[+-]?)\s*
        (?P<coef>\d+)?\s*\*?\s*
        (?:(?P<var>[a-zA-Z])\s*(?:\^\s*(?P<exp>\d+))?)?""",
    re.VERBOSE,
)


def _int_poly_gcd(f: Sequence[int], g: Sequence[int]) -> list[int]:
    """Primitive gcd of integer polynomials (coefficients leading-first)."""
    a = [x for x in f]
    b = [x for x in g]
    while b and any(b):
        # pseudo-remainder of a by b
        b = _strip(b)
        while len(a) >= len(b) and any(a):
            lead = a[0]
            lb = b[0]
            m = lcm(lead, lb)
            a = [x * (m // lead) for x in a]
            factor = m // lb
            for i, c in enumerate(b):
                a[i] -= factor * c
            a = _strip(a)
            if not any(a):
                break
        a, b = b, a
        a, b = _primitive_part(a), _primitive_part(b)
    return _primitive_part(_strip(a))


def lcm(x: int, y: int) -> int:
    return abs(x * y) // gcd(x, y) if x and y else 0


def _strip(c: Sequence[int]) -> list[int]:
    c = list(c)
    while len(c) > 1 and c[0] == 0:
        c.pop(0)
    return c


def _primitive_part(c: Sequence[int]) -> list[int]:
    c = _strip(c)
    g = 0
    for x in c:
        g = gcd(g, abs(x))
    if g > 1:
        c = [x // g for x in c]
    if c and c[0] < 0:
        c = [-x for x in c]
    return c


@dataclass(frozen=True)
class IntPoly:
    """Primitive integer polynomial, coefficients leading-first (constant last)."""

    coefficients: tuple[int, ...]

    def __post_init__(self):
        coeffs = _strip([int(c) for c in self.coefficients])
        if len(coeffs) < 2:
            raise ValueError("degree must be >= 1")
        if coeffs[0] == 0:
            raise ValueError("leading coefficient must be nonzero")
        coeffs = _primitive_part(coeffs)
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> int:
        return self.coefficients[0]

    @property
    def constant(self) -> int:
        return self.coefficients[-1]

    def derivative(self) -> list[int]:
        d = self.degree
        return [c * (d - i) for i, c in enumerate(self.coefficients[:-1])]

    def is_squarefree(self) -> bool:
        g = _int_poly_gcd(list(self.coefficients), self.derivative())
        return len(g) == 1

    def __call__(self, x):
        acc = mp.mpc(0)
        for c in self.coefficients:
            acc = acc * x + c
        return acc

    @classmethod
    def from_json(cls, coeffs: Sequence[int]) -> "IntPoly":
        """JSON form: integer array, leading coefficient first, constant last."""
        return cls(tuple(int(c) for c in coeffs))

    @classmethod
    def from_text(cls, text: str) -> "IntPoly":
        """Parse 'a_0 x^d + ... + a_d', e.g. 'x^2 - x - 1' or '2x - 3'."""
        terms: dict[int, int] = {}
        pos = 0
        seen = False
        while pos < len(text):
            m = _TERM_RE.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse polynomial at: {text[pos:]!r}")
            sign = -1 if m.group("sign") == "-" else 1
            coef = m.group("coef")
            var = m.group("var")
            exp = m.group("exp")
            if coef is None and var is None:
                raise ValueError(f"cannot parse polynomial at: {text[pos:]!r}")
            c = sign * (int(coef) if coef is not None else 1)
            e = 0 if var is None else (int(exp) if exp is not None else 1)
            terms[e] = terms.get(e, 0) + c
            seen = True
            pos = m.end()
            while pos < len(text) and text[pos].isspace():
                pos += 1
        if not seen:
            raise ValueError("empty polynomial text")
        d = max(terms)
        return cls(tuple(terms.get(d - i, 0) for i in range(d + 1)))

    def __str__(self) -> str:
        parts = []
        d = self.degree
        for i, c in enumerate(self.coefficients):
            if c == 0:
                continue
            e = d - i
            mag = abs(c)
            if e == 0:
                s = f"{mag}"
            elif e == 1:
                s = f"{mag}x" if mag != 1 else "x"
            else:
                s = f"{mag}x^{e}" if mag != 1 else f"x^{e}"
            parts.append(("- " if c < 0 else "+ ") + s)
        out = " ".join(parts)
        return out[2:] if out.startswith("+ ") else "-" + out[2:]


def complex_roots(p: IntPoly, precision_bits: int = DEFAULT_PRECISION_BITS) -> list[complex]:
    """All d roots of p, certified to 2^-precision_bits, deterministically ordered.

    Ordering is lexicographic on (real, imag) rounded at the working precision,
    ties broken by unrounded imaginary part descending.
    """
    return [mp.mpc(r) for r in _roots_mp(p, precision_bits)]


def _roots_mp(p: IntPoly, precision_bits: int) -> list[mp.mpc]:
    if not p.is_squarefree():
        raise NonSquarefreeError(f"gcd(p, p') is nonconstant for {p}")
    target = mp.mpf(2) ** (-precision_bits)
    for extra in (60, 160, 400):
        with mp.workprec(precision_bits + 2 * extra):
            try:
                roots, err = mp.polyroots(
                    list(p.coefficients), maxsteps=200, extraprec=extra, error=True
                )
            except mp.libmp.NoConvergence:
                continue
            if err <= target:
                scale = mp.mpf(2) ** precision_bits

                def key(r):
                    return (
                        int(mp.floor(mp.re(r) * scale + mp.mpf("0.5"))),
                        int(mp.floor(mp.im(r) * scale + mp.mpf("0.5"))),
                        mp.im(-r),
                    )

                return sorted((mp.mpc(r) for r in roots), key=key)
    raise PrecisionUnreachableError(
        f"could not certify roots of {p} to 2^-{precision_bits}"
    )


@dataclass(frozen=True)
class AlgebraicNumber:
    """One complex embedding of the algebraic number with minimal polynomial min_poly."""

    min_poly: IntPoly
    embedding_index: int = 0
    precision_bits: int = DEFAULT_PRECISION_BITS
    _roots: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        roots = _roots_mp(self.min_poly, self.precision_bits)
        if not 0 <= self.embedding_index < len(roots):
            raise ValueError(
                f"embedding_index {self.embedding_index} out of range for degree {self.min_poly.degree}"
            )
        object.__setattr__(self, "_roots", tuple(roots))

    @property
    def value(self) -> mp.mpc:
        return self._roots[self.embedding_index]

    @property
    def conjugates(self) -> tuple:
        return self._roots

    @classmethod
    def from_rational(cls, num: int, den: int = 1, precision_bits: int = DEFAULT_PRECISION_BITS):
        if den == 0:
            raise ZeroDivisionError("denominator is zero")
        g = gcd(abs(num), abs(den))
        num, den = num // g, den // g
        return cls(IntPoly((den, -num)), 0, precision_bits)


def weil_height(alpha: AlgebraicNumber) -> float:
    """Absolute logarithmic Weil height via the Mahler measure of min_poly.

    h = (1/d) (log|a_0| + sum_i log max(1, |alpha_i|)); depends only on the
    minimal polynomial, so all embeddings give the identical value.
    """
    p = alpha.min_poly
    with mp.workprec(alpha.precision_bits + 20):
        acc = mp.log(abs(p.leading))
        for r in alpha.conjugates:
            m = abs(r)
            if m > 1:
                acc += mp.log(m)
        return float(acc / p.degree)


def toric_canonical_height(alpha: AlgebraicNumber) -> float:
    """Canonical height for the divisor [0] + [inf] on the multiplicative group.

    Equals weil_height(alpha) + weil_height(1/alpha) = 2 weil_height(alpha);
    vanishes exactly on roots of unity.
    """
    if alpha.min_poly.constant == 0:
        raise ZeroInputError("alpha = 0 is a boundary point")
    return 2.0 * weil_height(alpha)


def primitive_roots_of_unity(n: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> list[mp.mpc]:
    """The phi(n) primitive n-th roots of unity e^(2 pi i k/n), gcd(k, n) = 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    with mp.workprec(precision_bits + 10):
        return [mp.expjpi(mp.mpf(2 * k) / n) for k in range(n) if gcd(k, n) == 1]


def euler_phi(n: int) -> int:
    out = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            out -= out // p
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out -= out // m
    return out


def rational_weil_height(num: int, den: int) -> float:
    """h(p/q) = log max(|p|, |q|) for p/q in lowest terms."""
    g = gcd(abs(num), abs(den))
    return math.log(max(abs(num) // g, abs(den) // g))
