import math
from fractions import Fraction
from math import gcd

import mpmath as mp
import pytest

from heightlab.algnum import (
    AlgebraicNumber,
    IntPoly,
    complex_roots,
    euler_phi,
    primitive_roots_of_unity,
    rational_weil_height,
    toric_canonical_height,
    weil_height,
)
from heightlab.errors import NonSquarefreeError, ZeroInputError


def bisect_root(lo, hi, poly, steps=200):
    """Independent oracle: bisection for a real root of an integer polynomial."""
    def ev(x):
        acc = mp.mpf(0)
        for c in poly:
            acc = acc * x + c
        return acc
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    assert ev(lo) * ev(hi) < 0
    for _ in range(steps):
        mid = (lo + hi) / 2
        if ev(lo) * ev(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def cyclotomic(n):
    """Phi_n by exact recursive division of x^n - 1 (oracle-grade construction)."""
    polys = {}
    for m in range(1, n + 1):
        num = [Fraction(1)] + [Fraction(0)] * (m - 1) + [Fraction(-1)]
        for d in range(1, m):
            if m % d == 0:
                num = _poly_div_exact(num, polys[d])
        polys[m] = num
    return IntPoly(tuple(int(c) for c in polys[n]))


def _poly_div_exact(num, den):
    num = list(num)
    out = []
    while len(num) >= len(den):
        q = num[0] / den[0]
        out.append(q)
        for i, c in enumerate(den):
            num[i] -= q * c
        assert num[0] == 0
        num.pop(0)
    assert all(c == 0 for c in num)
    return out


class TestIntPoly:
    def test_text_parsing(self):
        assert IntPoly.from_text("x^2 - x - 1").coefficients == (1, -1, -1)
        assert IntPoly.from_text("2x - 3").coefficients == (2, -3)
        assert IntPoly.from_text("x^4 - x^2 + 1").coefficients == (1, 0, -1, 0, 1)
        # primitive normalization makes the leading coefficient positive
        assert IntPoly.from_text("-x^2 + 2").coefficients == (1, 0, -2)

    def test_json_form_constant_last(self):
        p = IntPoly.from_json([2, 0, -1])  # 2x^2 - 1
        assert p.degree == 2 and p.leading == 2 and p.constant == -1

    def test_primitive_normalization(self):
        assert IntPoly((2, 4, 6)).coefficients == (1, 2, 3)

    def test_squarefree_detection(self):
        assert IntPoly((1, -1, -1)).is_squarefree()
        assert not IntPoly((1, -2, 1)).is_squarefree()  # (x-1)^2
        with pytest.raises(NonSquarefreeError):
            complex_roots(IntPoly((1, -2, 1)))

    def test_degree_zero_rejected(self):
        with pytest.raises(ValueError):
            IntPoly((5,))


class TestComplexRoots:
    def test_forced_roots_of_x2_plus_1(self):
        roots = complex_roots(IntPoly((1, 0, 1)))
        # ordering: lexicographic on (re, im): -i before i
        assert abs(roots[0] - mp.mpc(0, -1)) < 1e-30
        assert abs(roots[1] - mp.mpc(0, 1)) < 1e-30

    def test_golden_ratio_against_bisection_oracle(self):
        oracle = bisect_root(1, 2, [1, -1, -1])
        roots = complex_roots(IntPoly((1, -1, -1)), 128)
        assert abs(roots[1] - oracle) < mp.mpf(2) ** -120
        oracle_neg = bisect_root(-1, 0, [1, -1, -1])
        assert abs(roots[0] - oracle_neg) < mp.mpf(2) ** -120

    def test_linear(self):
        (r,) = complex_roots(IntPoly((2, -3)))
        assert abs(r - 1.5) < 1e-30

    def test_deterministic_ordering(self):
        a = complex_roots(IntPoly((1, 0, 0, -2)), 96)
        b = complex_roots(IntPoly((1, 0, 0, -2)), 96)
        assert all(abs(x - y) == 0 for x, y in zip(a, b))

    def test_precision_unreachable_surface(self, monkeypatch):
        from heightlab import algnum
        from heightlab.errors import PrecisionUnreachableError

        def always_fails(*args, **kwargs):
            raise mp.libmp.NoConvergence("forced")

        monkeypatch.setattr(algnum.mp, "polyroots", always_fails)
        with pytest.raises(PrecisionUnreachableError):
            complex_roots(IntPoly((1, -1, -1)))


class TestWeilHeight:
    def test_roots_of_unity_have_height_zero(self):
        assert weil_height(AlgebraicNumber.from_rational(1)) == 0.0
        assert toric_canonical_height(AlgebraicNumber(IntPoly((1, 1)))) < 1e-15  # -1

    def test_height_of_two(self):
        assert abs(weil_height(AlgebraicNumber.from_rational(2)) - math.log(2)) < 1e-14

    def test_rationals_forced_formula(self):
        for q in range(1, 25):
            for p in range(-25, 26):
                if p == 0 or gcd(abs(p), q) != 1:
                    continue
                h = weil_height(AlgebraicNumber.from_rational(p, q))
                assert abs(h - math.log(max(abs(p), q))) < 1e-12
                assert h == rational_weil_height(p, q) or abs(h - rational_weil_height(p, q)) < 1e-12

    def test_golden_ratio_via_tate_squaring_oracle(self):
        # oracle: lim 2^-k h_naive(phi^(2^k)) with h_naive the naive rational-ish
        # height log max(1, |.|) summed over conjugates plus leading term
        with mp.workprec(220):
            phi_val = bisect_root(1, 2, [1, -1, -1])
            # for the quadratic unit, the limit is (1/2) log phi
            oracle = mp.log(phi_val) / 2
            est = None
            for k in range(1, 30):
                power = phi_val ** (2**k)
                # naive height of the algebraic integer phi^(2^k): its conjugate
                # is +-phi^(-2^k), so h = (1/2) log max(1, power)
                est = mp.log(power) / 2 / 2**k
            assert abs(est - oracle) < mp.mpf(2) ** -180
        h = weil_height(AlgebraicNumber(IntPoly((1, -1, -1)), 1))
        assert abs(h - float(oracle)) < 1e-13

    def test_galois_invariance_exact(self):
        p = IntPoly((1, 0, -1, 3))
        hs = {weil_height(AlgebraicNumber(p, i)) for i in range(3)}
        assert len(hs) == 1  # identical bit-for-bit: height depends only on the polynomial

    def test_inverse_invariance(self):
        # h(alpha) = h(1/alpha): reversing the coefficients inverts the roots
        p = IntPoly((3, 1, -5, 2))
        prev = IntPoly(tuple(reversed(p.coefficients)))
        assert abs(weil_height(AlgebraicNumber(p)) - weil_height(AlgebraicNumber(prev))) < 1e-13

    def test_power_multiplicativity(self):
        # h(alpha^n) = n h(alpha), 1 <= n <= 8, for 100 random algebraic
        # numbers of degree <= 4 at 160-bit precision
        import random

        rng = random.Random(7)
        checked = 0
        while checked < 100:
            coeffs = [rng.randint(-6, 6) for _ in range(4)]
            poly_c = tuple([1] + coeffs)
            try:
                p = IntPoly(poly_c)
                if not p.is_squarefree() or p.constant == 0:
                    continue
                alpha = AlgebraicNumber(p, 0, 160)
            except Exception:
                continue
            for n in (1, 2, 3, 5, 8):
                pn = _power_min_poly(alpha, n)
                if pn is None:
                    break
                h1 = weil_height(alpha)
                hn = weil_height(AlgebraicNumber(pn, 0, 160))
                assert abs(hn - n * h1) < 1e-10, (poly_c, n, hn, n * h1)
            else:
                checked += 1


def _power_min_poly(alpha, n):
    """prod (x - alpha_i^n) expanded at high precision and rounded to integers."""
    with mp.workprec(alpha.precision_bits + 64):
        roots = [r**n for r in alpha.conjugates]
        coeffs = [mp.mpc(1)]
        for r in roots:
            out = [mp.mpc(0)] * (len(coeffs) + 1)
            for i, c in enumerate(coeffs):
                out[i] += c
                out[i + 1] -= c * r
            coeffs = out
        lead = alpha.min_poly.leading ** n
        ints = []
        for c in coeffs:
            v = c * lead
            r = mp.nint(mp.re(v))
            if abs(v - r) > mp.mpf("1e-20") * (1 + abs(v)):
                return None
            ints.append(int(r))
    try:
        p = IntPoly(tuple(ints))
        return p if p.is_squarefree() else None
    except ValueError:
        return None


class TestToricCanonicalHeight:
    def test_two(self):
        h = toric_canonical_height(AlgebraicNumber.from_rational(2))
        assert abs(h - 2 * math.log(2)) < 1e-12

    def test_kronecker_property(self):
        # cyclotomic polynomials of degree <= 12 all give height < 1e-10
        cyclos = [n for n in range(1, 40) if euler_phi(n) <= 12]
        for n in cyclos:
            p = cyclotomic(n)
            assert toric_canonical_height(AlgebraicNumber(p)) < 1e-10, n
        # non-cyclotomic corpus, including Lehmer's degree-10 polynomial
        lehmer = IntPoly((1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1))
        noncyclo = [IntPoly((1, -1, -1)), IntPoly((1, 0, -2)), IntPoly((1, 0, 0, -2)), lehmer]
        for p in noncyclo:
            assert toric_canonical_height(AlgebraicNumber(p)) > 1e-10, p

    def test_zero_input(self):
        with pytest.raises(ZeroInputError):
            toric_canonical_height(AlgebraicNumber(IntPoly((1, 0))))  # alpha = 0

    def test_golden_ratio(self):
        oracle = float(mp.log(bisect_root(1, 2, [1, -1, -1])))
        h = toric_canonical_height(AlgebraicNumber(IntPoly((1, -1, -1))))
        assert abs(h - oracle) < 1e-13


class TestPrimitiveRootsOfUnity:
    def test_small_cases(self):
        assert len(primitive_roots_of_unity(1)) == 1
        pts = primitive_roots_of_unity(4)
        assert len(pts) == 2
        assert all(abs(abs(z) - 1) < 1e-30 for z in pts)

    def test_phi12_by_gcd_enumeration(self):
        oracle = sum(1 for k in range(12) if gcd(k, 12) == 1)
        assert oracle == 4
        assert len(primitive_roots_of_unity(12)) == oracle

    def test_orders(self):
        for z in primitive_roots_of_unity(7):
            w = mp.mpc(1)
            for order in range(1, 8):
                w = w * z
                if abs(w - 1) < 1e-20:
                    break
            assert order == 7
