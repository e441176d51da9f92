"""Canonical measures and their integration.

The curvature measure of the canonical metric on the projective line is the
uniform measure on the unit circle with total mass 2 (d phi / pi); on the
curve it is Haar; on the maximal compact subgroup of G it is the product Haar
measure, uniform in the coordinates (s, t, tau).  Comparison integrals are
normalized to total mass 1 (division by the degree), matching the weak-*
limit statements; the raw per-factor mass 2 convention is recorded in
metadata.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .semiabelian import GModel, LadderLevel

RAW_CIRCLE_MASS = 2.0  # mass of d phi / pi on [0, 2 pi]


# ---------------------------------------------------------------------------
# Test functions


@dataclass(frozen=True)
class TestFunction:
    """Closed-form test function on the unit circle or on the maximal compact.

    Circle functions receive complex points z; compact functions receive
    columnar coordinates (s, t, tau) in [0,1)^3 (tau = fiber angle / 2 pi).
    Characters carry their index so integrators can use exact orthogonality.
    """

    __test__ = False  # not a pytest class despite the name

    name: str
    space: str  # "s1" or "g_compact"
    evaluator: Callable
    smoothness: str = "smooth"  # "smooth", "continuous"
    char_index: Optional[tuple] = None

    def __call__(self, *args):
        return self.evaluator(*args)

    @property
    def is_character(self) -> bool:
        return self.char_index is not None

    @property
    def is_trivial_character(self) -> bool:
        return self.char_index is not None and not any(self.char_index)


def s1_character(m: int) -> TestFunction:
    return TestFunction(
        name=f"character({m})",
        space="s1",
        evaluator=lambda z: np.asarray(z, dtype=complex) ** m if m else np.ones_like(np.asarray(z, dtype=complex)),
        char_index=(m,),
    )


def g_character(m1: int, m2: int, m3: int) -> TestFunction:
    def ev(s, t, tau):
        return np.exp(2j * np.pi * (m1 * np.asarray(s) + m2 * np.asarray(t) + m3 * np.asarray(tau)))

    return TestFunction(
        name=f"character({m1},{m2},{m3})",
        space="g_compact",
        evaluator=ev,
        char_index=(m1, m2, m3),
    )


def fiber_abs_log(model: GModel) -> TestFunction:
    """|lambda_G| as a function on the compact (identically zero on its support)."""

    def ev(s, t, tau):
        return np.zeros_like(np.asarray(s, dtype=float))

    return TestFunction(name="fiber_abs_log", space="g_compact", evaluator=ev,
                        smoothness="continuous")


def smooth_bump(center: float, radius: float, axis: str = "tau") -> TestFunction:
    """C^infinity bump of the named coordinate: exp(1 - 1/(1 - (d/r)^2)) inside r."""
    idx = {"s": 0, "t": 1, "tau": 2}[axis]

    def ev(*cols):
        x = np.asarray(cols[idx] if len(cols) == 3 else cols[0], dtype=float)
        d = np.abs(((x - center) + 0.5) % 1.0 - 0.5)
        out = np.zeros_like(x)
        inside = d < radius
        r = d[inside] / radius
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - r * r))
        return out

    return TestFunction(name=f"smooth_bump({center},{radius},{axis})",
                        space="g_compact", evaluator=ev)


def hat(center: float, radius: float, axis: str = "s") -> TestFunction:
    """Continuous piecewise-linear hat of the named coordinate (C^0 only)."""
    idx = {"s": 0, "t": 1, "tau": 2}[axis]

    def ev(*cols):
        x = np.asarray(cols[idx] if len(cols) == 3 else cols[0], dtype=float)
        d = np.abs(((x - center) + 0.5) % 1.0 - 0.5)
        return np.maximum(0.0, 1.0 - d / radius)

    f = TestFunction(name=f"hat({center},{radius},{axis})", space="g_compact",
                     evaluator=ev, smoothness="continuous")
    return f


_FUNC_RE = re.compile(r"^(?P<head>[a-z_0-9]+)\s*(?:\((?P<args>[^)]*)\))?$")


def parse_test_function(text: str, model: Optional[GModel] = None) -> TestFunction:
    """Named test functions for config files: character(m1,m2,m3) or character(m),
    fiber_abs_log, smooth_bump(center,radius[,axis]), hat(center,radius[,axis])."""
    m = _FUNC_RE.match(text.strip())
    if not m:
        raise ValueError(f"cannot parse test function {text!r}")
    head = m.group("head")
    args = [a.strip() for a in (m.group("args") or "").split(",") if a.strip()]
    if head == "character":
        ints = [int(a) for a in args]
        if len(ints) == 1:
            return s1_character(ints[0])
        if len(ints) == 3:
            return g_character(*ints)
        raise ValueError("character takes 1 (circle) or 3 (compact) indices")
    if head == "fiber_abs_log":
        return fiber_abs_log(model)
    if head in ("smooth_bump", "hat"):
        center, radius = float(args[0]), float(args[1])
        axis = args[2] if len(args) > 2 else ("tau" if head == "smooth_bump" else "s")
        return smooth_bump(center, radius, axis) if head == "smooth_bump" else hat(center, radius, axis)
    raise ValueError(f"unknown test function {head!r}")


# ---------------------------------------------------------------------------
# Strategies and results


@dataclass(frozen=True)
class QuadratureStrategy:
    order: int = 64  # points per circle factor


@dataclass(frozen=True)
class MonteCarloStrategy:
    count: int = 100_000
    seed: int = 0


@dataclass(frozen=True)
class IntegralResult:
    value: complex
    error_estimate: float
    strategy: str

    @property
    def real(self) -> float:
        return float(np.real(self.value))


@dataclass(frozen=True)
class CanonicalMeasure:
    """One of the canonical measures with its normalization and sampling plan.

    total mass: raw measure has mass 2 per circle factor (and deg N = 2 on the
    curve); normalized = True divides by the total degree so the measure is a
    probability measure, which is the convention all comparison integrals use.
    The maximal-compact Haar of G is the product of fiber-circle Haar and
    curve Haar, so "product" is an alias for it.
    """

    kind: str  # "s1_haar", "e_haar", "g_maxcompact_haar", "product"
    model: Optional[GModel] = None
    strategy: object = field(default_factory=QuadratureStrategy)
    normalized: bool = True

    @property
    def raw_mass(self) -> float:
        if self.kind == "s1_haar":
            return RAW_CIRCLE_MASS
        if self.kind == "e_haar":
            return 2.0  # deg N for the symmetric degree-2 polarization
        if self.kind in ("g_maxcompact_haar", "product"):
            return 8.0  # deg_L of the compactified G: 2 * 2 * 2
        raise ValueError(self.kind)

    def integral(self, f: TestFunction) -> IntegralResult:
        if self.kind == "s1_haar":
            order = self.strategy.order if isinstance(self.strategy, QuadratureStrategy) else 256
            val = s1_haar_integral(f, order)
            val2 = s1_haar_integral(f, max(8, order // 2))
            res = IntegralResult(val, abs(val - val2), f"trapezoid({order})")
        else:
            res = g_canonical_integral(f, self.model, self.strategy)
            if not self.normalized:
                return IntegralResult(res.value * self.raw_mass, res.error_estimate * self.raw_mass, res.strategy)
            return res
        if self.normalized:
            return IntegralResult(res.value / self.raw_mass, res.error_estimate / self.raw_mass, res.strategy)
        return res


# ---------------------------------------------------------------------------
# Integrators


def s1_haar_integral(f, quadrature_order: int = 64):
    """(1/pi) int_0^{2pi} f(e^{i phi)) d phi by the trapezoid rule (raw mass 2)."""
    if callable(f) and not isinstance(f, TestFunction):
        ev = f
    elif isinstance(f, TestFunction):
        ev = f.evaluator
    else:
        const = complex(f)
        return const * RAW_CIRCLE_MASS
    phi = np.arange(quadrature_order) * (2 * np.pi / quadrature_order)
    z = np.exp(1j * phi)
    vals = np.asarray(ev(z), dtype=complex)
    return complex(_pairwise_sum(vals) * (2.0 / quadrature_order))


def p1_canonical_mass(quadrature_order: int = 64) -> float:
    """Total mass of the canonical curvature measure on the projective line (= 2)."""
    one = TestFunction("one", "s1", lambda z: np.ones_like(np.asarray(z, dtype=complex)))
    return float(np.real(s1_haar_integral(one, quadrature_order)))


def g_canonical_integral(f: TestFunction, model: GModel, strategy=None) -> IntegralResult:
    """int f dHaar over the maximal compact of G, normalized to mass 1.

    Characters integrate by exact orthogonality; smooth functions by tensor
    trapezoid quadrature in (s, t, tau); Monte Carlo is available for rough
    functions, with a 1/sqrt(M) error report.
    """
    strategy = strategy or QuadratureStrategy()
    if f.is_character:
        val = 1.0 + 0j if f.is_trivial_character else 0.0 + 0j
        return IntegralResult(val, 0.0, "orthogonality")
    if isinstance(strategy, MonteCarloStrategy):
        s, t, tau = model.max_compact_sample_columns(strategy.count, strategy.seed)
        vals = np.asarray(f(s, t, tau), dtype=complex)
        mean = _pairwise_sum(vals) / len(vals)
        se = float(np.std(vals) / math.sqrt(len(vals)))
        return IntegralResult(complex(mean), se, f"mc({strategy.count},seed={strategy.seed})")
    order = strategy.order
    val = _tensor_trapezoid(f, order)
    val_half = _tensor_trapezoid(f, max(8, order // 2))
    return IntegralResult(val, abs(val - val_half), f"tensor_trapezoid({order})")


def _tensor_trapezoid(f: TestFunction, order: int) -> complex:
    g = (np.arange(order) + 0.0) / order
    s, t, tau = np.meshgrid(g, g, g, indexing="ij")
    vals = np.asarray(f(s.ravel(), t.ravel(), tau.ravel()), dtype=complex)
    return complex(_pairwise_sum(vals) / vals.size)


def pushforward_projection_check(n: int, f: TestFunction, quadrature_order: int = 840) -> float:
    """|int (f o p) dHaar - int f dHaar| for p(z) = z^n on the circle.

    The degree of p cancels against the normalization, so both sides agree;
    the residual is pure quadrature error.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    ev = f.evaluator
    direct = s1_haar_integral(f, quadrature_order)
    composed = TestFunction(f"{f.name}∘z^{n}", "s1", lambda z: ev(np.asarray(z) ** n))
    pushed = s1_haar_integral(composed, quadrature_order)
    return float(abs(pushed - direct))


@dataclass(frozen=True)
class LadderMeasureRow:
    n: int
    pulled_back: complex
    base: complex
    residual: float
    sampling_error: float


def ladder_measure_check(
    levels: Sequence[LadderLevel],
    f: TestFunction,
    strategy=None,
) -> list[LadderMeasureRow]:
    """For each level n: int (f o phi_n) dHaar_{K_n} - int f dHaar_K.

    phi_n pushes Haar on the maximal compact of G_n to Haar on that of G, so
    the two sides agree up to sampling error; the table certifies the residual.
    """
    strategy = strategy or MonteCarloStrategy()
    out = []
    for level in levels:
        base = g_canonical_integral(f, level.base, strategy)
        if isinstance(strategy, MonteCarloStrategy):
            s, t, tau = level.level_model.max_compact_sample_columns(strategy.count, strategy.seed + level.n)
            s2, t2, tau2 = phi_compact_columns(level, s, t, tau)
            vals = np.asarray(f(s2, t2, tau2), dtype=complex)
            pulled = complex(_pairwise_sum(vals) / len(vals))
            se = float(np.std(vals) / math.sqrt(len(vals)))
        else:
            order = strategy.order
            pulled = _pulled_quadrature(level, f, order)
            pulled_half = _pulled_quadrature(level, f, max(8, order // 2))
            # embedded-order error estimate plus a roundoff floor
            se = abs(pulled - pulled_half) + 1e-15 * (1 + abs(pulled))
        err = math.hypot(se, base.error_estimate)
        out.append(
            LadderMeasureRow(
                n=level.n,
                pulled_back=pulled,
                base=complex(base.value),
                residual=float(abs(pulled - base.value)),
                sampling_error=float(err),
            )
        )
    return out


def _pulled_quadrature(level: LadderLevel, f: TestFunction, order: int) -> complex:
    g = (np.arange(order) + 0.0) / order
    s, t, tau = (a.ravel() for a in np.meshgrid(g, g, g, indexing="ij"))
    s2, t2, tau2 = phi_compact_columns(level, s, t, tau)
    vals = np.asarray(f(s2, t2, tau2), dtype=complex)
    return complex(_pairwise_sum(vals) / vals.size)


def phi_compact_columns(level: LadderLevel, s, t, tau):
    """phi_n in compact coordinates: (s, t, tau) on K_n maps to
    (s, t, n tau - n Im(etahat(z) u_n)/2pi + s b2 - t b1) on K."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    tau = np.asarray(tau, dtype=float)
    e1u = complex(level.level_model.eta1_u)
    e2u = complex(level.level_model.eta2_u)
    b1, b2 = level.branch
    im = s * e1u.imag + t * e2u.imag
    tau2 = (level.n * tau - level.n * im / (2 * np.pi) + s * b2 - t * b1) % 1.0
    return s, t, tau2


def _pairwise_sum(arr: np.ndarray):
    """Deterministic tree summation (numpy's pairwise reduction on a 1-d array)."""
    return np.add.reduce(np.asarray(arr).ravel())
