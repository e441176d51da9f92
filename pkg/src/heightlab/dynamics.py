"""Generic Tate limit engine and canonical metric potentials.

Canonical heights arise as limits d^-k h(f^k x) of a naive height along a
degree-d dynamical system; canonical metric potentials arise as uniform limits
of the pullback iteration g -> (g o f + c)/d, a sup-norm contraction with
ratio 1/d.  The per-step constant c is the logarithm of a rescaling of the
structure isomorphism; it shifts the fixed point by c/(d-1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    DomainEscapeError,
    NoConvergenceError,
    OverflowAtIterateError,
)


@dataclass(frozen=True)
class DynamicalHeightProblem:
    """A naive height and a degree-d self-map whose canonical height we want.

    step_constant is the log-rescaling applied at every pullback step (the
    constant of the structure isomorphism); it shifts the limit by
    step_constant/(degree-1).
    """

    naive_height: Callable[[object], float]
    dynamics: Callable[[object], object]
    degree: int
    max_iterations: int = 48
    tolerance: float = 1e-10
    step_constant: float = 0.0

    def __post_init__(self):
        if self.degree < 2:
            raise ValueError("degree must be >= 2")


@dataclass(frozen=True)
class TateLimitResult:
    value: float
    iterations: int
    error_bound: float
    defect: float  # recorded Lipschitz defect max |h(f x) - d h(x)| near the tail
    estimates: tuple[float, ...]


def tate_limit_detailed(problem: DynamicalHeightProblem, x) -> TateLimitResult:
    """Limit of d^-k naive(f^k x) (plus the step-constant geometric series).

    Stops once three consecutive estimates agree within problem.tolerance, to
    avoid stopping on an accidental plateau.
    """
    d = problem.degree
    c = problem.step_constant
    try:
        h = float(problem.naive_height(x))
    except OverflowError as exc:
        raise OverflowAtIterateError(str(exc)) from exc
    if not math.isfinite(h):
        raise OverflowAtIterateError(f"naive height not finite at start: {h}")
    estimates = [h]
    defects: list[float] = []
    scale = 1.0
    geom = 0.0
    prev_h = h
    point = x
    for k in range(1, problem.max_iterations + 1):
        try:
            point = problem.dynamics(point)
            h = float(problem.naive_height(point))
        except OverflowError as exc:
            raise OverflowAtIterateError(f"iterate {k}: {exc}") from exc
        if not math.isfinite(h):
            raise OverflowAtIterateError(f"iterate {k}: naive height {h}")
        scale /= d
        geom = geom / d + c / d
        defects.append(abs(h - d * prev_h))
        estimates.append(h * scale + geom)
        prev_h = h
        if k >= 3:
            d1 = abs(estimates[-1] - estimates[-2])
            d2 = abs(estimates[-2] - estimates[-3])
            d3 = abs(estimates[-3] - estimates[-4])
            if max(d1, d2, d3) < problem.tolerance:
                defect = max(defects[-3:])
                err = defect * scale / (d - 1)
                return TateLimitResult(estimates[-1], k, err, defect, tuple(estimates))
    raise NoConvergenceError(
        f"no convergence within {problem.max_iterations} iterations "
        f"(last diff {abs(estimates[-1] - estimates[-2]):.3e})"
    )


def tate_limit(problem: DynamicalHeightProblem, x) -> float:
    return tate_limit_detailed(problem, x).value


# ---------------------------------------------------------------------------
# Potential grids on multiplicative annuli


@dataclass
class PotentialGrid:
    """Samples of a metric potential on an annulus chart around the unit circle.

    The chart is (s, phi) with s = log|z| in [s_min, s_max] and phi = arg z
    periodic.  Radial nodes are Chebyshev points, angular nodes uniform;
    interpolation is piecewise bilinear (periodic in phi).  A degenerate
    annulus s_min = s_max = 0 is the unit circle.
    """

    s_nodes: np.ndarray  # increasing, shape (ns,)
    phi_nodes: np.ndarray  # increasing in [0, 2 pi), shape (nphi,)
    values: np.ndarray  # shape (ns, nphi)
    _escape_tol: float = field(default=1e-9, repr=False)

    def __post_init__(self):
        self.s_nodes = np.asarray(self.s_nodes, dtype=float)
        self.phi_nodes = np.asarray(self.phi_nodes, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (len(self.s_nodes), len(self.phi_nodes)):
            raise ValueError("values shape must be (ns, nphi)")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("potential values must be finite")

    @classmethod
    def on_annulus(
        cls,
        func: Callable[[complex], float],
        s_min: float,
        s_max: float,
        ns: int = 33,
        nphi: int = 64,
    ) -> "PotentialGrid":
        s = _cheb_nodes(s_min, s_max, ns)
        phi = np.arange(nphi) * (2 * np.pi / nphi)
        vals = np.empty((ns, nphi))
        for i, si in enumerate(s):
            for j, pj in enumerate(phi):
                vals[i, j] = func(complex(math.exp(si) * math.cos(pj), math.exp(si) * math.sin(pj)))
        return cls(s, phi, vals)

    @classmethod
    def on_circle(cls, func: Callable[[complex], float], nphi: int = 64) -> "PotentialGrid":
        return cls.on_annulus(func, 0.0, 0.0, ns=1, nphi=nphi)

    @property
    def resolution(self) -> tuple[int, int]:
        return (len(self.s_nodes), len(self.phi_nodes))

    def samples(self) -> np.ndarray:
        s, phi = np.meshgrid(self.s_nodes, self.phi_nodes, indexing="ij")
        return np.exp(s + 1j * phi)

    def in_chart(self, z: complex) -> bool:
        s = math.log(abs(z))
        span = max(self.s_nodes[-1] - self.s_nodes[0], 1.0)
        tol = self._escape_tol * span
        return self.s_nodes[0] - tol <= s <= self.s_nodes[-1] + tol

    def eval(self, z: complex) -> float:
        """Bilinear interpolation at z; the angle reduces mod 2 pi, the radius must stay in chart."""
        if z == 0:
            raise DomainEscapeError("z = 0 is outside every annulus chart")
        s = math.log(abs(z))
        if not self.in_chart(z):
            raise DomainEscapeError(
                f"log|z| = {s:.6g} outside radial range [{self.s_nodes[0]:.6g}, {self.s_nodes[-1]:.6g}]"
            )
        s = min(max(s, self.s_nodes[0]), self.s_nodes[-1])
        phi = math.atan2(z.imag, z.real) % (2 * math.pi)
        ns, nphi = self.resolution
        # radial cell
        if ns == 1:
            i0 = i1 = 0
            ws = 0.0
        else:
            i1 = int(np.searchsorted(self.s_nodes, s))
            i1 = min(max(i1, 1), ns - 1)
            i0 = i1 - 1
            ds = self.s_nodes[i1] - self.s_nodes[i0]
            ws = (s - self.s_nodes[i0]) / ds if ds > 0 else 0.0
        # angular cell, periodic
        step = 2 * math.pi / nphi
        j0 = int(phi // step) % nphi
        j1 = (j0 + 1) % nphi
        wp = (phi - j0 * step) / step
        v00 = self.values[i0, j0]
        v01 = self.values[i0, j1]
        v10 = self.values[i1, j0]
        v11 = self.values[i1, j1]
        return (1 - ws) * ((1 - wp) * v00 + wp * v01) + ws * ((1 - wp) * v10 + wp * v11)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def sup_distance(self, func: Callable[[complex], float]) -> float:
        """sup over samples of |value - func(sample)|."""
        zz = self.samples()
        worst = 0.0
        for idx in np.ndindex(zz.shape):
            worst = max(worst, abs(self.values[idx] - func(complex(zz[idx]))))
        return worst


def _cheb_nodes(a: float, b: float, n: int) -> np.ndarray:
    if n == 1:
        return np.array([(a + b) / 2.0])
    k = np.arange(n)
    x = np.cos(np.pi * k / (n - 1))[::-1]  # Chebyshev extrema in [-1, 1], increasing
    return (a + b) / 2 + (b - a) / 2 * x


def power_map(d: int) -> Callable[[complex], complex]:
    """The degree-d toric dynamics z -> z^d, tagged so grids can take exact preimages."""

    def f(z: complex) -> complex:
        return z**d

    f.toric_degree = d  # type: ignore[attr-defined]
    return f


def canonical_potential_iterate(
    g0: PotentialGrid,
    pullback: Callable[[complex], complex],
    d: int,
    steps: int,
    iso_log_constant: float = 0.0,
    shrink_domain: bool = False,
) -> PotentialGrid:
    """steps-fold application of g -> (g o pullback + iso_log_constant)/d.

    In the default mode the sample set is reused, so every pullback image must
    stay inside the chart (DomainEscapeError otherwise).  With shrink_domain
    the pullback must be the toric power map of degree d (see power_map); each
    step then re-lays samples on the exact d-th root preimages of the current
    samples, making the evaluation interpolation-free.  The iterate after k
    steps satisfies sup|g_k - g_inf| <= d^-k sup|g_0 - g_inf| over its chart.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    grid = g0
    if shrink_domain:
        deg = getattr(pullback, "toric_degree", None)
        if deg is None:
            _verify_power_map(pullback, d, grid)
        elif deg != d:
            raise ValueError(f"pullback has toric degree {deg}, expected {d}")
        for _ in range(steps):
            grid = _shrink_step(grid, d, iso_log_constant)
        return grid
    for _ in range(steps):
        vals = np.empty_like(grid.values)
        zz = grid.samples()
        for idx in np.ndindex(zz.shape):
            w = pullback(complex(zz[idx]))
            vals[idx] = (grid.eval(w) + iso_log_constant) / d
        grid = PotentialGrid(grid.s_nodes.copy(), grid.phi_nodes.copy(), vals)
    return grid


def _verify_power_map(pullback, d: int, grid: PotentialGrid) -> None:
    for z in (
        complex(math.exp(grid.s_nodes[0]), 0.0),
        complex(0.0, math.exp(grid.s_nodes[-1])),
    ):
        if abs(pullback(z) - z**d) > 1e-12 * max(1.0, abs(z) ** d):
            raise DomainEscapeError(
                "shrink_domain requires the degree-d power map as pullback"
            )


def _shrink_step(grid: PotentialGrid, d: int, c: float) -> PotentialGrid:
    ns, nphi = grid.resolution
    s_new = grid.s_nodes / d
    # preimages of phi_j under phi -> d phi: (phi_j + 2 pi l)/d, l = 0..d-1
    phi_new = np.sort(
        np.concatenate([(grid.phi_nodes + 2 * np.pi * l) / d for l in range(d)])
    )
    vals = np.empty((ns, nphi * d))
    step = 2 * np.pi / nphi
    for jn, phi in enumerate(phi_new):
        j_old = int(round((phi * d) % (2 * np.pi) / step)) % nphi
        vals[:, jn] = (grid.values[:, j_old] + c) / d
    return PotentialGrid(s_new, phi_new, vals)


def isometry_residual(
    g: PotentialGrid,
    pullback: Callable[[complex], complex],
    d: int,
    require_full_cover: bool = False,
) -> float:
    """sup over grid samples of |g(pullback(p)) - d g(p)|.

    Vanishes (up to interpolation error) exactly when g is the canonical
    potential.  Samples whose pullback image leaves the chart are skipped
    unless require_full_cover is set; if no sample stays in chart the residual
    is undefined and DomainEscapeError is raised.
    """
    zz = g.samples()
    worst = -1.0
    for idx in np.ndindex(zz.shape):
        z = complex(zz[idx])
        w = pullback(z)
        if not g.in_chart(w):
            if require_full_cover:
                raise DomainEscapeError(f"pullback image of {z:.6g} leaves the chart")
            continue
        worst = max(worst, abs(g.eval(w) - d * g.values[idx]))
    if worst < 0:
        raise DomainEscapeError("every pullback image leaves the chart")
    return worst
