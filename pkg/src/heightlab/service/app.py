"""FastAPI service wrapping the core package.

Models are cached per (curve, u, precision) so repeated experiment calls do
not recompute lattices.  All endpoints are deterministic given the request
(seeds are explicit in the payloads).
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import mpmath as mp
import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..algnum import AlgebraicNumber, IntPoly, toric_canonical_height, weil_height
from ..elliptic import CurveQ, EllipticModel, EPoint
from ..equidist import ladder_height_experiment, run_equidist
from ..errors import HeightLabError
from ..measures import (
    MonteCarloStrategy,
    QuadratureStrategy,
    g_canonical_integral,
    g_character,
    hat,
    ladder_measure_check,
    p1_canonical_mass,
    pushforward_projection_check,
    s1_character,
    s1_haar_integral,
    smooth_bump,
    TestFunction,
)
from ..semiabelian import GModel, ladder_level
from . import schemas


@lru_cache(maxsize=16)
def _elliptic_model(a: str, b: str, precision_bits: int) -> EllipticModel:
    return EllipticModel(CurveQ(Fraction(a), Fraction(b)), precision_bits)


@lru_cache(maxsize=16)
def _g_model(a: str, b: str, u_kind: str, u0: str, u1: str, precision_bits: int) -> GModel:
    em = _elliptic_model(a, b, precision_bits)
    if u_kind == "point":
        pt = EPoint.exact(Fraction(u0), Fraction(u1))
        return GModel.from_class_point(em, pt)
    L = em.lattice
    u = mp.mpf(u0) * L.omega1 + mp.mpf(u1) * L.omega2
    return GModel(em, u)


def _resolve_g_model(spec: schemas.ModelSpec) -> GModel:
    if isinstance(spec.u, schemas.RationalPair):
        return _g_model(spec.curve.a, spec.curve.b, "point", spec.u.x, spec.u.y,
                        spec.precision_bits)
    return _g_model(spec.curve.a, spec.curve.b, "coords", repr(spec.u.s), repr(spec.u.t),
                    spec.precision_bits)


def _poly(spec) -> IntPoly:
    if isinstance(spec, str):
        return IntPoly.from_text(spec)
    return IntPoly.from_json(spec)


def create_app() -> FastAPI:
    app = FastAPI(title="heightlab", version=__version__)

    @app.get("/", response_model=schemas.ServiceInfo)
    def info():
        return schemas.ServiceInfo(
            name="heightlab",
            version=__version__,
            endpoints=["/height", "/equidist", "/isogeny-check", "/measure-check"],
        )

    @app.post("/height", response_model=schemas.HeightResponse)
    def height(req: schemas.GmHeightRequest | schemas.EllipticHeightRequest | schemas.FiberHeightRequest):
        try:
            return _height(req)
        except HeightLabError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except (ValueError, ZeroDivisionError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    def _height(req):
        if req.kind == "gm":
            alpha = AlgebraicNumber(_poly(req.min_poly), req.embedding_index, req.precision_bits)
            return schemas.HeightResponse(
                kind="gm",
                heights={
                    "weil": weil_height(alpha),
                    "toric_canonical": toric_canonical_height(alpha),
                },
                normalization={
                    "weil": "absolute logarithmic height via Mahler measure of the minimal polynomial",
                    "toric_canonical": "divisor [0] + [inf]; equals twice the Weil height",
                },
            )
        if req.kind == "elliptic":
            em = _elliptic_model(req.curve.a, req.curve.b, req.precision_bits)
            pt = EPoint.identity() if req.identity else EPoint.exact(
                Fraction(req.point.x), Fraction(req.point.y))
            res = em.neron_tate(pt, req.tolerance)
            return schemas.HeightResponse(
                kind="elliptic",
                heights={"neron_tate": res.value},
                error_bound=res.error_bound,
                depth=res.depth,
                normalization={
                    "neron_tate": "lim 4^-k (1/2) h(x([2^k]P)); symmetric degree-2 polarization",
                    "neron_constant": em.normalization_constant,
                    "quasi_parallelogram_constant": em.quasi_parallelogram_constant,
                },
            )
        if req.kind == "fiber":
            alpha = AlgebraicNumber(_poly(req.min_poly), req.embedding_index, req.precision_bits)
            total = toric_canonical_height(alpha)
            return schemas.HeightResponse(
                kind="fiber",
                heights={
                    "fiber_canonical": total / req.ladder_n,
                    "toric_canonical": total,
                },
                normalization={
                    "fiber_canonical": "n^-1 hhat_M + hhat_{pi*N} over the identity "
                    f"(ladder level n = {req.ladder_n}; base term vanishes)",
                },
            )
        raise HTTPException(status_code=422, detail=f"unknown height kind {req.kind!r}")

    @app.post("/equidist", response_model=schemas.EquidistResponse)
    def equidist(req: schemas.EquidistRequest):
        config = {
            "experiment": req.experiment,
            "orbits": req.orbits,
            "functions": req.functions,
            "thresholds": req.thresholds,
        }
        model = None
        if req.model is not None:
            config["model"] = req.model
        try:
            report = run_equidist(config, model=model)
        except HeightLabError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        import json

        return schemas.EquidistResponse(
            report=json.loads(report.to_json()),
            csv=report.to_csv() if req.include_csv else None,
            passed=report.passed,
        )

    @app.post("/isogeny-check", response_model=schemas.IsogenyCheckResponse)
    def isogeny_check(req: schemas.IsogenyCheckRequest):
        try:
            g = _resolve_g_model(req.model)
        except HeightLabError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        rng = np.random.default_rng(req.seed)
        rows = []
        for n in req.n_list:
            for branch in req.branches:
                level = ladder_level(g, n, tuple(branch))
                worst = 0.0
                round_trip = 0.0
                for _ in range(req.samples):
                    p = level.level_model.point(
                        rng.random(), rng.random(),
                        complex(rng.normal(), rng.normal()) or 1.0,
                    )
                    worst = max(worst, abs(
                        g.weil_lambda(level.phi(p)) - n * level.level_model.weil_lambda(p)
                    ))
                    q = g.point(rng.random(), rng.random(), complex(rng.normal(1.0), rng.normal()))
                    back = level.phi(level.divide(q))
                    round_trip = max(round_trip, float(abs(back.s - q.s) + abs(back.t - q.t)
                                                       + abs(complex(back.w - q.w))))
                kernel = level.kernel()
                images = [level.phi(k) for k in kernel]
                to_id = all(
                    float(i.s) == 0 and float(i.t) == 0 and abs(complex(i.w) - 1) < 1e-10
                    for i in images
                )
                rows.append(schemas.IsogenyLevelRow(
                    n=n, branch=tuple(branch),
                    lambda_scaling_residual=worst,
                    kernel_size=len(kernel),
                    kernel_maps_to_identity=to_id,
                    cocycle_residual=level.cocycle_residual(),
                    divide_roundtrip_residual=round_trip,
                ))
        ladder_heights = None
        note = None
        if req.division_witness is not None:
            try:
                witness = EPoint.exact(Fraction(req.division_witness.x),
                                       Fraction(req.division_witness.y))
                table = ladder_height_experiment(g.elliptic, req.witness_n_list, witness)
            except HeightLabError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            ladder_heights = [schemas.LadderHeightTableRow(**r.__dict__) for r in table["rows"]]
            note = table["note"]
        return schemas.IsogenyCheckResponse(rows=rows, ladder_heights=ladder_heights,
                                            ladder_note=note)

    @app.post("/measure-check", response_model=schemas.MeasureCheckResponse)
    def measure_check(req: schemas.MeasureCheckRequest):
        mass = p1_canonical_mass(req.quadrature_order)
        re_sq = TestFunction("re_squared", "s1", lambda z: np.real(z) ** 2)
        re_sq_val = float(np.real(s1_haar_integral(re_sq, req.quadrature_order)))
        char_worst = 0.0
        model = _resolve_g_model(req.model) if req.model else None
        box = req.character_box
        if model is not None:
            for m1 in range(-box, box + 1):
                for m2 in range(-box, box + 1):
                    for m3 in range(-box, box + 1):
                        if (m1, m2, m3) == (0, 0, 0):
                            continue
                        r = g_canonical_integral(
                            g_character(m1, m2, m3), model,
                            QuadratureStrategy(max(req.quadrature_order, 4 * box)))
                        char_worst = max(char_worst, abs(r.value))
        else:
            for m in range(1, box + 1):
                char_worst = max(char_worst, abs(s1_haar_integral(s1_character(m),
                                                                  req.quadrature_order)))
        proj_worst = 0.0
        for n in range(1, req.projection_n_max + 1):
            for f in (s1_character(2), re_sq):
                proj_worst = max(proj_worst, pushforward_projection_check(n, f, 840))
        ladder_rows = []
        if model is not None:
            levels = [ladder_level(model, n) for n in req.ladder_levels]
            fns = [smooth_bump(0.5, 0.2, "tau"), g_character(1, 1, 1)]
            for f in fns:
                for row in ladder_measure_check(levels, f, MonteCarloStrategy(req.mc_count, req.seed)):
                    ladder_rows.append({
                        "function": f.name, "n": row.n,
                        "residual": row.residual, "sampling_error": row.sampling_error,
                    })
        return schemas.MeasureCheckResponse(
            s1_mass=mass,
            s1_mass_residual=abs(mass - 2.0),
            character_max_abs=char_worst,
            projection_max_residual=proj_worst,
            re_squared_value=re_sq_val,
            ladder_rows=ladder_rows,
            notes={
                "mass": "canonical curvature measure on the projective line has raw mass 2",
                "normalization": "comparison integrals divide by the degree (mass 1)",
            },
        )

    return app


app = create_app()
