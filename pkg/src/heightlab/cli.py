"""Command-line frontend: a thin client over the HTTP service.

By default requests run against an in-process instance of the service (no
network, no separate process); --server points the same client at a remote
deployment.  Exit codes: 0 pass, 1 error, 2 threshold failure.  All floating
output is printed with 17 significant digits so reports are diffable.
"""
from __future__ import annotations

import asyncio
import json
import sys
from pathlib import Path

import click
import httpx

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


def _f(x: float) -> str:
    return f"{float(x):.17g}"


def _call(server: str | None, path: str, payload: dict) -> dict:
    async def go():
        if server:
            transport = None
            base = server.rstrip("/")
        else:
            from .service.app import create_app

            transport = httpx.ASGITransport(app=create_app())
            base = "http://heightlab.internal"
        async with httpx.AsyncClient(transport=transport, base_url=base, timeout=None) as client:
            resp = await client.post(path, json=payload)
            if resp.status_code >= 400:
                detail = resp.json().get("detail", resp.text) if resp.headers.get(
                    "content-type", "").startswith("application/json") else resp.text
                raise click.ClickException(f"{path} failed ({resp.status_code}): {detail}")
            return resp.json()

    return asyncio.run(go())


@click.group()
@click.option("--server", default=None, help="Base URL of a running service; default runs in-process.")
@click.option("--precision-bits", default=128, show_default=True, help="Working precision for exact layers.")
@click.option("--seed", default=0, show_default=True, help="Seed for all sampled computations.")
@click.option("--threads", default=1, show_default=True, help="Worker threads for orbit sums.")
@click.pass_context
def main(ctx, server, precision_bits, seed, threads):
    """Heights and equidistribution laboratory for torus extensions of elliptic curves."""
    ctx.ensure_object(dict)
    ctx.obj.update(server=server, precision_bits=precision_bits, seed=seed, threads=threads)


@main.command()
@click.argument("kind", type=click.Choice(["gm", "elliptic", "fiber"]))
@click.option("--min-poly", help="Minimal polynomial, e.g. 'x^2 - x - 1' (gm/fiber kinds).")
@click.option("--embedding-index", default=0, show_default=True)
@click.option("--curve-a", help="Curve coefficient a (rational string).")
@click.option("--curve-b", help="Curve coefficient b (rational string).")
@click.option("--point", help="Rational point 'x,y' on the curve.")
@click.option("--identity", is_flag=True, help="Use the identity point.")
@click.option("--ladder-n", default=1, show_default=True, help="Ladder level for fiber heights.")
@click.option("--tolerance", default=1e-7, show_default=True)
@click.pass_context
def height(ctx, kind, min_poly, embedding_index, curve_a, curve_b, point, identity, ladder_n, tolerance):
    """Weil / Neron-Tate / fiber canonical heights with normalization metadata."""
    pb = ctx.obj["precision_bits"]
    if kind == "gm":
        if not min_poly:
            raise click.UsageError("gm heights need --min-poly")
        payload = {"kind": "gm", "min_poly": min_poly, "embedding_index": embedding_index,
                   "precision_bits": pb}
    elif kind == "fiber":
        if not min_poly:
            raise click.UsageError("fiber heights need --min-poly")
        payload = {"kind": "fiber", "min_poly": min_poly, "embedding_index": embedding_index,
                   "ladder_n": ladder_n, "precision_bits": pb}
    else:
        if curve_a is None or curve_b is None:
            raise click.UsageError("elliptic heights need --curve-a and --curve-b")
        payload = {"kind": "elliptic", "curve": {"a": curve_a, "b": curve_b},
                   "identity": identity, "precision_bits": pb, "tolerance": tolerance}
        if not identity:
            if not point:
                raise click.UsageError("supply --point x,y or --identity")
            x, y = point.split(",")
            payload["point"] = {"x": x.strip(), "y": y.strip()}
    out = _call(ctx.obj["server"], "/height", payload)
    for name, value in out["heights"].items():
        click.echo(f"{name} = {_f(value)}")
    if out.get("error_bound") is not None:
        click.echo(f"error_bound = {_f(out['error_bound'])} (depth {out['depth']})")
    for key, value in out["normalization"].items():
        click.echo(f"# {key}: {value if isinstance(value, str) else _f(value)}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, path_type=Path),
              help="TOML experiment config.")
@click.option("--out", default="equidist_report", show_default=True, help="Output path base.")
@click.option("--format", "fmt", default="both", type=click.Choice(["csv", "json", "both"]),
              show_default=True)
@click.option("--threshold", default=None, type=float, help="Override thresholds.max_gap.")
@click.pass_context
def equidist(ctx, config_path, out, fmt, threshold):
    """Run an equidistribution experiment and write CSV/JSON reports."""
    with open(config_path, "rb") as fh:
        config = tomllib.load(fh)
    config.setdefault("experiment", {})
    config["experiment"].setdefault("seed", ctx.obj["seed"])
    config["experiment"].setdefault("threads", ctx.obj["threads"])
    config["experiment"].setdefault("precision_bits", ctx.obj["precision_bits"])
    if threshold is not None:
        config.setdefault("thresholds", {})["max_gap"] = threshold
    payload = {
        "experiment": config.get("experiment", {}),
        "model": config.get("model"),
        "orbits": config["orbits"],
        "functions": config.get("functions", {"character_box": 3}),
        "thresholds": config.get("thresholds", {}),
        "include_csv": fmt in ("csv", "both"),
    }
    res = _call(ctx.obj["server"], "/equidist", payload)
    report = res["report"]
    base = Path(out)
    written = []
    if fmt in ("json", "both"):
        path = base.with_suffix(".json")
        path.write_text(json.dumps(report, indent=2, sort_keys=True))
        written.append(str(path))
    if fmt in ("csv", "both"):
        path = base.with_suffix(".csv")
        path.write_text(res["csv"])
        written.append(str(path))
    summary = report["summary"]
    click.echo(f"config_sha256 = {report['config_sha256']}")
    for level, gap in sorted(summary["per_level_max_gap"].items(), key=lambda kv: int(kv[0])):
        click.echo(f"max_gap[{level}] = {gap}")
    click.echo(f"passed = {summary['passed']}  (files: {', '.join(written)})")
    if not res["passed"]:
        sys.exit(2)


@main.command("isogeny-check")
@click.option("--curve-a", required=True)
@click.option("--curve-b", required=True)
@click.option("--u-point", help="Extension class as a rational point 'x,y' of E.")
@click.option("--u-coords", help="Extension class as lattice coordinates 's,t'.")
@click.option("--n-list", default="1,2,4,8,16", show_default=True)
@click.option("--branches", default="0:0", show_default=True,
              help="Semicolon-separated lattice branch shifts 'b1:b2'.")
@click.option("--samples", default=32, show_default=True)
@click.option("--witness", help="Rational Q' as 'x,y' for the n^-2 height table.")
@click.option("--witness-n", default="2,3", show_default=True)
@click.option("--threshold", default=1e-10, show_default=True, help="Residual bound.")
@click.pass_context
def isogeny_check(ctx, curve_a, curve_b, u_point, u_coords, n_list, branches, samples,
                  witness, witness_n, threshold):
    """Ladder diagnostics: lambda scaling, kernel counts, n^-2 height table."""
    model = _model_payload(curve_a, curve_b, u_point, u_coords, ctx.obj["precision_bits"])
    payload = {
        "model": model,
        "n_list": [int(x) for x in n_list.split(",")],
        "branches": [tuple(int(v) for v in b.split(":")) for b in branches.split(";")],
        "samples": samples,
        "seed": ctx.obj["seed"],
        "witness_n_list": [int(x) for x in witness_n.split(",")],
    }
    if witness:
        x, y = witness.split(",")
        payload["division_witness"] = {"x": x.strip(), "y": y.strip()}
    res = _call(ctx.obj["server"], "/isogeny-check", payload)
    failed = False
    for row in res["rows"]:
        ok = (row["lambda_scaling_residual"] < threshold and row["kernel_size"] == row["n"]
              and row["kernel_maps_to_identity"])
        failed = failed or not ok
        click.echo(
            f"n={row['n']} branch={tuple(row['branch'])} "
            f"lambda_residual={_f(row['lambda_scaling_residual'])} "
            f"kernel={row['kernel_size']} cocycle={_f(row['cocycle_residual'])} "
            f"{'ok' if ok else 'FAIL'}"
        )
    if res.get("ladder_heights"):
        click.echo("# n^-2 extension-class height table (point level):")
        for row in res["ladder_heights"]:
            click.echo(
                f"n={row['n']} h(Q')={_f(row['h_divided'])} n^2·h(Q')={_f(row['n2_times_divided'])} "
                f"h(nQ')={_f(row['h_class'])} residual={_f(row['residual'])}"
            )
            failed = failed or row["residual"] > 1e-6
        click.echo(f"# {res['ladder_note']}")
    if failed:
        sys.exit(2)


@main.command("measure-check")
@click.option("--curve-a", default=None)
@click.option("--curve-b", default=None)
@click.option("--u-point", default=None)
@click.option("--u-coords", default=None)
@click.option("--order", default=64, show_default=True, help="Quadrature order per circle factor.")
@click.option("--character-box", default=3, show_default=True)
@click.option("--projection-n-max", default=8, show_default=True)
@click.option("--threshold", default=1e-12, show_default=True)
@click.pass_context
def measure_check(ctx, curve_a, curve_b, u_point, u_coords, order, character_box,
                  projection_n_max, threshold):
    """Mass, character-orthogonality, and projection-formula residuals."""
    payload = {
        "quadrature_order": order,
        "character_box": character_box,
        "projection_n_max": projection_n_max,
        "seed": ctx.obj["seed"],
    }
    if curve_a is not None:
        payload["model"] = _model_payload(curve_a, curve_b, u_point, u_coords,
                                          ctx.obj["precision_bits"])
    res = _call(ctx.obj["server"], "/measure-check", payload)
    click.echo(f"s1_mass = {_f(res['s1_mass'])} (residual {_f(res['s1_mass_residual'])})")
    click.echo(f"character_max_abs = {_f(res['character_max_abs'])}")
    click.echo(f"projection_max_residual = {_f(res['projection_max_residual'])}")
    click.echo(f"re_squared = {_f(res['re_squared_value'])}")
    for row in res["ladder_rows"]:
        click.echo(f"ladder f={row['function']} n={row['n']} residual={_f(row['residual'])} "
                   f"err={_f(row['sampling_error'])}")
    bad = (res["s1_mass_residual"] > threshold or res["character_max_abs"] > threshold
           or res["projection_max_residual"] > threshold
           or any(r["residual"] > 3 * r["sampling_error"] + threshold for r in res["ladder_rows"]))
    if bad:
        sys.exit(2)


def _model_payload(curve_a, curve_b, u_point, u_coords, precision_bits):
    if curve_a is None or curve_b is None:
        raise click.UsageError("need --curve-a and --curve-b")
    model = {"curve": {"a": curve_a, "b": curve_b}, "precision_bits": precision_bits}
    if u_point:
        x, y = u_point.split(",")
        model["u"] = {"x": x.strip(), "y": y.strip()}
    elif u_coords:
        s, t = u_coords.split(",")
        model["u"] = {"s": float(s), "t": float(t)}
    else:
        raise click.UsageError("need --u-point x,y or --u-coords s,t")
    return model


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service with uvicorn."""
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
