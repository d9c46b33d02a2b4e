"""Command-line interface: seeded, reproducible runs emitting JSON or CSV.

Subcommands: mp, max-energy, pi-p, gub, sphere-moment, asymptotics, radius,
embed.  Every run record embeds the fully resolved configuration and the
package version; rerunning with the same seed reproduces the JSON output
byte for byte apart from the timestamp field.  The default seed comes from
ENERGYMAX_SEED when set.

Exit codes: 0 success, 2 invalid arguments or inputs, 3 solver failure,
4 requested embedding radius below the minimum.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from ._backend import backend_name
from .bodies import (
    BodySpec,
    RngStream,
    mean_width_power,
    pi_p_ellipsoid,
    sphere_lr_moment,
)
from .discrete_energy import SolverError, estimate_mp, max_energy_in_body
from .embedding import (
    RadiusTooSmallError,
    embed_snowflake,
    fit_power_law,
    radius_closed_form_ball,
    radius_growth_report,
    schoenberg_radius_points,
)
from .formats import dump_csv, dump_json, read_points_csv
from .specfun import b_coeff
from .stable import gub_upper_bound
from . import formats

DEFAULT_SEED = 20240801
DEFAULT_GRIDS = (41, 101, 401)
DEFAULT_SAMPLES = 1_000_000
DEFAULT_RESOLUTIONS = (250, 500, 1000, 2000)


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _env_seed() -> int:
    raw = os.environ.get("ENERGYMAX_SEED", "")
    return int(raw) if raw else DEFAULT_SEED


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--seed", type=int, default=None, help="random seed (default: ENERGYMAX_SEED or built-in)")
    sp.add_argument("--output", default="-", help="output path, '-' for stdout")
    sp.add_argument("--format", choices=["json", "csv"], default="json", help="output format (csv drops nested traces)")


def _parse_body(text: str) -> BodySpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"--body must be a JSON object: {exc}") from exc
    return BodySpec.from_json(data)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="energymax",
        description="Maximal energy integrals, stable-measure bounds and spherical embeddings",
    )
    parser.add_argument("--version", action="version", version=f"energymax {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("mp", help="estimate the one-dimensional maximal energy m_p")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--grids", type=_int_list, default=list(DEFAULT_GRIDS))
    sp.add_argument("--uniform-grid", action="store_true", help="equally spaced instead of endpoint-clustered grids")
    _add_common(sp)

    sp = sub.add_parser("max-energy", help="discrete lower bound of M_p(body, d_r)")
    sp.add_argument("--body", type=_parse_body, required=True, help='body JSON, e.g. {"kind":"lq_ball","n":3,"q":2}')
    sp.add_argument("--r", type=float, default=2.0)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--resolutions", type=_int_list, default=list(DEFAULT_RESOLUTIONS))
    _add_common(sp)

    sp = sub.add_parser("pi-p", help="p-summing norm of an operator, to the p-th power")
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--semi-axes", type=_float_list)
    group.add_argument("--matrix", type=str, help="JSON array of rows")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    _add_common(sp)

    sp = sub.add_parser("gub", help="stable-measure upper bound for M_p(body, d_r)")
    sp.add_argument("--body", type=_parse_body, required=True)
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--mp", type=float, default=None, help="one-dimensional maximal energy (default: 1 at p=1, else estimated)")
    sp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    _add_common(sp)

    sp = sub.add_parser("sphere-moment", help="sphere average of ||t||_r^p")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    _add_common(sp)

    sp = sub.add_parser("asymptotics", help="growth of M_p bounds across dimensions")
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--q", type=float, help="sweep M_p(B_q^n, d_2)")
    group.add_argument("--r", type=float, help="sweep M_p(B_2^n, d_r)")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--n-list", type=_int_list, default=[4, 8, 16, 32, 64, 128])
    sp.add_argument("--points", type=int, default=1000)
    sp.add_argument("--samples", type=int, default=200_000)
    _add_common(sp)

    sp = sub.add_parser("radius", help="embedding radius bounds for snowflaked l_q balls")
    sp.add_argument("--q", type=float, required=True)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--n-list", type=_int_list, default=[4, 8, 16, 32, 64, 128])
    sp.add_argument("--points", type=int, default=1000)
    sp.add_argument("--samples", type=int, default=200_000)
    _add_common(sp)

    sp = sub.add_parser("embed", help="embed a snowflaked point set on a sphere")
    sp.add_argument("--points-file", required=True, help="CSV with header x1,...,xn")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--radius", type=float, default=None, help="sphere radius (default: computed minimum)")
    _add_common(sp)

    return parser


def _resolve_mp(p: float, mp: float | None) -> float:
    if mp is not None:
        return mp
    if p == 1.0:
        return 1.0
    return estimate_mp(p, DEFAULT_GRIDS).value


def _run_mp(args, rng: RngStream):
    report = estimate_mp(args.p, args.grids, uniform=args.uniform_grid)
    config = {"p": args.p, "grid_sizes": args.grids, "uniform_grid": args.uniform_grid}
    result = report.to_json()
    rows = [{"grid_size": n, "value": v} for n, v in report.trace]
    return config, result, rows


def _reference_for(body: BodySpec, r: float, p: float, rng: RngStream):
    if r != 2.0:
        return None
    if body.kind == "interval":
        return {"value": _resolve_mp(p, None), "method": "linear-system"}
    if body.kind == "lq_ball" and body.q == 2.0:
        return {
            "value": _resolve_mp(p, None) * b_coeff(body.n, p),
            "method": "closed-form",
        }
    if body.kind == "ellipsoid":
        est, err = pi_p_ellipsoid(body.operator(), p, 200_000, rng.child(7))
        return {
            "value": _resolve_mp(p, None) * est,
            "stderr": _resolve_mp(p, None) * err,
            "method": "monte-carlo",
        }
    return None


def _run_max_energy(args, rng: RngStream):
    report = max_energy_in_body(args.body, args.r, args.p, args.resolutions, rng)
    config = {
        "body": args.body.to_json(),
        "r": args.r,
        "p": args.p,
        "resolutions": sorted(args.resolutions),
    }
    result = {"report": report.to_json()}
    reference = _reference_for(args.body, args.r, args.p, rng)
    if reference is not None:
        result["reference"] = reference
    rows = [{"resolution": n, "lower_bound": v} for n, v in report.trace]
    return config, result, rows


def _run_pi_p(args, rng: RngStream):
    if args.semi_axes is not None:
        T = np.asarray(args.semi_axes, dtype=float)
        config_t = {"semi_axes": list(map(float, T))}
    else:
        T = np.asarray(json.loads(args.matrix), dtype=float)
        config_t = {"matrix": T.tolist()}
    est, err = pi_p_ellipsoid(T, args.p, args.samples, rng)
    config = {"p": args.p, "samples": args.samples, **config_t}
    result = {"pi_p_pow": est, "stderr": err, "method": "monte-carlo"}
    return config, result, [{"pi_p_pow": est, "stderr": err}]


def _run_gub(args, rng: RngStream):
    mp = _resolve_mp(args.p, args.mp)
    est, err = gub_upper_bound(args.body, args.r, args.p, mp, args.samples, rng)
    config = {
        "body": args.body.to_json(),
        "r": args.r,
        "p": args.p,
        "mp": mp,
        "samples": args.samples,
    }
    result = {"value": est, "stderr": err, "mp_used": mp, "method": "monte-carlo"}
    return config, result, [{"upper_bound": est, "stderr": err}]


def _run_sphere_moment(args, rng: RngStream):
    est, err = sphere_lr_moment(args.n, args.r, args.p, args.samples, rng)
    phi = est * args.n ** ((0.5 - 1.0 / args.r) * args.p)
    config = {"n": args.n, "r": args.r, "p": args.p, "samples": args.samples}
    result = {"value": est, "stderr": err, "normalized": phi, "method": "monte-carlo"}
    return config, result, [{"value": est, "stderr": err, "normalized": phi}]


def _run_asymptotics(args, rng: RngStream):
    p = args.p
    mp = _resolve_mp(p, None)
    rows = []
    if args.q is not None:
        mode, expected = "q", p * (1.0 - 1.0 / args.q)
        for i, n in enumerate(args.n_list):
            body = BodySpec.lq_ball(n, args.q)
            low = max_energy_in_body(body, 2.0, p, [args.points], rng.child(2 * i))
            wint, werr = mean_width_power(body, p, args.samples, rng.child(2 * i + 1))
            upper = mp * b_coeff(n, p) * wint
            rows.append(
                {
                    "n": n,
                    "lower": low.value,
                    "upper": upper,
                    "upper_stderr": mp * b_coeff(n, p) * werr,
                }
            )
    else:
        mode, expected = "r", p / args.r
        for i, n in enumerate(args.n_list):
            body = BodySpec.lq_ball(n, 2.0)
            low = max_energy_in_body(body, args.r, p, [args.points], rng.child(2 * i))
            upper, uerr = gub_upper_bound(body, args.r, p, mp, args.samples, rng.child(2 * i + 1))
            rows.append({"n": n, "lower": low.value, "upper": upper, "upper_stderr": uerr})
    ns = [row["n"] for row in rows]
    s_low, _, e_low = fit_power_law(ns, [row["lower"] for row in rows])
    s_up, _, e_up = fit_power_law(ns, [row["upper"] for row in rows])
    config = {
        "mode": mode,
        "q": args.q,
        "r": args.r,
        "p": p,
        "n_list": args.n_list,
        "points": args.points,
        "samples": args.samples,
        "mp": mp,
    }
    result = {
        "rows": rows,
        "slopes": {
            "lower": {"slope": s_low, "stderr": e_low},
            "upper": {"slope": s_up, "stderr": e_up},
        },
        "expected_exponent": expected,
    }
    return config, result, rows


def _run_radius(args, rng: RngStream):
    report = radius_growth_report(
        args.q, args.alpha, args.n_list, args.points, args.samples, DEFAULT_GRIDS, rng
    )
    result = report.to_json()
    if args.q == 2.0:
        for row in result["rows"]:
            row["radius_closed_form"] = radius_closed_form_ball(
                row["n"], args.alpha, report.mp_estimate
            )
    result["expected_exponent"] = args.alpha * (1.0 - 1.0 / args.q)
    config = {
        "q": args.q,
        "alpha": args.alpha,
        "n_list": args.n_list,
        "points": args.points,
        "samples": args.samples,
    }
    return config, result, result["rows"]


def _run_embed(args, rng: RngStream):
    points, _ = read_points_csv(args.points_file)
    result = {}
    if args.radius is None:
        radius, measure = schoenberg_radius_points(points, args.alpha)
        result["schoenberg_radius"] = radius
        result["measure"] = measure.to_json()
    else:
        radius = args.radius
    emb = embed_snowflake(points, args.alpha, radius)
    result["embedding"] = emb.to_json()
    result["radius_used"] = radius
    config = {
        "points_file": args.points_file,
        "alpha": args.alpha,
        "radius": args.radius,
        "num_points": len(points),
    }
    rows = [{"radius": radius, "gram_min_eigenvalue": emb.gram_min_eigenvalue,
             "max_distance_residual": emb.max_distance_residual,
             "max_norm_residual": emb.max_norm_residual}]
    return config, result, rows


_RUNNERS = {
    "mp": _run_mp,
    "max-energy": _run_max_energy,
    "pi-p": _run_pi_p,
    "gub": _run_gub,
    "sphere-moment": _run_sphere_moment,
    "asymptotics": _run_asymptotics,
    "radius": _run_radius,
    "embed": _run_embed,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    seed = args.seed if args.seed is not None else _env_seed()
    rng = RngStream(seed)
    try:
        config, result, rows = _RUNNERS[args.command](args, rng)
    except RadiusTooSmallError as exc:
        print(
            f"energymax {args.command}: {exc} (min Gram eigenvalue "
            f"{exc.min_eigenvalue:.6e})",
            file=sys.stderr,
        )
        return 4
    except SolverError as exc:
        print(f"energymax {args.command}: solver failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"energymax {args.command}: {exc}", file=sys.stderr)
        return 2

    config["seed"] = seed
    record = {
        "command": args.command,
        "version": __version__,
        "backend": backend_name(),
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "config": config,
        "result": result,
    }
    if args.format == "json":
        dump_json(record, args.output)
    else:
        dump_csv(formats.to_jsonable(rows), args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
