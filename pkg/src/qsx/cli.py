"""Command-line surface.

Subcommands: dist, ball, geodesic, length, finsler, monotone, counterexample,
verify, figure-data.  Point and generator arguments accept inline JSON, a path
to a JSON file, or ``-`` for stdin.  Exit codes: 0 success, 2 invalid input,
1 internal numerical failure.  Flags beat QSX_-prefixed environment variables,
which beat defaults; all floats are emitted through ``repr``/JSON, which
round-trips exactly.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .core import ProbVector, make_prob_vector, parse_generator, random_point
from .curves import length_details, polyline
from .errors import InvalidParameter, QsxError, UnsupportedDimension
from .finsler import bm_derivative, finsler_F
from .geodesic import make_geodesic
from .quasimetric import (
    ball_boundary_polyline,
    ball_geometry,
    quasi_dist,
    quasi_dist_argmax,
    symmetrize_max,
)
from .stochastic import (
    check_dist_monotone,
    check_finsler_monotone,
    random_bistochastic,
    stochastic_counterexample,
)
from .core import generator as make_generator
from .core import random_tangent
from .verify import probe_monotonicity, run_battery

FIG_DEFAULT_CENTER = (2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0)
FIG_DEFAULT_TARGET = (0.6, 0.1, 0.3)


def _env(name: str, cast, default):
    raw = os.environ.get(f"QSX_{name}")
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError as exc:
        raise InvalidParameter(f"environment QSX_{name}={raw!r} is not valid") from exc


def _read_text(spec: str) -> str:
    if spec == "-":
        return sys.stdin.read()
    stripped = spec.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        return spec
    with open(spec, "r", encoding="utf-8") as fh:
        return fh.read()


def _read_doc(spec: str):
    try:
        return json.loads(_read_text(spec))
    except json.JSONDecodeError as exc:
        raise InvalidParameter(f"malformed JSON in {spec!r}: {exc}") from exc


def _point(spec: str) -> ProbVector:
    doc = _read_doc(spec)
    if isinstance(doc, dict):
        if "coords" not in doc:
            raise InvalidParameter("point JSON needs a 'coords' key")
        doc = doc["coords"]
    return make_prob_vector(doc)


def _gen(spec: str):
    doc = _read_doc(spec)
    if not isinstance(doc, dict):
        raise InvalidParameter("generator JSON must be an object")
    return parse_generator(doc)


def _emit(doc, path: str | None) -> None:
    text = json.dumps(doc) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_csv(path: str | None, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(x)) if isinstance(x, (int, float, np.floating))
                              else str(x) for x in row))
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_dist(ns) -> int:
    gen = _gen(ns.generator)
    p = _point(ns.p)
    q = _point(ns.q)
    forward, idx = quasi_dist_argmax(gen, p, q)
    _emit({
        "forward": forward,
        "backward": quasi_dist(gen, q, p),
        "sym_max": symmetrize_max(gen, p, q),
        "argmax_index": idx,
    }, ns.output)
    return 0


def cmd_ball(ns) -> int:
    gen = _gen(ns.generator)
    center = _point(ns.center)
    if not (ns.radius > 0.0):
        raise InvalidParameter(f"radius must be positive, got {ns.radius!r}")
    geo = ball_geometry(gen, center, ns.radius, ns.direction)
    _emit({
        "vertex": geo.shifted_vertex.tolist(),
        "corners": geo.corners.tolist(),
    }, ns.output)
    if ns.boundary_csv:
        poly = ball_boundary_polyline(gen, center, ns.radius, ns.direction)
        _write_csv(ns.boundary_csv, [f"x{i}" for i in range(poly.shape[1])], poly)
    return 0


def cmd_geodesic(ns) -> int:
    gen = _gen(ns.generator)
    p = _point(ns.p)
    q = _point(ns.q)
    if ns.samples < 2:
        raise InvalidParameter(f"at least 2 samples are required, got {ns.samples!r}")
    geod = make_geodesic(gen, p, q, tol=ns.tol)
    ts = np.linspace(0.0, geod.length, ns.samples)
    samples = [
        {"t": float(t), "mu": geod.mu(float(t)), "point": geod.point(float(t)).coords.tolist()}
        for t in ts
    ]
    _emit({"r": geod.length, "samples": samples}, ns.output)
    if ns.csv:
        header = ["t", "mu"] + [f"p_{i}" for i in range(len(p))]
        rows = [[s["t"], s["mu"], *s["point"]] for s in samples]
        _write_csv(ns.csv, header, rows)
    return 0


def _curve_from_doc(doc, gen):
    if not isinstance(doc, dict) or "type" not in doc:
        raise InvalidParameter("curve JSON needs a 'type' key")
    kind = doc["type"]
    if kind == "polyline":
        return polyline(doc["times"], doc["points"])
    if kind == "geodesic":
        p = make_prob_vector(doc["P"])
        q = make_prob_vector(doc["Q"])
        return make_geodesic(gen, p, q).as_curve()
    raise InvalidParameter(f"unknown curve type {kind!r}")


def cmd_length(ns) -> int:
    gen = _gen(ns.generator)
    if not (ns.tol > 0.0):
        raise InvalidParameter(f"tolerance must be positive, got {ns.tol!r}")
    curve = _curve_from_doc(_read_doc(ns.curve), gen)
    fwd = length_details(gen, curve, ns.tol, "forward")
    bwd = length_details(gen, curve, ns.tol, "backward")
    _emit({
        "forward": fwd.value,
        "backward": bwd.value,
        "knots_used": max(fwd.knots, bwd.knots),
    }, ns.output)
    return 0


def cmd_finsler(ns) -> int:
    doc = _read_doc(ns.input)
    if not isinstance(doc, dict):
        raise InvalidParameter("finsler input must be a JSON object")
    for key in ("generator", "base", "v"):
        if key not in doc:
            raise InvalidParameter(f"finsler input needs a {key!r} key")
    gen = parse_generator(doc["generator"])
    base = make_prob_vector(doc["base"])
    from .core import tangent

    v = tangent(base, doc["v"])
    evaluation = finsler_F(gen, v)
    if ns.bm_check:
        ladder = 10.0 ** -np.arange(2, 7)
        scale = 0.4 * float(base.coords.min()) / (
            float(ladder[0]) * max(float(np.max(np.abs(v.components))), 1e-30))
        probe = v.scaled(min(1.0, scale))
        quotients = bm_derivative(gen, base, probe, ladder)
        target = finsler_F(gen, probe).value
        rows = [[float(t), float(qt), abs(float(qt) - target)]
                for t, qt in zip(ladder, quotients)]
        _write_csv(ns.output, ["t", "quotient", "deviation"], rows)
        return 0
    _emit({"F": evaluation.value, "argmax": evaluation.argmax}, ns.output)
    return 0


def cmd_monotone(ns) -> int:
    gen = make_generator(ns.generator, **_gen_params(ns))
    if ns.trials < 1:
        raise InvalidParameter(f"trials must be >= 1, got {ns.trials!r}")
    if ns.dim < 1:
        raise InvalidParameter(f"simplex dimension must be >= 1, got {ns.dim!r}")
    if ns.k < 1:
        raise InvalidParameter(f"at least one permutation is required, got {ns.k!r}")
    rng = np.random.default_rng([ns.seed, 101])
    violations = 0
    worst = -np.inf
    for trial in range(ns.trials):
        mat = random_bistochastic(ns.dim + 1, ns.k, seed=int(rng.integers(0, 2 ** 31)))
        p = random_point(ns.dim, rng)
        q = random_point(ns.dim, rng)
        dist = check_dist_monotone(gen, mat, p, q, force=ns.force)
        interior = make_prob_vector(0.9 * random_point(ns.dim, rng).coords
                                    + 0.1 / (ns.dim + 1))
        v = random_tangent(interior, rng)
        fins = check_finsler_monotone(gen, mat, v, force=ns.force)
        worst = max(worst, dist.mapped - dist.original, fins.mapped - fins.original)
        if not (dist.holds and fins.holds):
            violations += 1
    _emit({"trials": ns.trials, "violations": violations, "worst_margin": worst},
          ns.output)
    return 0


def cmd_counterexample(ns) -> int:
    _emit(stochastic_counterexample().to_json(), ns.output)
    return 0


def cmd_verify(ns) -> int:
    if ns.trials < 1:
        raise InvalidParameter(f"trials must be >= 1, got {ns.trials!r}")
    if ns.force:
        gen = make_generator(ns.generator, **_gen_params(ns))
        report = probe_monotonicity(gen, seed=ns.seed, trials=ns.trials)
        _emit({"checks": [report.to_json()], "violations": report.violations,
               "mode": "force-probe"}, ns.output)
        return 0
    results = run_battery(seed=ns.seed, scale=ns.trials / 10_000.0)
    total = sum(r.violations for r in results)
    _emit({
        "checks": [r.to_json() for r in results],
        "violations": total,
        "seconds": round(sum(r.seconds for r in results), 3),
    }, ns.output)
    return 0 if total == 0 else 1


def _gen_params(ns) -> dict:
    params = {}
    if ns.alpha is not None:
        params["alpha"] = ns.alpha
    if ns.a is not None:
        params["a"] = ns.a
    return params


def cmd_figure_data(ns) -> int:
    gen = _gen(ns.generator)
    center = _point(ns.center)
    if center.dim != 2:
        raise UnsupportedDimension(
            f"figure data is only defined on the 2-simplex, got dimension {center.dim}"
        )
    target = _point(ns.geodesic_target)
    if target.dim != 2:
        raise UnsupportedDimension("geodesic target must live on the 2-simplex")
    for radius in (ns.forward_radius, ns.backward_radius):
        if not (radius > 0.0):
            raise InvalidParameter(f"ball radius must be positive, got {radius!r}")

    fwd_geo = ball_geometry(gen, center, ns.forward_radius, "forward")
    bwd_geo = ball_geometry(gen, center, ns.backward_radius, "backward")
    fwd_poly = ball_boundary_polyline(gen, center, ns.forward_radius, "forward")
    bwd_poly = ball_boundary_polyline(gen, center, ns.backward_radius, "backward")
    outline = np.asarray([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=float)

    geod = make_geodesic(gen, center, target)
    ts = np.linspace(0.0, geod.length, ns.samples)
    geod_pts = geod.point_many(ts)

    points = [{"label": "P", "coords": center.coords.tolist(), "ambient": False}]
    points.append({"label": "P^+", "coords": fwd_geo.shifted_vertex.tolist(),
                   "ambient": True})
    points.append({"label": "P^-", "coords": bwd_geo.shifted_vertex.tolist(),
                   "ambient": True})
    for i in range(3):
        points.append({"label": f"C_{i}^+", "coords": fwd_geo.corners[i].tolist(),
                       "ambient": False})
        points.append({"label": f"C_{i}^-", "coords": bwd_geo.corners[i].tolist(),
                       "ambient": False})

    _emit({
        "schema": "qsx-figure/1",
        "dimension": 2,
        "generator": gen.to_json(),
        "polylines": [
            {"role": "simplex_outline", "closed": True, "points": outline.tolist()},
            {"role": "forward_ball", "closed": True, "radius": ns.forward_radius,
             "points": fwd_poly.tolist()},
            {"role": "backward_ball", "closed": True, "radius": ns.backward_radius,
             "points": bwd_poly.tolist()},
            {"role": "geodesic", "closed": False, "points": geod_pts.tolist()},
        ],
        "points": points,
    }, ns.output)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    seed_default = _env("SEED", int, 0)
    trials_default = _env("TRIALS", int, None)
    tol_default = _env("TOL", float, None)

    top = argparse.ArgumentParser(prog="qsx", description=__doc__)
    top.add_argument("--version", action="version", version=f"qsx {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, generator_json=True):
        p.add_argument("--output", "-o", default=None, help="write the document here")
        if generator_json:
            p.add_argument("--generator", "-g", default='{"name": "identity"}',
                           help="generator JSON, file path, or -")

    p = sub.add_parser("dist", help="one-way distances between two points")
    common(p)
    p.add_argument("p")
    p.add_argument("q")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("ball", help="shifted vertex and corner points of a ball")
    common(p)
    p.add_argument("center")
    p.add_argument("--radius", "-r", type=float, required=True)
    p.add_argument("--direction", choices=("forward", "backward"), default="forward")
    p.add_argument("--closed", action="store_true",
                   help="document only; the geometry is identical")
    p.add_argument("--boundary-csv", default=None,
                   help="also write the 2-simplex boundary polyline as CSV")
    p.set_defaults(func=cmd_ball)

    p = sub.add_parser("geodesic", help="sample a constructed geodesic")
    common(p)
    p.add_argument("p")
    p.add_argument("q")
    p.add_argument("--samples", "-n", type=int, default=33)
    p.add_argument("--tol", type=float, default=tol_default or 1e-12)
    p.add_argument("--csv", default=None, help="write samples as CSV (t, mu, p_0..p_N)")
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("length", help="forward/backward length of a curve")
    common(p)
    p.add_argument("curve", help='{"type":"polyline",...} or {"type":"geodesic",...}')
    p.add_argument("--tol", type=float, default=tol_default or 1e-6)
    p.set_defaults(func=cmd_length)

    p = sub.add_parser("finsler", help="tangent norm of a vector at a base point")
    common(p, generator_json=False)
    p.add_argument("input", help='{"generator":..., "base":[..], "v":[..]}')
    p.add_argument("--bm-check", action="store_true",
                   help="emit the chord-quotient convergence table as CSV")
    p.set_defaults(func=cmd_finsler)

    p = sub.add_parser("monotone", help="randomized bistochastic monotonicity sweep")
    common(p, generator_json=False)
    p.add_argument("--trials", type=int, default=trials_default or 1000)
    p.add_argument("--dim", type=int, default=2, help="simplex dimension N")
    p.add_argument("--k", type=int, default=3, help="permutations per random matrix")
    p.add_argument("--generator", default="identity",
                   help="generator family name (identity, power, log, arcsin)")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--force", action="store_true",
                   help="run even when the generator lacks the theorem hypotheses")
    p.set_defaults(func=cmd_monotone)

    p = sub.add_parser("counterexample", help="stochastic non-monotonicity instance")
    common(p, generator_json=False)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("verify", help="run the acceptance battery")
    common(p, generator_json=False)
    p.add_argument("--trials", type=int, default=trials_default or 10_000,
                   help="count for the large sweeps; smaller checks scale down")
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--force", action="store_true",
                   help="diagnostic monotonicity probe for --generator, always exit 0")
    p.add_argument("--generator", default="identity")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--a", type=float, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("figure-data", help="export 2-simplex ball/geodesic figure data")
    common(p)
    p.set_defaults(generator='{"name": "power", "alpha": ' + repr(1.0 / 3.0) + "}")
    p.add_argument("--center", default=json.dumps(list(FIG_DEFAULT_CENTER)))
    p.add_argument("--forward-radius", type=float, default=0.12)
    p.add_argument("--backward-radius", type=float, default=0.12)
    p.add_argument("--geodesic-target", default=json.dumps(list(FIG_DEFAULT_TARGET)))
    p.add_argument("--samples", type=int, default=33)
    p.set_defaults(func=cmd_figure_data)

    return top


def main(argv=None) -> int:
    try:
        parser = build_parser()
        ns = parser.parse_args(argv)
        return ns.func(ns)
    except QsxError as exc:
        sys.stderr.write(json.dumps({"error": exc.code, "message": str(exc)}) + "\n")
        return exc.exit_code


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
