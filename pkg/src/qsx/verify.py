"""Seeded verification battery behind the acceptance suite and ``qsx verify``.

Each check runs one numbered property at desk scale with vectorized sweeps,
counting violations against the stated slack and reporting the worst margin
(positive margins are failures).  Random streams are split per task from the
master seed, so parallel or reordered execution reproduces the serial report.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from . import curves as cv
from . import finsler as fin
from . import geodesic as gd
from . import quasimetric as qm
from . import stochastic as st
from .core import (
    GeneratorFunction,
    ProbVector,
    generator,
    make_prob_vector,
    uniform_point,
    vertex,
)

DIMS = (1, 2, 3, 4, 5, 6)


def standard_generators() -> tuple[GeneratorFunction, ...]:
    return (
        generator("identity"),
        generator("power", alpha=0.5),
        generator("power", alpha=1.0 / 3.0),
        generator("log", a=1.0),
        generator("arcsin"),
    )


@dataclass
class CheckResult:
    name: str
    criterion: int
    trials: int
    violations: int
    worst_margin: float
    seconds: float
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "criterion": self.criterion,
            "trials": self.trials,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "seconds": round(self.seconds, 3),
            "ok": self.ok,
            "detail": self.detail,
        }


def _rng(seed: int, task: int) -> np.random.Generator:
    return np.random.default_rng([seed, task])


def _simplex_batch(rng: np.random.Generator, count: int, n_coords: int) -> np.ndarray:
    raw = rng.exponential(size=(count, n_coords))
    return raw / raw.sum(axis=1, keepdims=True)


def _interior_batch(rng: np.random.Generator, count: int, n_coords: int,
                    mix: float = 0.1) -> np.ndarray:
    pts = _simplex_batch(rng, count, n_coords)
    return (1.0 - mix) * pts + mix / n_coords


def _tangent_batch(rng: np.random.Generator, count: int, n_coords: int,
                   scale: float = 1.0) -> np.ndarray:
    comps = rng.standard_normal((count, n_coords)) * scale
    return comps - comps.mean(axis=1, keepdims=True)


def _dist_rows(gen: GeneratorFunction, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.max(np.asarray(gen.fn(q), dtype=float) - np.asarray(gen.fn(p), dtype=float),
                  axis=-1)


def barycentric_grid(denominator: int) -> np.ndarray:
    """All points of the 2-simplex with coordinates k/denominator."""
    i, j = np.mgrid[0:denominator + 1, 0:denominator + 1]
    mask = i + j <= denominator
    return np.stack([i[mask], j[mask], denominator - i[mask] - j[mask]], axis=1) / denominator


# ---------------------------------------------------------------------------
# 1. quasimetric axioms
# ---------------------------------------------------------------------------

def check_quasimetric_axioms(seed: int = 0, trials: int = 10_000) -> CheckResult:
    t0 = time.perf_counter()
    rng = _rng(seed, 1)
    gens = standard_generators()
    per_cell = max(1, trials // len(DIMS))
    total = 0
    violations = 0
    worst = -np.inf
    for gen in gens:
        for dim in DIMS:
            n = dim + 1
            p = _simplex_batch(rng, per_cell, n)
            q = _simplex_batch(rng, per_cell, n)
            r = _simplex_batch(rng, per_cell, n)
            q[: per_cell // 20] = p[: per_cell // 20]  # exact-equality rows
            dpq = _dist_rows(gen, p, q)
            dpr = _dist_rows(gen, p, r)
            drq = _dist_rows(gen, r, q)
            nonneg = -dpq
            triangle = dpq - dpr - drq
            worst = max(worst, float(nonneg.max()), float(triangle.max()))
            bad = (nonneg > 1e-12) | (triangle > 1e-12)
            tiny = dpq < 1e-12
            cheb = np.max(np.abs(q - p), axis=1)
            bad |= tiny & (cheb >= 1e-9)
            violations += int(bad.sum())
            total += per_cell
    return CheckResult("quasimetric_axioms", 1, total, violations, worst,
                       time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# 2. symmetrizations are metrics
# ---------------------------------------------------------------------------

def _sym_power_rows(d1: np.ndarray, d2: np.ndarray, r_exp: float) -> np.ndarray:
    big = np.maximum(d1, d2)
    small = np.minimum(d1, d2)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(big > 0.0, small / np.where(big > 0.0, big, 1.0), 0.0)
        out = big * (1.0 + ratio ** r_exp) ** (1.0 / r_exp)
    return np.where(big > 0.0, out, 0.0)


def check_symmetrizations(seed: int = 0, trials: int = 10_000) -> CheckResult:
    t0 = time.perf_counter()
    rng = _rng(seed, 2)
    per_cell = max(1, trials // len(DIMS))
    total = 0
    violations = 0
    worst = -np.inf
    for gen in standard_generators():
        for dim in DIMS:
            n = dim + 1
            p = _simplex_batch(rng, per_cell, n)
            q = _simplex_batch(rng, per_cell, n)
            r = _simplex_batch(rng, per_cell, n)
            pairs = {
                (0, 1): (p, q), (1, 0): (q, p), (0, 2): (p, r),
                (2, 0): (r, p), (2, 1): (r, q), (1, 2): (q, r),
            }
            d = {k: _dist_rows(gen, a, b) for k, (a, b) in pairs.items()}
            smax = {
                (a, b): np.maximum(d[(a, b)], d[(b, a)])
                for a, b in ((0, 1), (0, 2), (2, 1))
            }
            tri_max = smax[(0, 1)] - smax[(0, 2)] - smax[(2, 1)]
            worst = max(worst, float(tri_max.max()))
            bad = tri_max > 1e-12
            for r_exp in (1.0, 2.0, 64.0):
                spow = {
                    key: _sym_power_rows(d[key], d[(key[1], key[0])], r_exp)
                    for key in ((0, 1), (0, 2), (2, 1))
                }
                tri = spow[(0, 1)] - spow[(0, 2)] - spow[(2, 1)]
                sandwich_lo = smax[(0, 1)] - spow[(0, 1)]
                sandwich_hi = spow[(0, 1)] - 2.0 ** (1.0 / r_exp) * smax[(0, 1)]
                worst = max(worst, float(tri.max()), float(sandwich_lo.max()),
                            float(sandwich_hi.max()))
                bad |= (tri > 1e-12) | (sandwich_lo > 1e-12) | (sandwich_hi > 1e-12)
            violations += int(bad.sum())
            total += per_cell
    return CheckResult("symmetrization_metrics", 2, total, violations, worst,
                       time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# 3. ball characterization (coordinate form vs distance form)
# ---------------------------------------------------------------------------

def _memberships(gen: GeneratorFunction, center: np.ndarray, qs: np.ndarray,
                 radius: float, direction: str, closed: bool
                 ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(coordinate-form, distance-form, distances) membership for many points."""
    fc = np.asarray(gen.fn(center), dtype=float)
    fq = np.asarray(gen.fn(qs), dtype=float)
    if direction == "forward":
        dist = np.max(fq - fc, axis=1)
        caps = fc + radius
        bounds = np.asarray(gen.inv(np.minimum(caps, 1.0)), dtype=float)
        active = (caps < 1.0) if closed else (caps <= 1.0)
        per_coord = (qs <= bounds) if closed else (qs < bounds)
    else:
        dist = np.max(fc - fq, axis=1)
        floors = fc - radius
        bounds = np.asarray(gen.inv(np.maximum(floors, 0.0)), dtype=float)
        active = (floors > 0.0) if closed else (floors >= 0.0)
        per_coord = (qs >= bounds) if closed else (qs > bounds)
    coord_form = np.all(per_coord | ~active, axis=1)
    dist_form = (dist <= radius) if closed else (dist < radius)
    return coord_form, dist_form, dist


def check_ball_characterization(seed: int = 0, trials: int = 10_000) -> CheckResult:
    t0 = time.perf_counter()
    rng = _rng(seed, 3)
    grid = barycentric_grid(60)
    centers = np.asarray([
        [20, 20, 20], [13, 20, 27], [60, 0, 0], [0, 15, 45], [1, 29, 30],
    ]) / 60.0
    total = 0
    violations = 0
    closest_call = np.inf
    for gen in standard_generators():
        for center in centers:
            for radius in (0.1503, 0.4501):
                for direction in ("forward", "backward"):
                    for closed in (False, True):
                        coord, dist_form, dist = _memberships(
                            gen, center, grid, radius, direction, closed)
                        decided = np.abs(dist - radius) > 1e-12
                        mism = decided & (coord != dist_form)
                        if mism.any():
                            closest_call = min(closest_call,
                                               float(np.abs(dist - radius)[mism].min()))
                        violations += int(mism.sum())
                        total += int(decided.sum())
    gens = standard_generators()
    per_dim = max(1, trials // 4)
    for dim in (3, 4, 5, 6):
        n = dim + 1
        ps = _simplex_batch(rng, per_dim, n)
        qs = _simplex_batch(rng, per_dim, n)
        radii = rng.uniform(0.02, 1.1, size=per_dim)
        picks = rng.integers(0, len(gens), size=per_dim)
        for k in range(per_dim):
            g = gens[picks[k]]
            direction = "forward" if rng.random() < 0.5 else "backward"
            closed = bool(rng.random() < 0.5)
            coord, dist_form, dist = _memberships(
                g, ps[k], qs[k:k + 1], float(radii[k]), direction, closed)
            if abs(float(dist[0]) - radii[k]) <= 1e-12:
                continue
            total += 1
            if coord[0] != dist_form[0]:
                violations += 1
                closest_call = min(closest_call, abs(float(dist[0]) - radii[k]))
    worst = 0.0 if violations == 0 else closest_call
    return CheckResult("ball_characterization", 3, total, violations, worst,
                       time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# 4. identity bi-Lipschitz bounds against the Chebyshev distance
# ---------------------------------------------------------------------------

def check_bilipschitz(seed: int = 0, trials: int = 10_000) -> CheckResult:
    t0 = time.perf_counter()
    rng = _rng(seed, 4)
    ident = generator("identity")
    per_cell = max(1, trials // len(DIMS))
    total = 0
    violations = 0
    worst = -np.inf
    for dim in DIMS:
        n = dim + 1
        p = _simplex_batch(rng, per_cell, n)
        q = _simplex_batch(rng, per_cell, n)
        d_id = _dist_rows(ident, p, q)
        d_inf = np.max(np.abs(q - p), axis=1)
        lower = d_inf / dim - d_id
        upper = d_id - d_inf
        worst = max(worst, float(lower.max()), float(upper.max()))
        violations += int(((lower > 1e-12) | (upper > 1e-12)).sum())
        total += per_cell
        # saturation: p a vertex, q the barycenter
        pv = vertex(dim, 0).coords
        qu = uniform_point(dim).coords
        gap = abs(float(np.max(qu - pv)) - float(np.max(np.abs(qu - pv))) / dim)
        worst = max(worst, gap - 1e-15)
        if gap > 1e-15:
            violations += 1
        total += 1
    return CheckResult("bilipschitz_identity", 4, total, violations, worst,
                       time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# 5. geodesic identity
# ---------------------------------------------------------------------------

def _distinct_pairs(rng: np.random.Generator, count: int, n_coords: int,
                    interior: bool) -> tuple[np.ndarray, np.ndarray]:
    maker = _interior_batch if interior else _simplex_batch
    p = maker(rng, count, n_coords)
    q = maker(rng, count, n_coords)
    close = np.max(np.abs(p - q), axis=1) < 1e-6
    while close.any():
        q[close] = maker(rng, int(close.sum()), n_coords)
        close = np.max(np.abs(p - q), axis=1) < 1e-6
    return p, q


def _boundary_batch(rng: np.random.Generator, count: int, n_coords: int) -> np.ndarray:
    pts = _simplex_batch(rng, count, n_coords)
    kill = rng.integers(0, n_coords, size=count)
    pts[np.arange(count), kill] = 0.0
    return pts / pts.sum(axis=1, keepdims=True)


def _grid_defect(gen: GeneratorFunction, ts: np.ndarray, coords: np.ndarray) -> np.ndarray:
    fvals = np.asarray(gen.fn(coords), dtype=float)
    pair_dist = np.max(fvals[:, None, :, :] - fvals[:, :, None, :], axis=3)
    gaps = ts[:, None, :] - ts[:, :, None]
    defect = np.abs(pair_dist - gaps)
    return np.max(np.where(gaps > 0.0, defect, 0.0), axis=(1, 2))


def check_geodesic_identity(seed: int = 0, pairs: int = 100, grid_size: int = 33,
                            tol: float = 1e-8, solver_tol: float = 1e-12) -> CheckResult:
    t0 = time.perf_counter()
    rng = _rng(seed, 5)
    ident = generator("identity")
    total = 0
    violations = 0
    worst = 0.0
    for gen in standard_generators():
        for dim in DIMS:
            p, q = _distinct_pairs(rng, pairs, dim + 1, interior=True)
            spans, ts, mus, coords = gd.geodesic_grid_batch(gen, p, q, grid_size, solver_tol)
            defects = _grid_defect(gen, ts, coords)
            worst = max(worst, float(defects.max()))
            violations += int((defects > tol).sum())
            total += pairs
            # one instance per cell through the scalar public path
            geod = gd.make_geodesic(gen, make_prob_vector(p[0]), make_prob_vector(q[0]),
                                    tol=solver_tol)
            result = cv.is_f_geodesic(gen, geod.as_curve(), grid_size=grid_size, tol=tol)
            worst = max(worst, result.defect)
            violations += 0 if result.ok else 1
            total += 1
    # boundary-endpoint instances, identity generator
    for dim in DIMS:
        n = dim + 1
        p = _boundary_batch(rng, 20, n)
        q = _boundary_batch(rng, 20, n)
        keep = np.max(np.abs(p - q), axis=1) > 1e-6
        p, q = p[keep], q[keep]
        if not len(p):
            continue
        spans, ts, mus, coords = gd.geodesic_grid_batch(ident, p, q, grid_size, solver_tol)
        defects = _grid_defect(ident, ts, coords)
        worst = max(worst, float(defects.max()))
        violations += int((defects > tol).sum())
        total += len(p)
    return CheckResult("geodesic_identity", 5, total, violations, worst - tol,
                       time.perf_counter() - t0,
                       detail=f"worst grid defect {worst:.3e} (tolerance {tol:g})")


# ---------------------------------------------------------------------------
# 6. mixing-map contract
# ---------------------------------------------------------------------------

def check_mu_contract(seed: int = 0, instances: int = 10) -> CheckResult:
    t0 = time.perf_counter()
    rng = _rng(seed, 6)
    total = 0
    violations = 0
    worst = -np.inf
    for gen in standard_generators():
        for dim in DIMS:
            p, q = _distinct_pairs(rng, instances, dim + 1, interior=True)
            for k in range(instances):
                start = make_prob_vector(p[k])
                end = make_prob_vector(q[k])
                geod = gd.make_geodesic(gen, start, end)
                span = geod.length
                end_err = max(gd.solve_mu(gen, start, end, 0.0),
                              abs(gd.solve_mu(gen, start, end, span) - 1.0))
                grid = np.linspace(0.0, span, 17)
                mus = geod.mu_many(grid)
                increase_ok = bool(np.all(np.diff(mus) > 0.0))
                rel_worst = 0.0
                h = 1e-6 * span
                for frac in (0.1, 0.3, 0.5, 0.7, 0.9):
                    t = frac * span
                    formula = geod.mu_prime(t)
                    fd = (gd.solve_mu(gen, start, end, t + h)
                          - gd.solve_mu(gen, start, end, t - h)) / (2.0 * h)
                    rel_worst = max(rel_worst, abs(formula - fd) / abs(formula))
                worst = max(worst, end_err - 1e-10, rel_worst - 1e-4)
                if end_err > 1e-10 or not increase_ok or rel_worst > 1e-4:
                    violations += 1
                total += 1
    return CheckResult("mu_contract", 6, total, violations, worst,
                       time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# 7. identity closed form
# ---------------------------------------------------------------------------

def check_identity_closed_form(seed: int = 0, pairs: int = 100) -> CheckResult:
    t0 = time.perf_counter()
    rng = _rng(seed, 7)
    ident = generator("identity")
    per_cell = max(1, pairs // len(DIMS))
    total = 0
    violations = 0
    worst = -np.inf
    for dim in DIMS:
        p, q = _distinct_pairs(rng, per_cell, dim + 1, interior=False)
        spans, ts, mus, coords = gd.geodesic_grid_batch(ident, p, q, 17)
        mu_err = np.max(np.abs(mus - ts / spans[:, None]), axis=1)
        straight = p[:, None, :] + (ts / spans[:, None])[..., None] * (q - p)[:, None, :]
        coord_err = np.max(np.abs(coords - straight), axis=(1, 2))
        worst = max(worst, float(mu_err.max()) - 1e-10, float(coord_err.max()) - 1e-10)
        violations += int(((mu_err > 1e-10) | (coord_err > 1e-10)).sum())
        total += len(p)
    return CheckResult("identity_closed_form", 7, total, violations, worst,
                       time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# 8. length consistency
# ---------------------------------------------------------------------------

def _polynomial_curve(rng: np.random.Generator, n_coords: int) -> cv.Curve:
    """Random smooth interior curve from a positive quadratic weight vector."""
    a = rng.uniform(0.5, 1.5, size=n_coords)
    b = rng.uniform(-0.2, 0.2, size=n_coords)
    c = rng.uniform(-0.2, 0.2, size=n_coords)

    def weights(t: float) -> tuple[np.ndarray, np.ndarray]:
        w = a + b * t + c * t * t
        dw = b + 2.0 * c * t
        return w, dw

    def at(t: float) -> ProbVector:
        w, _ = weights(t)
        return make_prob_vector(w / w.sum())

    def deriv(t: float):
        from .core import TangentVector
        w, dw = weights(t)
        total = w.sum()
        comps = (dw * total - w * dw.sum()) / (total * total)
        return TangentVector(at(t), comps)

    return cv.Curve(domain=(0.0, 1.0), evaluator=at, derivative=deriv, smoothness="C1")


def check_length_consistency(seed: int = 0, poly_curves: int = 20) -> CheckResult:
    t0 = time.perf_counter()
    rng = _rng(seed, 8)
    gens = standard_generators()
    total = 0
    violations = 0
    worst = -np.inf
    for gen in gens:
        for dim in (1, 2, 3):
            p, q = _distinct_pairs(rng, 2, dim + 1, interior=True)
            for k in range(2):
                geod = gd.make_geodesic(gen, make_prob_vector(p[k]), make_prob_vector(q[k]))
                curve = geod.as_curve()
                span = geod.length
                refine_err = abs(cv.forward_length(gen, curve, 1e-7) - span)
                quad_err = abs(fin.finsler_length(gen, curve, knots=8) - span)
                worst = max(worst, refine_err - 1e-6, quad_err - 1e-6)
                if refine_err > 1e-6 or quad_err > 1e-6:
                    violations += 1
                total += 1
    for k in range(poly_curves):
        gen = gens[k % len(gens)]
        curve = _polynomial_curve(rng, int(rng.integers(2, 5)))
        lplus = cv.forward_length(gen, curve, 2e-6)
        lfins = fin.finsler_length(gen, curve, knots=8)
        gap = abs(lfins - lplus)
        worst = max(worst, gap - 1e-5)
        if gap > 1e-5:
            violations += 1
        total += 1
    return CheckResult("length_consistency", 8, total, violations, worst,
                       time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# 9. chord-quotient limit of the tangent norm
# ---------------------------------------------------------------------------

def check_busemann_mayer(seed: int = 0, pairs: int = 100) -> CheckResult:
    t0 = time.perf_counter()
    rng = _rng(seed, 9)
    ladder = 10.0 ** -np.arange(2, 7)
    total = 0
    violations = 0
    worst = -np.inf
    for gen in standard_generators():
        per_cell = max(1, pairs // len(DIMS))
        for dim in DIMS:
            n = dim + 1
            bases = _interior_batch(rng, per_cell, n)
            comps = _tangent_batch(rng, per_cell, n)
            scale = 0.4 * bases.min(axis=1) / (ladder[0] * np.max(np.abs(comps), axis=1))
            comps *= scale[:, None]
            fbase = np.asarray(gen.fn(bases), dtype=float)
            dvals = np.asarray(gen.deriv(bases), dtype=float)
            norm = np.max(dvals * comps, axis=1)
            moved = bases[:, None, :] + ladder[None, :, None] * comps[:, None, :]
            quot = np.max(np.asarray(gen.fn(moved), dtype=float) - fbase[:, None, :],
                          axis=2) / ladder[None, :]
            dev = np.abs(quot - norm[:, None])
            allowed = 1e-4 * (1.0 + norm)
            final_bad = dev[:, -1] - allowed
            # noise floor keeps exactly-converged sequences from tripping the ratio test
            mono_bad = dev[:, 1:] - (1.1 * dev[:, :-1] + 1e-10 * (1.0 + norm[:, None]))
            worst = max(worst, float(final_bad.max()), float(mono_bad.max()))
            violations += int(((final_bad > 0.0) | (mono_bad > 0.0).any(axis=1)).sum())
            total += per_cell
    return CheckResult("busemann_mayer", 9, total, violations, worst,
                       time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# 10. tangent norm axioms
# ---------------------------------------------------------------------------

def check_finsler_axioms(seed: int = 0, pairs: int = 1000) -> CheckResult:
    t0 = time.perf_counter()
    rng = _rng(seed, 10)
    total = 0
    violations = 0
    worst = -np.inf
    for gen in standard_generators():
        per_cell = max(1, pairs // len(DIMS))
        for dim in DIMS:
            n = dim + 1
            bases = _interior_batch(rng, per_cell, n)
            v = _tangent_batch(rng, per_cell, n)
            w = _tangent_batch(rng, per_cell, n)
            lam = rng.uniform(0.1, 10.0, size=per_cell)
            dvals = np.asarray(gen.deriv(bases), dtype=float)
            norm_v = np.max(dvals * v, axis=1)
            norm_w = np.max(dvals * w, axis=1)
            homog = np.abs(np.max(dvals * (lam[:, None] * v), axis=1) - lam * norm_v)
            subadd = np.max(dvals * (v + w), axis=1) - norm_v - norm_w
            worst = max(worst, float(homog.max()) - 1e-12, float(subadd.max()) - 1e-12)
            violations += int(((homog > 1e-12) | (subadd > 1e-12)).sum())
            nondeg = (norm_v <= 1e-12) & (np.max(np.abs(v), axis=1) > 1e-10)
            violations += int(nondeg.sum())
            total += per_cell
    return CheckResult("finsler_axioms", 10, total, violations, worst,
                       time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# 11. bistochastic monotonicity
# ---------------------------------------------------------------------------

def _random_bistochastic_batch(rng: np.random.Generator, count: int, n: int,
                               k: int) -> np.ndarray:
    lam = rng.exponential(size=(count, k))
    lam /= lam.sum(axis=1, keepdims=True)
    perms = np.argsort(rng.random((count, k, n)), axis=2)
    mats = np.eye(n)[perms]  # (count, k, n, n) with [b, j, i, perm[b,j,i]] = 1
    return np.einsum("bk,bkij->bij", lam, mats)


def _qualifying(gen: GeneratorFunction) -> bool:
    return bool(gen.is_c1 and gen.deriv is not None and gen.derivative_positive
                and gen.reciprocal_derivative_concave)


def check_monotonicity(seed: int = 0, trials: int = 10_000,
                       gens: tuple[GeneratorFunction, ...] | None = None,
                       force: bool = False) -> CheckResult:
    t0 = time.perf_counter()
    rng = _rng(seed, 11)
    gens = tuple(gens if gens is not None else standard_generators())
    if not force:
        gens = tuple(g for g in gens if _qualifying(g))
    total = 0
    violations = 0
    worst = -np.inf
    for gen in gens:
        per_cell = max(1, trials // len(DIMS))
        for dim in DIMS:
            n = dim + 1
            k = max(2, min(4, n - 1)) if n > 2 else 2
            mats = _random_bistochastic_batch(rng, per_cell, n, k)
            p = _simplex_batch(rng, per_cell, n)
            q = _simplex_batch(rng, per_cell, n)
            sp = np.einsum("bij,bj->bi", mats, p)
            sq = np.einsum("bij,bj->bi", mats, q)
            dist_margin = _dist_rows(gen, sp, sq) - _dist_rows(gen, p, q)
            bases = _interior_batch(rng, per_cell, n)
            v = _tangent_batch(rng, per_cell, n)
            sb = np.einsum("bij,bj->bi", mats, bases)
            sv = np.einsum("bij,bj->bi", mats, v)
            f_orig = np.max(np.asarray(gen.deriv(bases)) * v, axis=1)
            f_mapped = np.max(np.asarray(gen.deriv(sb)) * sv, axis=1)
            fin_margin = f_mapped - f_orig
            worst = max(worst, float(dist_margin.max()), float(fin_margin.max()))
            violations += int(((dist_margin > 1e-12) | (fin_margin > 1e-12)).sum())
            total += per_cell
    # exhaustive small grid: 3x3 mixtures of permutation pairs, lambda step 1/8
    perms3 = list(itertools.permutations(range(3)))
    mixtures = []
    for s1 in perms3:
        for s2 in perms3:
            for lam8 in range(9):
                lam = lam8 / 8.0
                mixtures.append(lam * st.permutation_matrix(s1)
                                + (1.0 - lam) * st.permutation_matrix(s2))
    mats = np.asarray(mixtures)
    grid = barycentric_grid(6)
    for gen in gens:
        fgrid = np.asarray(gen.fn(grid), dtype=float)
        d_orig = np.max(fgrid[None, :, :] - fgrid[:, None, :], axis=2)
        for lo in range(0, len(mats), 40):
            chunk = mats[lo:lo + 40]
            sp = np.einsum("sij,pj->spi", chunk, grid)
            fsp = np.asarray(gen.fn(sp), dtype=float)
            d_map = np.max(fsp[:, None, :, :] - fsp[:, :, None, :], axis=3)
            margin = d_map - d_orig[None, :, :]
            worst = max(worst, float(margin.max()))
            violations += int((margin > 1e-12).sum())
            total += margin.size
        interior = grid[np.all(grid >= 1.0 / 6.0 - 1e-12, axis=1)]
        dirs = np.asarray([[1, -1, 0], [1, 0, -1], [0, 1, -1],
                           [-1, 1, 0], [-1, 0, 1], [0, -1, 1]], dtype=float)
        dv = np.asarray(gen.deriv(interior), dtype=float)
        f_orig = np.max(dv[:, None, :] * dirs[None, :, :], axis=2)  # (pts, dirs)
        sp = np.einsum("sij,pj->spi", mats, interior)
        sv = np.einsum("sij,dj->sdi", mats, dirs)
        dsp = np.asarray(gen.deriv(sp), dtype=float)
        f_map = np.max(dsp[:, :, None, :] * sv[:, None, :, :], axis=3)  # (S, pts, dirs)
        margin = f_map - f_orig[None, :, :]
        worst = max(worst, float(margin.max()))
        violations += int((margin > 1e-12).sum())
        total += margin.size
    return CheckResult("bistochastic_monotonicity", 11, total, violations, worst,
                       time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# 12. stochastic counterexample
# ---------------------------------------------------------------------------

def check_counterexample() -> CheckResult:
    t0 = time.perf_counter()
    rep = st.stochastic_counterexample()
    bad = 0
    if rep.dist_before != 0.5 or rep.dist_after != 1.0:
        bad += 1
    if not rep.matrix_is_stochastic or rep.matrix_is_bistochastic:
        bad += 1
    if not rep.monotonicity_violated:
        bad += 1
    worst = max(abs(rep.dist_before - 0.5), abs(rep.dist_after - 1.0))
    return CheckResult("stochastic_counterexample", 12, 1, bad, worst,
                       time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# 13. Birkhoff round trip
# ---------------------------------------------------------------------------

def check_birkhoff(seed: int = 0, count: int = 100) -> CheckResult:
    t0 = time.perf_counter()
    rng = _rng(seed, 13)
    total = 0
    violations = 0
    worst = -np.inf
    for i in range(count):
        n = int(rng.integers(2, 13))
        k = int(rng.integers(1, max(3, n)))  # k <= n-1 for n >= 3, else <= 2
        k = min(k, max(2, n - 1))
        mat = st.random_bistochastic(n, k, seed=int(rng.integers(0, 2 ** 31)))
        dec = st.birkhoff_decompose(mat)
        err = float(np.max(np.abs(dec.reconstruct() - mat.entries)))
        wsum = abs(float(dec.weights.sum()) - 1.0)
        bound = (n - 1) ** 2 + 1
        worst = max(worst, err - 1e-9, wsum - 1e-9, float(len(dec) - bound))
        if err > 1e-9 or wsum > 1e-9 or len(dec) > bound:
            violations += 1
        total += 1
    return CheckResult("birkhoff_roundtrip", 13, total, violations, worst,
                       time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# 14. curve calculus battery
# ---------------------------------------------------------------------------

def _battery_curves(rng: np.random.Generator) -> list[tuple[GeneratorFunction, cv.Curve]]:
    gens = standard_generators()
    battery: list[tuple[GeneratorFunction, cv.Curve]] = []
    idx = 0
    for _ in range(5):
        dim = int(rng.integers(1, 4))
        p, q = _distinct_pairs(rng, 1, dim + 1, interior=True)
        battery.append((gens[idx % 5], cv.segment(make_prob_vector(p[0]),
                                                  make_prob_vector(q[0]))))
        idx += 1
    for _ in range(5):
        dim = int(rng.integers(1, 4))
        pts = _interior_batch(rng, 3, dim + 1)
        battery.append((gens[idx % 5], cv.polyline([0.0, 0.4, 1.0], pts)))
        idx += 1
    for _ in range(5):
        battery.append((gens[idx % 5], _polynomial_curve(rng, int(rng.integers(2, 5)))))
        idx += 1
    for _ in range(3):
        dim = int(rng.integers(1, 4))
        p, q = _distinct_pairs(rng, 1, dim + 1, interior=True)
        geod = gd.make_geodesic(gens[idx % 5], make_prob_vector(p[0]),
                                make_prob_vector(q[0]))
        battery.append((gens[idx % 5], geod.as_curve()))
        idx += 1
    battery.append((gens[0], cv.constant_curve(uniform_point(2), domain=(0.0, 1.0))))
    pts = _interior_batch(rng, 3, 3)
    battery.append((gens[1], cv.reverse(cv.polyline([0.0, 0.7, 1.0], pts))))
    return battery


def check_curve_calculus(seed: int = 0, tol: float = 1e-6) -> CheckResult:
    t0 = time.perf_counter()
    rng = _rng(seed, 14)
    total = 0
    violations = 0
    worst = -np.inf
    for gen, curve in _battery_curves(rng):
        a, b = curve.domain
        mid = 0.5 * (a + b)
        inner = tol / 4.0
        whole = cv.forward_length(gen, curve, inner)
        left = cv.forward_length(gen, cv.restrict(curve, a, mid), inner)
        right = cv.forward_length(gen, cv.restrict(curve, mid, b), inner)
        additivity = abs(left + right - whole)
        glued = cv.concat(cv.restrict(curve, a, mid), cv.restrict(curve, mid, b))
        concat_gap = abs(cv.forward_length(gen, glued, inner) - whole)

        width = b - a
        rho = (lambda s, a=a, width=width: a + width * (0.4 * s + 0.6 * s * s))
        re = cv.reparametrize(curve, rho, (0.0, 1.0))
        preserve = abs(cv.forward_length(gen, re, inner) - whole)
        swap = abs(cv.forward_length(gen, cv.reverse(curve), inner)
                   - cv.backward_length(gen, curve, inner))

        profile = [cv.length_profile(gen, curve, t, inner)
                   for t in np.linspace(a, b, 5)]
        mono_bad = max(0.0, float(np.max(-np.diff(profile))))

        worst = max(worst, additivity - 2 * tol, concat_gap - 2 * tol,
                    preserve - tol, swap - tol, mono_bad - 1e-12)
        if (additivity > 2 * tol or concat_gap > 2 * tol or preserve > tol
                or swap > tol or mono_bad > 1e-12):
            violations += 1
        total += 1
    return CheckResult("curve_calculus", 14, total, violations, worst,
                       time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# 15. non-uniqueness witness
# ---------------------------------------------------------------------------

def check_nonuniqueness(seed: int = 0) -> CheckResult:
    t0 = time.perf_counter()
    ident = generator("identity")
    start = make_prob_vector([0.55, 0.25, 0.20])
    corner = make_prob_vector([1.0, 0.0, 0.0])
    straight = cv.segment(start, corner)
    bend = cv.polyline([0.0, 0.5, 1.0],
                       [start, make_prob_vector([0.75, 0.20, 0.05]), corner])
    span = qm.quasi_dist(ident, start, corner)
    total = 0
    violations = 0
    worst = -np.inf
    for curve in (straight, bend):
        length = cv.forward_length(ident, curve, 1e-7)
        gap = abs(length - span)
        pre = cv.is_f_pregeodesic(ident, curve, 1e-6)
        worst = max(worst, gap - 1e-6)
        if gap > 1e-6 or not pre:
            violations += 1
        total += 1
    distinct = not straight(0.5).allclose(bend(0.5), tol=1e-3)
    if not distinct:
        violations += 1
    return CheckResult("nonuniqueness_witness", 15, total, violations, worst,
                       time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# battery driver
# ---------------------------------------------------------------------------

def run_battery(seed: int = 0, scale: float = 1.0) -> list[CheckResult]:
    """Run every check with counts scaled from the criterion defaults."""

    def n(base: int) -> int:
        return max(1, int(round(base * scale)))

    return [
        check_quasimetric_axioms(seed, trials=n(10_000)),
        check_symmetrizations(seed, trials=n(10_000)),
        check_ball_characterization(seed, trials=n(10_000)),
        check_bilipschitz(seed, trials=n(10_000)),
        check_geodesic_identity(seed, pairs=n(100)),
        check_mu_contract(seed, instances=n(10)),
        check_identity_closed_form(seed, pairs=n(100)),
        check_length_consistency(seed, poly_curves=n(20)),
        check_busemann_mayer(seed, pairs=n(100)),
        check_finsler_axioms(seed, pairs=n(1000)),
        check_monotonicity(seed, trials=n(10_000)),
        check_counterexample(),
        check_birkhoff(seed, count=n(100)),
        check_curve_calculus(seed),
        check_nonuniqueness(seed),
    ]


def probe_monotonicity(gen: GeneratorFunction, seed: int = 0,
                       trials: int = 10_000) -> CheckResult:
    """Diagnostic sweep for a generator outside the theorem hypotheses."""
    result = check_monotonicity(seed, trials=trials, gens=(gen,), force=True)
    result.name = f"monotonicity_probe[{gen.label()}]"
    result.detail = "diagnostic only: hypotheses not satisfied, violations expected"
    return result
