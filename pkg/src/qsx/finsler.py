"""Infinitesimal structure: the tangent norm, its lengths, and the chord limit.

At an interior point p, the asymmetric tangent norm is
``F(v) = max_i f'(p_i) * v_i``: nonnegative on zero-sum vectors, subadditive,
positively homogeneous, and zero only on the zero vector.  Curve lengths under
F are computed by composite midpoint quadrature; the small-chord limit of
D_f(curve(s), curve(t)) / (t - s) recovers F, which is checked numerically.

All operations here require C1 generators and strictly interior base points
(margin 1e-12); callers must clip domains accordingly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import GeneratorFunction, ProbVector, TangentVector, random_tangent
from .curves import Curve
from .errors import (
    BaseMismatch,
    BoundaryPoint,
    InvalidInput,
    LeavesSimplex,
    NoConvergence,
    NotC1,
)
from .quasimetric import quasi_dist

INTERIOR_MARGIN = 1e-12

QUADRATURE_REL_TOL = 1e-8
QUADRATURE_MAX_KNOTS = 1 << 16


class FinslerEvaluation(NamedTuple):
    value: float
    argmax: int


def _require_c1(gen: GeneratorFunction) -> None:
    if not gen.is_c1 or gen.deriv is None:
        raise NotC1(f"generator {gen.label()} is not C1 with a derivative evaluator")


def _require_interior(coords: np.ndarray) -> None:
    lo, hi = float(np.min(coords)), float(np.max(coords))
    if lo <= INTERIOR_MARGIN or hi >= 1.0 - INTERIOR_MARGIN:
        raise BoundaryPoint(
            f"base point with coordinates in [{lo!r}, {hi!r}] is not strictly interior"
        )


def _norm_components(gen: GeneratorFunction, base: np.ndarray, vel: np.ndarray) -> tuple[float, int]:
    vals = np.asarray(gen.deriv(base), dtype=float) * vel
    idx = int(np.argmax(vals))
    return float(vals[idx]), idx


def finsler_F(gen: GeneratorFunction, v: TangentVector) -> FinslerEvaluation:
    """Tangent norm max_i f'(p_i) v_i with the maximizing index (lowest wins ties)."""
    _require_c1(gen)
    _require_interior(v.base.coords)
    value, idx = _norm_components(gen, v.base.coords, v.components)
    return FinslerEvaluation(value, idx)


def finsler_length(gen: GeneratorFunction, curve: Curve, knots: int = 8,
                   max_knots: int = QUADRATURE_MAX_KNOTS) -> float:
    """Length under the tangent norm by composite midpoint quadrature.

    Each C1 piece starts at ``knots`` midpoint nodes and doubles until the
    total changes by less than relative 1e-8.  Midpoint nodes avoid piece
    endpoints, where curves may approach the simplex boundary.
    """
    _require_c1(gen)
    if knots < 1:
        raise InvalidInput(f"quadrature needs at least one knot, got {knots!r}")
    a, b = curve.domain
    if b <= a:
        return 0.0

    def integrand(t: float) -> float:
        tv = curve.velocity(t)
        _require_interior(tv.base.coords)
        value, _ = _norm_components(gen, tv.base.coords, tv.components)
        return value

    total = 0.0
    for lo, hi in curve.pieces():
        n = knots
        prev = None
        while True:
            mids = lo + (hi - lo) * (np.arange(n) + 0.5) / n
            est = (hi - lo) / n * sum(integrand(t) for t in mids)
            if prev is not None and abs(est - prev) <= QUADRATURE_REL_TOL * max(1.0, abs(est)):
                total += est
                break
            if 2 * n > max_knots:
                raise NoConvergence(
                    f"quadrature did not settle within {max_knots} nodes on "
                    f"[{lo!r}, {hi!r}] (last {prev!r} -> {est!r})"
                )
            prev = est
            n *= 2
    return total


def bm_derivative(gen: GeneratorFunction, p: ProbVector, v: TangentVector,
                  t_sequence) -> np.ndarray:
    """Chord quotients D_f(p, p + t v) / t along a decreasing parameter ladder.

    The final entries converge to the tangent norm F(v) as t shrinks; each
    displaced point must stay inside the simplex.
    """
    _require_c1(gen)
    _require_interior(p.coords)
    if not v.base.allclose(p, tol=1e-12):
        raise BaseMismatch("tangent vector is based at a different point")
    ts = np.asarray(t_sequence, dtype=float)
    if ts.ndim != 1 or ts.size == 0 or np.any(ts <= 0.0):
        raise InvalidInput("parameter ladder must be positive reals")
    if np.any(np.diff(ts) >= 0.0):
        raise InvalidInput("parameter ladder must be strictly decreasing")
    moved = p.coords + ts[:, None] * v.components
    if np.any(moved < 0.0) or np.any(moved > 1.0):
        raise LeavesSimplex(
            f"displacement leaves the simplex at t={ts[np.where((moved < 0) | (moved > 1))[0][0]]!r}"
        )
    fbase = np.asarray(gen.fn(p.coords), dtype=float)
    quotients = np.max(np.asarray(gen.fn(moved), dtype=float) - fbase, axis=1) / ts
    return quotients


@dataclass(frozen=True)
class FinslerAxiomReport:
    samples: int
    homogeneity_worst: float
    subadditivity_worst: float
    nondegeneracy_violations: int

    @property
    def ok(self) -> bool:
        return (self.homogeneity_worst <= 1e-12 and self.subadditivity_worst <= 1e-12
                and self.nondegeneracy_violations == 0)


def finsler_axioms_check(gen: GeneratorFunction, base: ProbVector, samples: int,
                         seed: int = 0) -> FinslerAxiomReport:
    """Randomized check of subadditivity, positive homogeneity, nondegeneracy."""
    _require_c1(gen)
    _require_interior(base.coords)
    if samples < 1:
        raise InvalidInput("at least one sample is required")
    rng = np.random.default_rng(seed)
    dvals = np.asarray(gen.deriv(base.coords), dtype=float)

    def norm(comps: np.ndarray) -> float:
        return float(np.max(dvals * comps))

    homog_worst = 0.0
    subadd_worst = 0.0
    nondeg_bad = 0
    for _ in range(samples):
        v = random_tangent(base, rng).components
        w = random_tangent(base, rng).components
        lam = float(rng.uniform(0.1, 10.0))
        homog_worst = max(homog_worst, abs(norm(lam * v) - lam * norm(v)))
        subadd_worst = max(subadd_worst, norm(v + w) - norm(v) - norm(w))
        if norm(v) <= 1e-12 and np.max(np.abs(v)) > 1e-10:
            nondeg_bad += 1
    return FinslerAxiomReport(
        samples=samples,
        homogeneity_worst=homog_worst,
        subadditivity_worst=max(subadd_worst, 0.0),
        nondegeneracy_violations=nondeg_bad,
    )


class ChordCheckReport(NamedTuple):
    delta: float
    worst_deviation: float
    satisfied: bool


def uniform_chord_check(gen: GeneratorFunction, curve: Curve, eps: float,
                        s_samples: int = 33, ladder: int = 12) -> ChordCheckReport:
    """Empirical mesh below which chord quotients track the tangent norm.

    Samples base parameters s and positive gaps from a halving ladder, and
    reports the largest sampled mesh delta for which every chord quotient
    D(curve(s), curve(t)) / (t - s) with t - s < delta deviates from
    F(velocity(s)) by at most eps.  No claim of maximality is made.
    """
    _require_c1(gen)
    if not (eps > 0.0):
        raise InvalidInput(f"chord tolerance must be strictly positive, got {eps!r}")
    a, b = curve.domain
    if b <= a:
        raise InvalidInput("chord check needs a nondegenerate domain")
    width = b - a
    svals = np.linspace(a, b - width * 2.0 ** -ladder, s_samples)
    norms = []
    for s in svals:
        tv = curve.velocity(float(s))
        _require_interior(tv.base.coords)
        value, _ = _norm_components(gen, tv.base.coords, tv.components)
        norms.append(value)

    deltas = width * 2.0 ** -np.arange(1, ladder + 1)
    deviations = np.full((s_samples, deltas.size), np.nan)
    for i, s in enumerate(svals):
        for k, gap in enumerate(deltas):
            t = float(s) + float(gap)
            if t > b:
                continue
            d = quasi_dist(gen, curve(float(s)), curve(t))
            deviations[i, k] = abs(d / gap - norms[i])

    # worst deviation among all sampled chords with gap < delta, per ladder rung
    for k in range(deltas.size):
        worst = float(np.nanmax(deviations[:, k:]))
        if worst <= eps:
            return ChordCheckReport(delta=float(deltas[k]), worst_deviation=worst,
                                    satisfied=True)
    return ChordCheckReport(delta=0.0,
                            worst_deviation=float(np.nanmax(deviations[:, -1])),
                            satisfied=False)
