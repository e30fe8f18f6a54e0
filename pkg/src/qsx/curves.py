"""Curves into the simplex: lengths, reparametrization, geodesic predicates.

The forward length of a curve is the limit of sums of one-way distances over
successively finer partitions; the triangle inequality makes those sums
nondecreasing under refinement, so dyadic refinement with a successive-sum
stopping rule converges from below.  The backward length flips the distance
arguments.  Geodesics are curves whose pairwise distances equal parameter
gaps; pregeodesics become geodesics after reparametrization by length.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal, NamedTuple

import numpy as np

from .core import GeneratorFunction, ProbVector, TangentVector, make_prob_vector
from .errors import (
    EndpointMismatch,
    InvalidParameter,
    NoConvergence,
    NotMonotone,
    NotRectifiable,
    OutOfDomain,
    PartitionMismatch,
    ProfileNotInvertible,
)
from .quasimetric import quasi_dist

Smoothness = Literal["C0", "piecewise-C1", "C1"]
Direction = Literal["forward", "backward"]

MAX_KNOTS = 1 << 20


@dataclass(frozen=True, eq=False)
class Curve:
    """Parametric path into the simplex over a closed parameter interval.

    ``evaluator`` must be pure (safe for re-entrant evaluation at arbitrary
    parameters); ``derivative``, when supplied, returns the tangent vector at
    interior parameters away from ``breakpoints``.
    """

    domain: tuple[float, float]
    evaluator: Callable[[float], ProbVector]
    derivative: Callable[[float], TangentVector] | None = None
    smoothness: Smoothness = "C0"
    breakpoints: tuple[float, ...] = ()

    def __post_init__(self):
        a, b = self.domain
        if not (a <= b):
            raise InvalidParameter(f"curve domain {self.domain!r} is reversed")
        object.__setattr__(self, "domain", (float(a), float(b)))
        bps = tuple(sorted(float(t) for t in self.breakpoints if a < t < b))
        object.__setattr__(self, "breakpoints", bps)
        # probe the endpoints: they must be valid simplex points
        for t in (a, b):
            pt = self.evaluator(t)
            if not isinstance(pt, ProbVector):
                raise InvalidParameter("curve evaluator must return ProbVector values")

    def __call__(self, t: float) -> ProbVector:
        a, b = self.domain
        slack = 1e-12 * max(1.0, abs(b - a))
        if t < a - slack or t > b + slack:
            raise OutOfDomain(f"parameter {t!r} outside [{a!r}, {b!r}]")
        return self.evaluator(min(max(t, a), b))

    def velocity(self, t: float, h: float | None = None) -> TangentVector:
        """Tangent at t: the supplied derivative, else a finite difference.

        The difference window never crosses a breakpoint or the domain edge
        (one-sided there), matching the curve's piecewise-C1 reading.
        """
        a, b = self.domain
        if self.derivative is not None:
            return self.derivative(t)
        if h is None:
            h = 1e-6 * max(b - a, 1e-9)
        walls = [a, b, *self.breakpoints]
        eps = 1e-12 * max(1.0, b - a)
        lo = max(t - h, max((w for w in walls if w < t - eps), default=a))
        hi = min(t + h, min((w for w in walls if w > t + eps), default=b))
        if any(abs(w - t) <= eps for w in walls):
            # exactly on a wall: difference one-sidedly into the adjacent piece
            if t >= b - eps:
                hi = b
            else:
                lo = t
        if hi - lo <= 0.0:
            raise InvalidParameter(f"cannot difference a zero-width window at t={t!r}")
        comps = (self(hi).coords - self(lo).coords) / (hi - lo)
        return TangentVector(self(t), comps)

    def pieces(self) -> tuple[tuple[float, float], ...]:
        """C1 pieces of the domain as cut by the breakpoints."""
        cuts = [self.domain[0], *self.breakpoints, self.domain[1]]
        return tuple((cuts[i], cuts[i + 1]) for i in range(len(cuts) - 1))


def constant_curve(point: ProbVector, domain: tuple[float, float] = (0.0, 0.0)) -> Curve:
    return Curve(
        domain=domain,
        evaluator=lambda t: point,
        derivative=lambda t: TangentVector(point, np.zeros(len(point))),
        smoothness="C1",
    )


def segment(start: ProbVector, end: ProbVector, domain: tuple[float, float] = (0.0, 1.0)) -> Curve:
    """Affine segment from start to end over the given parameter interval."""
    if len(start) != len(end):
        raise EndpointMismatch("segment endpoints have different coordinate counts")
    a, b = domain
    if not (b > a):
        raise InvalidParameter("segment needs a nondegenerate parameter interval")
    delta = end.coords - start.coords
    rate = delta / (b - a)

    def at(t: float) -> ProbVector:
        s = (t - a) / (b - a)
        return make_prob_vector(start.coords + s * delta)

    return Curve(
        domain=domain,
        evaluator=at,
        derivative=lambda t: TangentVector(at(t), rate),
        smoothness="C1",
    )


def polyline(times, points) -> Curve:
    """Piecewise-affine curve through ``points`` at the given parameter values."""
    ts = np.asarray(times, dtype=float)
    pts = [p if isinstance(p, ProbVector) else make_prob_vector(p) for p in points]
    if ts.ndim != 1 or ts.size != len(pts) or ts.size < 2:
        raise InvalidParameter("polyline needs matching times and points, at least two")
    if np.any(np.diff(ts) <= 0.0):
        raise InvalidParameter("polyline times must be strictly increasing")
    coords = np.stack([p.coords for p in pts])

    def at(t: float) -> ProbVector:
        k = int(np.searchsorted(ts, t, side="right")) - 1
        k = min(max(k, 0), ts.size - 2)
        w = (t - ts[k]) / (ts[k + 1] - ts[k])
        w = min(max(w, 0.0), 1.0)
        return make_prob_vector((1.0 - w) * coords[k] + w * coords[k + 1])

    def deriv(t: float) -> TangentVector:
        k = int(np.searchsorted(ts, t, side="right")) - 1
        k = min(max(k, 0), ts.size - 2)
        rate = (coords[k + 1] - coords[k]) / (ts[k + 1] - ts[k])
        return TangentVector(at(t), rate)

    return Curve(
        domain=(float(ts[0]), float(ts[-1])),
        evaluator=at,
        derivative=deriv,
        smoothness="piecewise-C1" if ts.size > 2 else "C1",
        breakpoints=tuple(ts[1:-1]),
    )


@dataclass(frozen=True, eq=False)
class Partition:
    """Strictly increasing knots spanning a curve domain."""

    knots: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.knots, dtype=float)
        if arr.ndim != 1 or arr.size < 2:
            raise InvalidParameter("a partition needs at least two knots")
        if np.any(np.diff(arr) <= 0.0):
            raise InvalidParameter("partition knots must be strictly increasing")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "knots", arr)

    @property
    def modulus(self) -> float:
        return float(np.max(np.diff(self.knots)))

    @classmethod
    def uniform(cls, domain: tuple[float, float], n: int,
                breakpoints: tuple[float, ...] = ()) -> "Partition":
        a, b = domain
        knots = np.union1d(np.linspace(a, b, n + 1), np.asarray(breakpoints, dtype=float))
        return cls(knots)

    def refined(self) -> "Partition":
        """Insert the midpoint of every interval."""
        k = self.knots
        mids = 0.5 * (k[:-1] + k[1:])
        return Partition(np.sort(np.concatenate([k, mids])))


def _segment_sums(fvals: np.ndarray, direction: Direction) -> np.ndarray:
    diffs = fvals[1:] - fvals[:-1]
    if direction == "backward":
        diffs = -diffs
    return np.max(diffs, axis=1)


def partition_sum(gen: GeneratorFunction, curve: Curve, partition: Partition,
                  direction: Direction = "forward") -> float:
    """Sum of one-way distances along consecutive partition knots."""
    a, b = curve.domain
    k = partition.knots
    if abs(k[0] - a) > 1e-12 or abs(k[-1] - b) > 1e-12:
        raise PartitionMismatch(
            f"partition spans [{k[0]!r}, {k[-1]!r}] but the curve domain is [{a!r}, {b!r}]"
        )
    fvals = np.stack([np.asarray(gen.fn(curve(t).coords), dtype=float) for t in k])
    return float(np.sum(_segment_sums(fvals, direction)))


class LengthResult(NamedTuple):
    value: float
    knots: int
    level: int


#: levels whose cumulative gain must stay below tolerance before stopping.
#: Sums can plateau *exactly* across a level when every inserted knot keeps
#: the per-interval maximizing coordinate unchanged, so a single small
#: successive difference is not evidence of convergence.
_STOP_WINDOW = 3
_MIN_LEVEL = 5


def _refined_length(gen: GeneratorFunction, curve: Curve, tol: float,
                    direction: Direction, max_knots: int,
                    want_profile: bool) -> tuple[LengthResult, np.ndarray, np.ndarray]:
    if not (tol > 0.0):
        raise InvalidParameter(f"length tolerance must be positive, got {tol!r}")
    a, b = curve.domain
    if b <= a:
        empty = np.asarray([a]), np.asarray([0.0])
        return LengthResult(0.0, 1, 0), *empty
    knots = np.union1d(np.asarray([a, b]), np.asarray(curve.breakpoints, dtype=float))
    cache: dict[float, np.ndarray] = {}

    def fval(t: float) -> np.ndarray:
        got = cache.get(t)
        if got is None:
            got = np.asarray(gen.fn(curve(t).coords), dtype=float)
            cache[t] = got
        return got

    history: list[float] = []
    level = 0
    while True:
        fvals = np.stack([fval(t) for t in knots])
        seg = _segment_sums(fvals, direction)
        total = float(seg.sum())
        history.append(total)
        settled = (level >= _MIN_LEVEL and len(history) > _STOP_WINDOW
                   and total - history[-1 - _STOP_WINDOW] < tol)
        if settled:
            profile = np.concatenate([[0.0], np.cumsum(seg)]) if want_profile else np.empty(0)
            return LengthResult(total, knots.size, level), knots, profile
        if 2 * knots.size - 1 > max_knots:
            raise NoConvergence(
                f"length refinement did not settle within {max_knots} knots "
                f"(last sums {history[-2] if len(history) > 1 else None!r} -> {total!r})"
            )
        mids = 0.5 * (knots[:-1] + knots[1:])
        knots = np.sort(np.concatenate([knots, mids]))
        level += 1


def length_details(gen: GeneratorFunction, curve: Curve, tol: float,
                   direction: Direction = "forward",
                   max_knots: int = MAX_KNOTS) -> LengthResult:
    result, _, _ = _refined_length(gen, curve, tol, direction, max_knots, want_profile=False)
    return result


def forward_length(gen: GeneratorFunction, curve: Curve, tol: float,
                   max_knots: int = MAX_KNOTS) -> float:
    """Forward length by dyadic partition refinement (stops when successive
    refinements change the sum by less than ``tol``)."""
    return length_details(gen, curve, tol, "forward", max_knots).value


def backward_length(gen: GeneratorFunction, curve: Curve, tol: float,
                    max_knots: int = MAX_KNOTS) -> float:
    """Backward length: forward refinement with flipped distance arguments."""
    return length_details(gen, curve, tol, "backward", max_knots).value


def concat(first: Curve, second: Curve) -> Curve:
    """Concatenation; the junction becomes a breakpoint and lengths add."""
    a1, b1 = first.domain
    a2, b2 = second.domain
    end_first = first(b1)
    start_second = second(a2)
    if not end_first.allclose(start_second, tol=1e-12):
        raise EndpointMismatch("curves do not share the junction point")
    shift = b1 - a2

    def at(t: float) -> ProbVector:
        return first(t) if t <= b1 else second(t - shift)

    deriv = None
    if first.derivative is not None and second.derivative is not None:
        def deriv(t: float) -> TangentVector:
            return first.derivative(t) if t <= b1 else second.derivative(t - shift)

    smooth: Smoothness = "C0"
    if first.smoothness != "C0" and second.smoothness != "C0":
        smooth = "piecewise-C1"
    bps = tuple(first.breakpoints) + (b1,) + tuple(t + shift for t in second.breakpoints)
    return Curve(domain=(a1, b1 + (b2 - a2)), evaluator=at, derivative=deriv,
                 smoothness=smooth, breakpoints=bps)


def reverse(curve: Curve) -> Curve:
    """Orientation reversal; forward and backward lengths swap."""
    a, b = curve.domain

    def at(t: float) -> ProbVector:
        return curve(a + b - t)

    deriv = None
    if curve.derivative is not None:
        def deriv(t: float) -> TangentVector:
            tv = curve.derivative(a + b - t)
            return TangentVector(tv.base, -tv.components)

    return Curve(domain=(a, b), evaluator=at, derivative=deriv,
                 smoothness=curve.smoothness,
                 breakpoints=tuple(a + b - t for t in curve.breakpoints))


def reparametrize(curve: Curve, rho: Callable[[float], float],
                  domain: tuple[float, float],
                  samples: int = 65) -> Curve:
    """Compose with a monotone surjection of ``domain`` onto the curve domain.

    Breakpoints of the original curve are pulled back through the map (by
    bisection, using its sampled direction) so refinement keeps kinks pinned.
    """
    a, b = curve.domain
    lo, hi = domain
    if not (hi > lo):
        raise InvalidParameter("reparametrization domain must be nondegenerate")
    grid = np.linspace(lo, hi, samples)
    vals = np.asarray([rho(t) for t in grid], dtype=float)
    diffs = np.diff(vals)
    if not (np.all(diffs >= -1e-12) or np.all(diffs <= 1e-12)):
        raise NotMonotone("sampled reparametrization map changes direction")
    increasing = vals[-1] >= vals[0]
    endpoints = sorted((vals[0], vals[-1]))
    if abs(endpoints[0] - a) > 1e-9 or abs(endpoints[1] - b) > 1e-9:
        raise InvalidParameter(
            f"reparametrization maps onto [{endpoints[0]!r}, {endpoints[1]!r}], "
            f"expected [{a!r}, {b!r}]"
        )

    def pull_back(target: float) -> float:
        wlo, whi = lo, hi
        for _ in range(60):
            mid = 0.5 * (wlo + whi)
            if (rho(mid) < target) == increasing:
                wlo = mid
            else:
                whi = mid
        return 0.5 * (wlo + whi)

    bps = tuple(pull_back(t) for t in curve.breakpoints)

    def at(t: float) -> ProbVector:
        return curve(min(max(rho(t), a), b))

    return Curve(domain=domain, evaluator=at, smoothness="C0", breakpoints=bps)


def restrict(curve: Curve, s: float, t: float) -> Curve:
    """Restriction of the curve to the subinterval [s, t]."""
    a, b = curve.domain
    if not (a - 1e-12 <= s <= t <= b + 1e-12):
        raise OutOfDomain(f"restriction [{s!r}, {t!r}] leaves the domain [{a!r}, {b!r}]")
    s, t = max(s, a), min(t, b)
    bps = tuple(u for u in curve.breakpoints if s < u < t)
    return Curve(domain=(s, t), evaluator=curve.evaluator,
                 derivative=curve.derivative, smoothness=curve.smoothness,
                 breakpoints=bps)


def length_profile(gen: GeneratorFunction, curve: Curve, t: float, tol: float) -> float:
    """Forward length of the restriction to [a, t]."""
    a, b = curve.domain
    if not (a - 1e-12 <= t <= b + 1e-12):
        raise OutOfDomain(f"profile parameter {t!r} outside [{a!r}, {b!r}]")
    t = min(max(t, a), b)
    if t <= a:
        return 0.0
    return forward_length(gen, restrict(curve, a, t), tol)


def _invert_monotone(fn: Callable[[float], float], target: float,
                     lo: float, hi: float, iters: int = 60) -> float:
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if fn(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def reparametrize_by_flength(gen: GeneratorFunction, curve: Curve, tol: float) -> Curve:
    """Reindex a curve by forward length, making pregeodesics geodesics.

    For pregeodesics (forward length equal to the endpoint distance) the
    length profile is the distance from the start point, which is cheap and
    exact; otherwise the profile is taken from the converged refinement table.
    Profiles that stay flat over a parameter interval beyond tolerance are
    rejected as non-invertible.  Zero-length curves collapse to a point curve
    on [0, 0].
    """
    a, b = curve.domain
    try:
        total, knots, cum = _refined_length(gen, curve, tol, "forward", MAX_KNOTS, True)
    except NoConvergence as exc:
        raise NotRectifiable(f"curve has no convergent forward length: {exc}") from exc
    length = total.value
    start = curve(a)
    if length <= tol:
        return constant_curve(start, domain=(0.0, 0.0))

    span_dist = quasi_dist(gen, start, curve(b))
    memo: dict[float, float] = {}
    new_breakpoints: tuple[float, ...] = ()

    if abs(length - span_dist) <= tol:
        # pregeodesic: profile(t) = distance from the start point
        def profile(t: float) -> float:
            return quasi_dist(gen, start, curve(t))

        new_breakpoints = tuple(profile(bp) for bp in curve.breakpoints)

        grid = np.linspace(a, b, 65)
        vals = np.asarray([profile(t) for t in grid])
        if np.any(np.diff(vals) < -1e-12):
            raise ProfileNotInvertible("distance profile decreases along the curve")
        flat = np.diff(vals) <= tol / 10.0
        run = 0
        for is_flat in flat:
            run = run + 1 if is_flat else 0
            if run >= 2:
                raise ProfileNotInvertible(
                    "distance profile is flat over a parameter interval beyond tolerance"
                )
        target_total = span_dist

        def rho(s: float) -> float:
            got = memo.get(s)
            if got is None:
                got = _invert_monotone(profile, s, a, b)
                memo[s] = got
            return got
    else:
        # general curve: invert the cumulative refinement table
        keep = np.concatenate([[True], np.diff(cum) > 0.0])
        tk, ck = knots[keep], cum[keep]
        modulus = float(np.max(np.diff(knots)))
        if _flat_spans(knots, cum, tol / 10.0) > 2.0 * modulus + 1e-15:
            raise ProfileNotInvertible(
                "length profile is flat over a parameter interval beyond tolerance"
            )
        target_total = float(ck[-1])
        new_breakpoints = tuple(float(np.interp(bp, knots, cum))
                                for bp in curve.breakpoints)

        def rho(s: float) -> float:
            return float(np.interp(s, ck, tk))

    def at(s: float) -> ProbVector:
        return curve(rho(min(max(s, 0.0), target_total)))

    return Curve(domain=(0.0, target_total), evaluator=at, smoothness="C0",
                 breakpoints=new_breakpoints)


def _flat_spans(knots: np.ndarray, cum: np.ndarray, eps: float) -> float:
    """Longest parameter span over which the cumulative profile gains <= eps."""
    worst = 0.0
    j = 0
    for i in range(knots.size):
        if j < i:
            j = i
        while j + 1 < knots.size and cum[j + 1] - cum[i] <= eps:
            j += 1
        worst = max(worst, knots[j] - knots[i])
    return worst


class GeodesicCheck(NamedTuple):
    ok: bool
    defect: float


def is_f_geodesic(gen: GeneratorFunction, curve: Curve, grid_size: int = 33,
                  tol: float = 1e-8) -> GeodesicCheck:
    """Grid test of the geodesic identity D(curve(s), curve(t)) = t - s.

    Returns the pass flag together with the worst defect over all grid pairs.
    A zero-width domain passes vacuously.
    """
    if grid_size < 2:
        raise InvalidParameter("geodesic check needs a grid of at least 2 points")
    a, b = curve.domain
    if b <= a:
        return GeodesicCheck(True, 0.0)
    grid = np.linspace(a, b, grid_size)
    fvals = np.stack([np.asarray(gen.fn(curve(t).coords), dtype=float) for t in grid])
    pair_dist = np.max(fvals[None, :, :] - fvals[:, None, :], axis=2)
    gaps = grid[None, :] - grid[:, None]
    upper = gaps > 0.0
    defect = float(np.max(np.abs(pair_dist - gaps)[upper])) if upper.any() else 0.0
    return GeodesicCheck(bool(defect <= tol), defect)


def is_f_pregeodesic(gen: GeneratorFunction, curve: Curve, tol: float) -> bool:
    """True when the forward length collapses to the endpoint distance."""
    a, b = curve.domain
    span = quasi_dist(gen, curve(a), curve(b))
    length = forward_length(gen, curve, tol / 4.0)
    return bool(length <= span + tol)
