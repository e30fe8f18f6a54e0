"""Constructive forward geodesics between simplex points.

A geodesic from p to q of span r = D_f(p,q) moves every coordinate inside
f-space at unit speed, corrected by a mixing value mu(t) in [0,1] that keeps
the coordinates summing to one:

    coordinate_j(t) = f^{-1}( f(p_j) + t + mu(t) * (f(q_j) - f(p_j) - r) )

The mixing value solves sum_j coordinate_j(t) = 1.  Every shift coefficient
f(q_j) - f(p_j) - r is <= 0, so the constraint sum is nonincreasing in the
mixing value and bisection on [0,1] always brackets the root: the sum is >= 1
at 0 and <= 1 at 1.  The inverse is clamp-extended to all of R because the
argument may transiently leave [0,1] away from the root.
"""

from __future__ import annotations

import math

import numpy as np

from .core import GeneratorFunction, ProbVector, make_prob_vector
from .curves import Curve
from .errors import (
    BoundaryPoint,
    BracketFailure,
    DegenerateEndpoints,
    NoConvergence,
    NotC1,
    OutOfDomain,
)
from .quasimetric import quasi_dist

_INTERIOR_MARGIN = 1e-12


def _bisect_iterations(tol: float) -> int:
    if not (tol > 0.0):
        raise OutOfDomain(f"solver tolerance must be positive, got {tol!r}")
    return min(60, max(1, math.ceil(-math.log2(tol))))


def _mu_bisect(gen: GeneratorFunction, fstart: np.ndarray, coeff: np.ndarray,
               ts: np.ndarray, iters: int) -> np.ndarray:
    """Vectorized bisection for the mixing values at the parameters ``ts``.

    ``fstart`` and ``coeff`` have shape (n_coords,); ``ts`` may have any shape.
    """
    lo = np.zeros_like(ts)
    hi = np.ones_like(ts)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        args = fstart + ts[..., None] + mid[..., None] * coeff
        sums = np.asarray(gen.inv(np.clip(args, 0.0, 1.0))).sum(axis=-1)
        go_right = sums > 1.0
        lo = np.where(go_right, mid, lo)
        hi = np.where(go_right, hi, mid)
    return 0.5 * (lo + hi)


class Geodesic:
    """Forward geodesic carrying the endpoints, the span, and the solved mixing map.

    The curve is defined on [0, length] with length = D_f(start, end);
    mu(0) = 0 and mu(length) = 1, and mu is strictly increasing.  Mixing
    values are memoized per exact parameter value, so re-evaluation during
    partition refinement is cheap; concurrent evaluation recomputes the same
    deterministic bisection and is therefore safe.
    """

    def __init__(self, gen: GeneratorFunction, start: ProbVector, end: ProbVector,
                 tol: float = 1e-12):
        self.gen = gen
        self.start = start
        self.end = end
        self.tol = float(tol)
        self.length = quasi_dist(gen, start, end)
        self._iters = _bisect_iterations(self.tol)
        self._fstart = np.asarray(gen.fn(start.coords), dtype=float)
        self._fend = np.asarray(gen.fn(end.coords), dtype=float)
        self._coeff = self._fend - self._fstart - self.length
        self._memo: dict[float, float] = {}

    @property
    def degenerate(self) -> bool:
        return self.length == 0.0

    def _check_param(self, t: float) -> float:
        slack = 1e-12 * max(1.0, self.length)
        if t < -slack or t > self.length + slack:
            raise OutOfDomain(f"parameter {t!r} outside [0, {self.length!r}]")
        return min(max(t, 0.0), self.length)

    def mu(self, t: float) -> float:
        """Mixing value at parameter t, solved by bisection to the stored tolerance."""
        if self.degenerate:
            self._check_param(t)
            return 0.0
        t = self._check_param(t)
        cached = self._memo.get(t)
        if cached is not None:
            return cached
        value = float(_mu_bisect(self.gen, self._fstart, self._coeff,
                                 np.asarray(t, dtype=float), self._iters))
        self._memo[t] = value
        return value

    def mu_many(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        if self.degenerate:
            return np.zeros_like(ts)
        return _mu_bisect(self.gen, self._fstart, self._coeff, ts, self._iters)

    def _coords_at(self, t: float) -> np.ndarray:
        args = self._fstart + t + self.mu(t) * self._coeff
        coords = np.asarray(self.gen.inv(np.clip(args, 0.0, 1.0)), dtype=float)
        total = coords.sum()
        if abs(total - 1.0) > 1e-6:
            raise NoConvergence(
                f"geodesic point misses the simplex by {total - 1.0:.3e} at t={t!r}"
            )
        return coords / total

    def point(self, t: float) -> ProbVector:
        """Point at parameter t; the endpoints are returned exactly."""
        t = self._check_param(t)
        if t == 0.0 or self.degenerate:
            return self.start
        if t == self.length:
            return self.end
        return make_prob_vector(self._coords_at(t))

    def point_many(self, ts) -> np.ndarray:
        """Coordinates at each parameter, one row per entry of ``ts``."""
        ts = np.asarray(ts, dtype=float)
        if self.degenerate:
            return np.tile(self.start.coords, ts.shape + (1,))
        flat = np.clip(ts.reshape(-1), 0.0, self.length)
        mu = self.mu_many(flat)
        args = self._fstart + flat[:, None] + mu[:, None] * self._coeff
        coords = np.asarray(self.gen.inv(np.clip(args, 0.0, 1.0)), dtype=float)
        coords /= coords.sum(axis=1, keepdims=True)
        coords[flat == 0.0] = self.start.coords
        coords[flat == self.length] = self.end.coords
        return coords.reshape(ts.shape + (len(self.start),))

    def mu_prime(self, t: float) -> float:
        """Derivative of the mixing map by implicit differentiation.

        Differentiating the unit-sum constraint gives the ratio of the two
        reciprocal-derivative sums; the shift coefficients are nonpositive,
        so the ratio carries a leading minus sign to come out positive.
        """
        if self.degenerate:
            raise DegenerateEndpoints("mixing map of a point curve has no derivative")
        if not (self.gen.is_c1 and self.gen.deriv is not None):
            raise NotC1(f"generator {self.gen.label()} is not C1")
        t = self._check_param(t)
        coords = self._coords_at(t) if 0.0 < t < self.length else self.point(t).coords
        if coords.min() <= _INTERIOR_MARGIN or coords.max() >= 1.0 - _INTERIOR_MARGIN:
            raise BoundaryPoint(
                f"geodesic touches the simplex boundary at t={t!r}; derivative undefined"
            )
        recip = 1.0 / np.asarray(self.gen.deriv(coords), dtype=float)
        denom = float(np.dot(self._coeff, recip))
        return -float(recip.sum()) / denom

    def velocity(self, t: float) -> np.ndarray:
        """Coordinate velocities at an interior parameter."""
        mp = self.mu_prime(t)
        coords = self.point(t).coords
        return (1.0 + mp * self._coeff) / np.asarray(self.gen.deriv(coords), dtype=float)

    def as_curve(self) -> Curve:
        """Expose the geodesic through the generic curve interface."""
        deriv = None
        smoothness = "C0"
        if (self.gen.is_c1 and self.gen.deriv is not None and not self.degenerate
                and self.start.is_interior() and self.end.is_interior()):
            from .core import TangentVector

            def deriv(t: float, _self=self) -> TangentVector:
                return TangentVector(_self.point(t), _self.velocity(t))

            smoothness = "C1"
        return Curve(
            domain=(0.0, self.length),
            evaluator=self.point,
            derivative=deriv,
            smoothness=smoothness,
        )


def solve_mu(gen: GeneratorFunction, start: ProbVector, end: ProbVector,
             t: float, tol: float = 1e-12) -> float:
    """Solve the unit-sum constraint for the mixing value at parameter t.

    Raises DegenerateEndpoints when start == end (there is no equation to
    solve) and BracketFailure when the bisection bracket is invalid, which
    signals a generator violating its monotone-bijection contract.
    """
    span = quasi_dist(gen, start, end)
    if span <= 0.0:
        raise DegenerateEndpoints("mixing value is undefined for coincident endpoints")
    slack = 1e-12 * max(1.0, span)
    if t < -slack or t > span + slack:
        raise OutOfDomain(f"parameter {t!r} outside [0, {span!r}]")
    t = min(max(t, 0.0), span)
    fstart = np.asarray(gen.fn(start.coords), dtype=float)
    fend = np.asarray(gen.fn(end.coords), dtype=float)
    coeff = fend - fstart - span
    at_zero = float(np.asarray(gen.inv(np.clip(fstart + t, 0.0, 1.0))).sum())
    at_one = float(np.asarray(gen.inv(np.clip(fend + (t - span), 0.0, 1.0))).sum())
    if at_zero < 1.0 - 1e-9 or at_one > 1.0 + 1e-9:
        raise BracketFailure(
            f"mixing bracket invalid (sum {at_zero!r} at 0, {at_one!r} at 1)"
        )
    iters = _bisect_iterations(tol)
    return float(_mu_bisect(gen, fstart, coeff, np.asarray(t, dtype=float), iters))


def make_geodesic(gen: GeneratorFunction, start: ProbVector, end: ProbVector,
                  tol: float = 1e-12) -> Geodesic:
    """Construct the forward geodesic from start to end.

    Coincident endpoints yield a point curve on [0,0] rather than an error,
    so curve-composing callers stay total.
    """
    return Geodesic(gen, start, end, tol=tol)


def mu_derivative(gen: GeneratorFunction, geod: Geodesic, t: float,
                  h: float = 1e-6) -> float:
    """Mixing-map derivative at an interior parameter, cross-checked numerically.

    Returns the implicit-function value and verifies it against a central
    difference of the bisected mixing map with step ``h`` (shrunk near the
    endpoints); a gross mismatch raises NoConvergence.
    """
    if geod.degenerate:
        raise DegenerateEndpoints("mixing map of a point curve has no derivative")
    if not (0.0 < t < geod.length):
        raise OutOfDomain(f"parameter {t!r} is not interior to [0, {geod.length!r}]")
    value = geod.mu_prime(t)
    step = min(h, 0.5 * t, 0.5 * (geod.length - t))
    fd = (geod.mu(t + step) - geod.mu(t - step)) / (2.0 * step)
    if abs(value - fd) > 1e-3 * max(1.0, abs(value)):
        raise NoConvergence(
            f"mixing derivative {value!r} disagrees with central difference {fd!r}"
        )
    return value


class BackwardGeodesic:
    """Backward geodesic: D(point(t), point(s)) = t - s for s <= t.

    Realized as the forward geodesic from end to start traversed in reverse;
    the span is D_f(end, start).
    """

    def __init__(self, gen: GeneratorFunction, start: ProbVector, end: ProbVector,
                 tol: float = 1e-12):
        self.gen = gen
        self.start = start
        self.end = end
        self._fwd = Geodesic(gen, end, start, tol=tol)
        self.length = self._fwd.length
        self.tol = tol

    @property
    def degenerate(self) -> bool:
        return self._fwd.degenerate

    def mu(self, t: float) -> float:
        if self.degenerate:
            return 0.0
        return 1.0 - self._fwd.mu(self.length - t)

    def point(self, t: float) -> ProbVector:
        return self._fwd.point(self.length - t)

    def point_many(self, ts) -> np.ndarray:
        return self._fwd.point_many(self.length - np.asarray(ts, dtype=float))

    def as_curve(self) -> Curve:
        return Curve(domain=(0.0, self.length), evaluator=self.point, smoothness="C0")


def backward_geodesic(gen: GeneratorFunction, start: ProbVector, end: ProbVector,
                      tol: float = 1e-12) -> BackwardGeodesic:
    """Construct the backward geodesic from start to end (point curve if equal)."""
    return BackwardGeodesic(gen, start, end, tol=tol)


def geodesic_grid_batch(gen: GeneratorFunction, starts: np.ndarray, ends: np.ndarray,
                        grid_size: int, tol: float = 1e-12
                        ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Solve many geodesics at once on proportional parameter grids.

    ``starts`` and ``ends`` are coordinate rows of shape (m, n_coords) with
    pairwise-distinct endpoints.  Returns ``(spans, ts, mus, coords)`` where
    ``spans`` has shape (m,), ``ts`` and ``mus`` shape (m, grid_size), and
    ``coords`` shape (m, grid_size, n_coords); the endpoint rows of ``coords``
    are the inputs exactly.  Same bisection kernel as :class:`Geodesic`.
    """
    starts = np.asarray(starts, dtype=float)
    ends = np.asarray(ends, dtype=float)
    fstart = np.asarray(gen.fn(starts), dtype=float)
    fend = np.asarray(gen.fn(ends), dtype=float)
    spans = np.max(fend - fstart, axis=1)
    if np.any(spans <= 0.0):
        raise DegenerateEndpoints("batch geodesics require distinct endpoint pairs")
    fractions = np.linspace(0.0, 1.0, grid_size)
    ts = spans[:, None] * fractions
    coeff = (fend - fstart - spans[:, None])[:, None, :]
    iters = _bisect_iterations(tol)
    mus = _mu_bisect(gen, fstart[:, None, :], coeff, ts, iters)
    args = fstart[:, None, :] + ts[..., None] + mus[..., None] * coeff
    coords = np.asarray(gen.inv(np.clip(args, 0.0, 1.0)), dtype=float)
    coords /= coords.sum(axis=2, keepdims=True)
    coords[:, 0, :] = starts
    coords[:, -1, :] = ends
    return spans, ts, mus, coords
