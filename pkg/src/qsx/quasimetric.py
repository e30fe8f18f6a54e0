"""The max-type quasimetric, its symmetrizations, and explicit ball geometry.

The asymmetric distance from ``p`` to ``q`` is ``max_i (f(q_i) - f(p_i))`` for
a generator function f.  Forward balls collect the points within distance r
*from* the center, backward balls the points within distance r *to* it; both
are intersections of the simplex with an axis-aligned orthant whose vertex is
obtained by shifting the center coordinatewise in f-space.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np

from .core import GeneratorFunction, ProbVector, chebyshev, generator, _check_same_dim
from .errors import InvalidExponent, InvalidParameter, UnsupportedDimension

Direction = Literal["forward", "backward"]

_IDENTITY = generator("identity")


def quasi_dist(gen: GeneratorFunction, p: ProbVector, q: ProbVector) -> float:
    """Asymmetric distance from p to q: max_i (f(q_i) - f(p_i))."""
    _check_same_dim(p, q)
    return float(np.max(gen.fn(q.coords) - gen.fn(p.coords)))


def quasi_dist_argmax(gen: GeneratorFunction, p: ProbVector, q: ProbVector) -> tuple[float, int]:
    """Distance together with the maximizing coordinate (lowest index on ties)."""
    _check_same_dim(p, q)
    diffs = gen.fn(q.coords) - gen.fn(p.coords)
    idx = int(np.argmax(diffs))
    return float(diffs[idx]), idx


def symmetrize_max(gen: GeneratorFunction, p: ProbVector, q: ProbVector) -> float:
    """Metric obtained as the larger of the two one-way distances."""
    return max(quasi_dist(gen, p, q), quasi_dist(gen, q, p))


def symmetrize_power(gen: GeneratorFunction, p: ProbVector, q: ProbVector, r_exp: float) -> float:
    """Metric (D(p,q)^r + D(q,p)^r)^(1/r) for exponent r >= 1."""
    if not (r_exp >= 1.0):
        raise InvalidExponent(f"symmetrization exponent must be >= 1, got {r_exp!r}")
    fwd = quasi_dist(gen, p, q)
    bwd = quasi_dist(gen, q, p)
    if fwd == 0.0 and bwd == 0.0:
        return 0.0
    # factor out the larger term to avoid overflow/underflow at large exponents
    big, small = (fwd, bwd) if fwd >= bwd else (bwd, fwd)
    return float(big * (1.0 + (small / big) ** r_exp) ** (1.0 / r_exp))


# ---------------------------------------------------------------------------
# Balls
# ---------------------------------------------------------------------------

def ball_coordinate_bounds(
    gen: GeneratorFunction, center: ProbVector, radius: float
) -> tuple[np.ndarray, np.ndarray]:
    """Coordinatewise ball bounds: the shifted-and-clamped preimages.

    Returns the pair (upper, lower) where ``upper[i] = f^{-1}(min(f(p_i)+r, 1))``
    bounds the forward ball and ``lower[i] = f^{-1}(max(f(p_i)-r, 0))`` bounds
    the backward ball.
    """
    if not (radius > 0.0):
        raise InvalidParameter(f"ball radius must be positive, got {radius!r}")
    fvals = gen.fn(center.coords)
    upper = np.asarray(gen.inv(np.minimum(fvals + radius, 1.0)), dtype=float)
    lower = np.asarray(gen.inv(np.maximum(fvals - radius, 0.0)), dtype=float)
    return upper, lower


@dataclass(frozen=True, eq=False)
class BallSpec:
    """A quasimetric ball: center, radius, orientation, and open/closed flag."""

    center: ProbVector
    radius: float
    direction: Direction = "forward"
    closed: bool = False

    def __post_init__(self):
        if not (self.radius > 0.0):
            raise InvalidParameter(f"ball radius must be positive, got {self.radius!r}")
        if self.direction not in ("forward", "backward"):
            raise InvalidParameter(f"direction must be forward or backward, got {self.direction!r}")


def ball_contains(spec: BallSpec, gen: GeneratorFunction, q: ProbVector) -> bool:
    """Membership via the coordinatewise characterization.

    A coordinate whose shifted bound saturates (f(p_i) + r beyond 1, or
    f(p_i) - r below 0) imposes no constraint: the corresponding inequality
    holds for every admissible coordinate value, even though the clamped bound
    itself would exclude the simplex boundary.
    """
    _check_same_dim(spec.center, q)
    fvals = np.asarray(gen.fn(spec.center.coords), dtype=float)
    qc = q.coords
    if spec.direction == "forward":
        caps = fvals + spec.radius
        bounds = np.asarray(gen.inv(np.minimum(caps, 1.0)), dtype=float)
        if spec.closed:
            active = caps < 1.0
            ok = qc <= bounds
        else:
            active = caps <= 1.0
            ok = qc < bounds
    else:
        floors = fvals - spec.radius
        bounds = np.asarray(gen.inv(np.maximum(floors, 0.0)), dtype=float)
        if spec.closed:
            active = floors > 0.0
            ok = qc >= bounds
        else:
            active = floors >= 0.0
            ok = qc > bounds
    return bool(np.all(ok | ~active))


def ball_contains_by_distance(spec: BallSpec, gen: GeneratorFunction, q: ProbVector) -> bool:
    """Membership via the distance predicate; the oracle for ``ball_contains``."""
    if spec.direction == "forward":
        d = quasi_dist(gen, spec.center, q)
    else:
        d = quasi_dist(gen, q, spec.center)
    return d <= spec.radius if spec.closed else d < spec.radius


@dataclass(frozen=True, eq=False)
class BallGeometry:
    """Shifted orthant vertex and the corner points of the bounding sub-simplex.

    ``shifted_vertex`` is the coordinatewise-shifted center (generally *off*
    the simplex plane); ``corners[i]`` moves it back onto the plane along the
    i-th axis, so each corner differs from the vertex in exactly one
    coordinate and all corners satisfy sum = 1.
    """

    shifted_vertex: np.ndarray
    corners: np.ndarray  # shape (n_coords, n_coords)


def ball_geometry(
    gen: GeneratorFunction, center: ProbVector, radius: float, direction: Direction
) -> BallGeometry:
    if direction not in ("forward", "backward"):
        raise InvalidParameter(f"direction must be forward or backward, got {direction!r}")
    upper, lower = ball_coordinate_bounds(gen, center, radius)
    vertex = upper if direction == "forward" else lower
    slack = 1.0 - float(vertex.sum())
    corners = np.tile(vertex, (vertex.size, 1)) + slack * np.eye(vertex.size)
    v = vertex.copy()
    v.flags.writeable = False
    corners.flags.writeable = False
    return BallGeometry(shifted_vertex=v, corners=corners)


def _clip_polygon(poly: list[np.ndarray], axis: int, bound: float, keep_leq: bool) -> list[np.ndarray]:
    # Sutherland-Hodgman against x[axis] <= bound (or >= bound); intersection
    # points are affine combinations, so clipping stays on the plane sum = 1.
    out: list[np.ndarray] = []
    m = len(poly)
    for k in range(m):
        cur, nxt = poly[k], poly[(k + 1) % m]
        c = cur[axis] - bound
        n = nxt[axis] - bound
        cin = c <= 1e-15 if keep_leq else c >= -1e-15
        nin = n <= 1e-15 if keep_leq else n >= -1e-15
        if cin:
            out.append(cur)
        if cin != nin and abs(n - c) > 0.0:
            w = c / (c - n)
            out.append(cur + w * (nxt - cur))
    return out


def ball_boundary_polyline(
    gen: GeneratorFunction, center: ProbVector, radius: float, direction: Direction
) -> np.ndarray:
    """Closed boundary polyline of a ball in the 2-simplex (for plotting).

    Starts from the full triangle and clips by the coordinatewise cap planes,
    so the result is the boundary of the ball's closure inside the simplex.
    Returns an array of ambient 3-coordinate rows with first row repeated last.
    """
    if center.dim != 2:
        raise UnsupportedDimension("ball boundary polylines are only available on the 2-simplex")
    upper, lower = ball_coordinate_bounds(gen, center, radius)
    poly = [np.eye(3)[i] for i in range(3)]
    for axis in range(3):
        if direction == "forward":
            poly = _clip_polygon(poly, axis, float(upper[axis]), keep_leq=True)
        else:
            poly = _clip_polygon(poly, axis, float(lower[axis]), keep_leq=False)
        if not poly:
            return np.empty((0, 3))
    cleaned: list[np.ndarray] = []
    for pt in poly:
        if not cleaned or np.max(np.abs(pt - cleaned[-1])) > 1e-12:
            cleaned.append(pt)
    if len(cleaned) > 1 and np.max(np.abs(cleaned[0] - cleaned[-1])) <= 1e-12:
        cleaned.pop()
    cleaned.append(cleaned[0])
    return np.asarray(cleaned)


class BoundsCheck(NamedTuple):
    lower_ok: bool
    upper_ok: bool
    lower_gap: float
    upper_gap: float


def chebyshev_bounds_check(p: ProbVector, q: ProbVector) -> BoundsCheck:
    """Identity-generator comparison against the Chebyshev distance.

    Checks (1/N) d_inf <= D_id <= d_inf with slack 1e-12 and reports the raw
    gaps, so callers can detect the saturation case (lower gap 0 exactly when
    q is the barycenter and p a vertex).
    """
    _check_same_dim(p, q)
    d_inf = chebyshev(p, q)
    d_id = quasi_dist(_IDENTITY, p, q)
    lower_gap = d_id - d_inf / p.dim
    upper_gap = d_inf - d_id
    return BoundsCheck(
        lower_ok=bool(lower_gap >= -1e-12),
        upper_ok=bool(upper_gap >= -1e-12),
        lower_gap=float(lower_gap),
        upper_gap=float(upper_gap),
    )
