"""Foundational types: simplex points, tangent vectors, generator functions.

A point of the N-dimensional probability simplex is stored as N+1 nonnegative
coordinates summing to one.  A *generator function* is a continuous strictly
increasing bijection of [0,1] onto itself; it drives the asymmetric distance
``max_i (f(q_i) - f(p_i))`` implemented in :mod:`qsx.quasimetric`.  This module
also provides the two symmetric reference distances (Chebyshev and Euclidean)
and the built-in generator families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidParameter,
    NegativeCoordinate,
    NotC1,
    NotTangent,
    SumNotOne,
    UnknownGenerator,
)

#: largest tolerated deviation of a coordinate sum from 1 at construction;
#: smaller deviations are renormalized away, larger ones are errors.
SUM_TOLERANCE = 1e-9

#: tolerated deviation of tangent components from summing to zero.
TANGENT_TOLERANCE = 1e-9


def _as_vector(values) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    if arr.ndim != 1:
        raise InvalidParameter(f"expected a flat sequence of reals, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class ProbVector:
    """Point of the simplex: N+1 probabilities summing to 1 (N >= 1).

    Coordinates within ``SUM_TOLERANCE`` of unit total are renormalized at
    construction so downstream floating-point drift does not accumulate;
    larger deviations raise :class:`SumNotOne`.
    """

    coords: np.ndarray

    def __post_init__(self):
        arr = _as_vector(self.coords)
        if arr.size < 2:
            raise InvalidParameter("a simplex point needs at least two coordinates")
        if not np.all(np.isfinite(arr)):
            raise InvalidParameter("coordinates must be finite")
        if np.any(arr < 0.0):
            raise NegativeCoordinate(f"negative coordinate in {arr.tolist()}")
        total = float(arr.sum())
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise SumNotOne(f"coordinates sum to {total!r}, not 1")
        arr /= total
        arr.flags.writeable = False
        object.__setattr__(self, "coords", arr)

    @property
    def dim(self) -> int:
        """Simplex dimension N (the ambient space has N+1 coordinates)."""
        return self.coords.size - 1

    def __len__(self) -> int:
        return self.coords.size

    def __getitem__(self, i: int) -> float:
        return float(self.coords[i])

    def allclose(self, other: "ProbVector", tol: float = 1e-12) -> bool:
        return self.coords.size == other.coords.size and bool(
            np.max(np.abs(self.coords - other.coords)) <= tol
        )

    def is_interior(self, margin: float = 1e-12) -> bool:
        """True when every coordinate lies strictly inside (margin, 1 - margin)."""
        return bool(self.coords.min() > margin and self.coords.max() < 1.0 - margin)

    def to_json(self) -> dict:
        return {"coords": self.coords.tolist()}


def make_prob_vector(values) -> ProbVector:
    """Validate a sequence of reals as a simplex point."""
    return ProbVector(_as_vector(values))


def uniform_point(dim: int) -> ProbVector:
    """Barycenter of the dim-dimensional simplex."""
    return ProbVector(np.full(dim + 1, 1.0 / (dim + 1)))


def vertex(dim: int, index: int) -> ProbVector:
    coords = np.zeros(dim + 1)
    coords[index] = 1.0
    return ProbVector(coords)


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Velocity vector at a simplex point; components sum to zero.

    Components whose sum deviates by at most ``TANGENT_TOLERANCE`` are
    recentred (the mean is subtracted); larger deviations raise
    :class:`NotTangent`.
    """

    base: ProbVector
    components: np.ndarray

    def __post_init__(self):
        comps = _as_vector(self.components)
        if comps.size != len(self.base):
            raise DimensionMismatch(
                f"{comps.size} components for a base point with {len(self.base)} coordinates"
            )
        total = float(comps.sum())
        if abs(total) > TANGENT_TOLERANCE:
            raise NotTangent(f"components sum to {total!r}, not 0")
        comps -= total / comps.size
        comps.flags.writeable = False
        object.__setattr__(self, "components", comps)

    @property
    def dim(self) -> int:
        return self.base.dim

    def __len__(self) -> int:
        return self.components.size

    def scaled(self, factor: float) -> "TangentVector":
        return TangentVector(self.base, self.components * factor)


def tangent(base: ProbVector, components) -> TangentVector:
    """Validate components as a tangent vector at ``base``."""
    return TangentVector(base, _as_vector(components))


# ---------------------------------------------------------------------------
# Symmetric reference distances
# ---------------------------------------------------------------------------

def _check_same_dim(p: ProbVector, q: ProbVector) -> None:
    if len(p) != len(q):
        raise DimensionMismatch(f"points have {len(p)} and {len(q)} coordinates")


def chebyshev(p: ProbVector, q: ProbVector) -> float:
    """Worst-case coordinate difference max_i |q_i - p_i|."""
    _check_same_dim(p, q)
    return float(np.max(np.abs(q.coords - p.coords)))


def euclidean(p: ProbVector, q: ProbVector) -> float:
    """Standard Euclidean distance of the ambient coordinates."""
    _check_same_dim(p, q)
    return float(np.linalg.norm(q.coords - p.coords))


# ---------------------------------------------------------------------------
# Generator functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GeneratorFunction:
    """Strictly increasing bijection of [0,1] onto itself, with capabilities.

    ``fn``/``inv`` evaluate the function and its inverse on floats or numpy
    arrays.  ``deriv`` (optional) evaluates the derivative on the open
    interval.  The capability flags are declared per family, not detected
    numerically:

    * ``is_c1`` -- continuously differentiable on (0,1);
    * ``derivative_positive`` -- derivative strictly positive on (0,1);
    * ``reciprocal_derivative_concave`` -- 1/f' is concave on (0,1), the
      hypothesis under which bistochastic monotonicity is guaranteed.
    """

    name: str
    params: Mapping[str, float]
    fn: Callable
    inv: Callable
    deriv: Callable | None = None
    is_c1: bool = False
    derivative_positive: bool = False
    reciprocal_derivative_concave: bool = False

    def __call__(self, x):
        return self.fn(x)

    def inverse(self, y):
        return self.inv(y)

    def derivative(self, x):
        if self.deriv is None:
            raise NotC1(f"generator {self.label()} has no derivative evaluator")
        return self.deriv(x)

    def inverse_clamped(self, y):
        """Inverse extended to all of R by clamping the argument into [0,1]."""
        return self.inv(np.clip(y, 0.0, 1.0))

    def label(self) -> str:
        if not self.params:
            return self.name
        inner = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.name}({inner})"

    def to_json(self) -> dict:
        return {"name": self.name, **dict(self.params)}


_HALF_PI = float(np.arcsin(1.0))


def _make_identity() -> GeneratorFunction:
    return GeneratorFunction(
        name="identity",
        params={},
        fn=lambda x: x + 0.0,
        inv=lambda y: y + 0.0,
        deriv=lambda x: x * 0.0 + 1.0,
        is_c1=True,
        derivative_positive=True,
        reciprocal_derivative_concave=True,
    )


def _make_power(alpha: float) -> GeneratorFunction:
    if not (alpha > 0.0) or not math.isfinite(alpha):
        raise InvalidParameter(f"power generator needs alpha > 0, got {alpha!r}")
    # 1/f' = x^(1-alpha)/alpha is concave exactly when alpha <= 1.
    return GeneratorFunction(
        name="power",
        params={"alpha": float(alpha)},
        fn=lambda x: np.power(x, alpha),
        inv=lambda y: np.power(y, 1.0 / alpha),
        deriv=lambda x: alpha * np.power(x, alpha - 1.0),
        is_c1=True,
        derivative_positive=True,
        reciprocal_derivative_concave=alpha <= 1.0,
    )


def _make_log(a: float) -> GeneratorFunction:
    if not (a > -1.0) or a == 0.0 or not math.isfinite(a):
        raise InvalidParameter(f"log generator needs a > -1 and a != 0, got {a!r}")
    scale = math.log1p(a)
    # 1/f' = (1 + a*x) * log1p(a)/a is affine in x, hence concave, and positive
    # on (0,1) for every admissible a.
    return GeneratorFunction(
        name="log",
        params={"a": float(a)},
        fn=lambda x: np.log1p(a * x) / scale,
        inv=lambda y: np.expm1(y * scale) / a,
        deriv=lambda x: a / ((1.0 + a * x) * scale),
        is_c1=True,
        derivative_positive=True,
        reciprocal_derivative_concave=True,
    )


def _make_arcsin() -> GeneratorFunction:
    return GeneratorFunction(
        name="arcsin",
        params={},
        fn=lambda x: np.arcsin(x) / _HALF_PI,
        inv=lambda y: np.sin(y * _HALF_PI),
        deriv=lambda x: 1.0 / (_HALF_PI * np.sqrt(1.0 - np.square(x))),
        is_c1=True,
        derivative_positive=True,
        reciprocal_derivative_concave=True,
    )


_FAMILIES = {
    "identity": (_make_identity, ()),
    "power": (_make_power, ("alpha",)),
    "log": (_make_log, ("a",)),
    "arcsin": (_make_arcsin, ()),
}


def generator(name: str, **params) -> GeneratorFunction:
    """Build a built-in generator: identity, power(alpha), log(a), arcsin."""
    if name not in _FAMILIES:
        raise UnknownGenerator(f"unknown generator family {name!r}")
    factory, required = _FAMILIES[name]
    extra = set(params) - set(required)
    if extra:
        raise InvalidParameter(f"{name} generator does not take {sorted(extra)}")
    missing = set(required) - set(params)
    if missing:
        raise InvalidParameter(f"{name} generator requires {sorted(missing)}")
    return factory(**params)


def parse_generator(doc: Mapping) -> GeneratorFunction:
    """Build a generator from its JSON form, e.g. {"name": "power", "alpha": 0.5}."""
    if "name" not in doc:
        raise InvalidParameter("generator JSON needs a 'name' key")
    params = {k: v for k, v in doc.items() if k != "name"}
    return generator(str(doc["name"]), **params)


def bisection_inverse(fn: Callable[[float], float], tol: float = 1e-14) -> Callable:
    """Inverse of an increasing bijection of [0,1] by guarded bisection.

    The returned callable accepts floats or arrays; the result is within
    ``tol`` of the exact preimage.
    """
    iters = max(1, math.ceil(-math.log2(tol)))

    def _scalar(y: float) -> float:
        if y <= 0.0:
            return 0.0
        if y >= 1.0:
            return 1.0
        lo, hi = 0.0, 1.0
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            if fn(mid) < y:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def inverse(y):
        arr = np.asarray(y, dtype=float)
        if arr.ndim == 0:
            return _scalar(float(arr))
        return np.vectorize(_scalar)(arr)

    return inverse


def validate_generator(gen: GeneratorFunction, grid_size: int = 1001) -> None:
    """Check the bijection contract on a sampled grid; raise InvalidParameter on failure.

    Verifies the normalization f(0) = 0 and f(1) = 1, strict monotonicity, the
    inverse round-trip within 1e-12, and (when a derivative is supplied)
    agreement with a central finite difference to relative 1e-6.
    """
    xs = np.linspace(0.0, 1.0, grid_size)
    vals = np.asarray(gen.fn(xs), dtype=float)
    if abs(vals[0]) > 1e-12 or abs(vals[-1] - 1.0) > 1e-12:
        raise InvalidParameter(
            f"{gen.label()} is not normalized: f(0)={vals[0]!r}, f(1)={vals[-1]!r}"
        )
    if np.any(np.diff(vals) <= 0.0):
        raise InvalidParameter(f"{gen.label()} is not strictly increasing on the grid")
    roundtrip = np.max(np.abs(np.asarray(gen.inv(vals), dtype=float) - xs))
    if roundtrip > 1e-12:
        raise InvalidParameter(
            f"{gen.label()} inverse round-trip error {roundtrip:.3e} exceeds 1e-12"
        )
    if gen.deriv is not None:
        interior = np.linspace(0.02, 0.98, 97)
        h = 1e-6
        fd = (np.asarray(gen.fn(interior + h)) - np.asarray(gen.fn(interior - h))) / (2 * h)
        dv = np.asarray(gen.deriv(interior), dtype=float)
        rel = np.max(np.abs(fd - dv) / np.maximum(1.0, np.abs(dv)))
        if rel > 1e-6:
            raise InvalidParameter(
                f"{gen.label()} derivative disagrees with finite differences ({rel:.3e})"
            )


def custom_generator(
    name: str,
    fn: Callable,
    inv: Callable | None = None,
    deriv: Callable | None = None,
    *,
    is_c1: bool = False,
    derivative_positive: bool = False,
    reciprocal_derivative_concave: bool = False,
    params: Mapping[str, float] | None = None,
    validate: bool = True,
) -> GeneratorFunction:
    """Wrap a user-supplied increasing bijection of [0,1].

    Capability flags must be declared by the caller; they are never inferred.
    When no inverse is given, a guarded bisection inverse (tolerance 1e-14)
    is attached.
    """
    gen = GeneratorFunction(
        name=name,
        params=dict(params or {}),
        fn=fn,
        inv=inv if inv is not None else bisection_inverse(fn),
        deriv=deriv,
        is_c1=is_c1,
        derivative_positive=derivative_positive,
        reciprocal_derivative_concave=reciprocal_derivative_concave,
    )
    if validate:
        validate_generator(gen)
    return gen


# ---------------------------------------------------------------------------
# Seeded sampling helpers
# ---------------------------------------------------------------------------

def random_point(dim: int, rng: np.random.Generator) -> ProbVector:
    """Uniform (Dirichlet(1,...,1)) sample of the dim-dimensional simplex."""
    raw = rng.exponential(size=dim + 1)
    return ProbVector(raw / raw.sum())


def random_tangent(base: ProbVector, rng: np.random.Generator, scale: float = 1.0) -> TangentVector:
    comps = rng.standard_normal(len(base)) * scale
    comps -= comps.mean()
    return TangentVector(base, comps)
