"""Stochastic and bistochastic matrices, and the monotonicity theorems as checks.

Convention: matrices are *column*-stochastic (entries nonnegative, every
column sums to 1) and act by left multiplication on probability column
vectors, so simplex mass is preserved exactly.  Many numerical libraries use
the row convention instead; everything here is fixed to columns.

A bistochastic (doubly stochastic) matrix additionally has unit row sums and
decomposes as a convex combination of permutation matrices; the decomposition
is computed by greedy peeling with a perfect matching on the support graph.
For generators whose reciprocal derivative is positive and concave, both the
tangent norm and the one-way distance are monotone under bistochastic maps;
the checks below refuse to run when those hypotheses are not declared, since
a verdict would be uninterpretable (a ``force`` flag runs them anyway for
exploration).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import GeneratorFunction, ProbVector, TangentVector, make_prob_vector
from .errors import (
    DimensionMismatch,
    FlagMissing,
    InvalidInput,
    InvalidParameter,
    NoPerfectMatching,
)
from .finsler import finsler_F
from .quasimetric import quasi_dist

MATRIX_TOLERANCE = 1e-12


def _as_matrix(entries) -> np.ndarray:
    arr = np.array(entries, dtype=float, copy=True)
    if arr.ndim != 2:
        raise InvalidInput(f"expected a matrix, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """Nonnegative matrix with unit column sums (acts on probability vectors)."""

    entries: np.ndarray

    def __post_init__(self):
        arr = _as_matrix(self.entries)
        if np.any(arr < -MATRIX_TOLERANCE):
            raise InvalidInput(f"negative entry {float(arr.min())!r} in stochastic matrix")
        arr = np.maximum(arr, 0.0)
        cols = arr.sum(axis=0)
        bad = np.max(np.abs(cols - 1.0))
        if bad > MATRIX_TOLERANCE:
            raise InvalidInput(f"column sums deviate from 1 by {bad:.3e}")
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


@dataclass(frozen=True, eq=False)
class BistochasticMatrix(StochasticMatrix):
    """Square stochastic matrix whose rows also sum to 1."""

    def __post_init__(self):
        super().__post_init__()
        arr = self.entries
        if arr.shape[0] != arr.shape[1]:
            raise InvalidInput(f"bistochastic matrix must be square, got {arr.shape}")
        bad = np.max(np.abs(arr.sum(axis=1) - 1.0))
        if bad > MATRIX_TOLERANCE:
            raise InvalidInput(f"row sums deviate from 1 by {bad:.3e}")


def is_bistochastic(entries, tol: float = MATRIX_TOLERANCE) -> bool:
    arr = _as_matrix(entries)
    if arr.shape[0] != arr.shape[1] or np.any(arr < -tol):
        return False
    return bool(
        np.max(np.abs(arr.sum(axis=0) - 1.0)) <= tol
        and np.max(np.abs(arr.sum(axis=1) - 1.0)) <= tol
    )


def apply(matrix: StochasticMatrix, p: ProbVector) -> ProbVector:
    """Left multiplication; the image is a valid probability vector."""
    rows, cols = matrix.shape
    if cols != len(p):
        raise DimensionMismatch(f"matrix has {cols} columns but the point has {len(p)}")
    return make_prob_vector(matrix.entries @ p.coords)


def apply_tangent(matrix: StochasticMatrix, v: TangentVector) -> TangentVector:
    """Pushforward of a tangent vector; the base moves along, components stay zero-sum."""
    rows, cols = matrix.shape
    if cols != len(v):
        raise DimensionMismatch(f"matrix has {cols} columns but the tangent has {len(v)}")
    return TangentVector(apply(matrix, v.base), matrix.entries @ v.components)


def permutation_matrix(sigma) -> np.ndarray:
    """Matrix of the permutation: row i has its 1 in column sigma(i)."""
    sigma = np.asarray(sigma, dtype=int)
    return np.eye(sigma.size)[sigma]


def random_bistochastic(n: int, k: int, seed: int) -> BistochasticMatrix:
    """Convex combination of k uniform random permutation matrices.

    Weights are a uniform simplex sample (normalized exponentials); the result
    is deterministic for a given seed.
    """
    if n < 2:
        raise InvalidParameter(f"matrix size must be at least 2, got {n!r}")
    if k < 1:
        raise InvalidParameter(f"at least one permutation is required, got {k!r}")
    rng = np.random.default_rng(seed)
    weights = rng.exponential(size=k)
    weights /= weights.sum()
    total = np.zeros((n, n))
    for w in weights:
        total += w * permutation_matrix(rng.permutation(n))
    return BistochasticMatrix(total)


@dataclass(frozen=True, eq=False)
class BirkhoffDecomposition:
    """Convex combination of permutations reconstructing a bistochastic matrix."""

    weights: np.ndarray
    permutations: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.size != len(self.permutations) or w.size == 0:
            raise InvalidInput("weights and permutations must pair up, nonempty")
        if np.any(w <= 0.0):
            raise InvalidInput("decomposition weights must be positive")
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.weights.size

    def reconstruct(self) -> np.ndarray:
        n = len(self.permutations[0])
        out = np.zeros((n, n))
        for w, sigma in zip(self.weights, self.permutations):
            out += w * permutation_matrix(sigma)
        return out


def _perfect_matching(support: np.ndarray) -> np.ndarray | None:
    """Row-to-column perfect matching on a boolean support matrix.

    Kuhn's augmenting-path algorithm; returns sigma with support[i, sigma[i]]
    true for every row i, or None when no perfect matching exists.
    """
    n = support.shape[0]
    col_owner = np.full(n, -1)

    def augment(row: int, seen: np.ndarray) -> bool:
        for col in range(n):
            if support[row, col] and not seen[col]:
                seen[col] = True
                if col_owner[col] < 0 or augment(col_owner[col], seen):
                    col_owner[col] = row
                    return True
        return False

    for row in range(n):
        if not augment(row, np.zeros(n, dtype=bool)):
            return None
    sigma = np.empty(n, dtype=int)
    sigma[col_owner] = np.arange(n)  # col_owner[col] = row  ->  sigma[row] = col
    return sigma


def birkhoff_decompose(matrix, tol: float = MATRIX_TOLERANCE) -> BirkhoffDecomposition:
    """Greedy peeling into permutation matrices.

    Repeatedly matches the support of entries above ``tol``, subtracts the
    minimum matched entry, and stops when the residual is below tolerance.
    Each round zeroes at least one entry, so at most n*n + 1 rounds run; the
    reconstruction matches the input entrywise to the peeled residual.
    """
    arr = matrix.entries if isinstance(matrix, StochasticMatrix) else _as_matrix(matrix)
    n = arr.shape[0]
    if arr.shape[0] != arr.shape[1]:
        raise NoPerfectMatching(f"matrix of shape {arr.shape} is not square")
    scale = max(tol, 1e-9)
    if (np.max(np.abs(arr.sum(axis=0) - 1.0)) > scale
            or np.max(np.abs(arr.sum(axis=1) - 1.0)) > scale
            or np.any(arr < -scale)):
        raise NoPerfectMatching("input is not bistochastic within tolerance")
    residual = np.maximum(arr, 0.0).copy()
    weights: list[float] = []
    perms: list[tuple[int, ...]] = []
    rows = np.arange(n)
    for _ in range(n * n + 1):
        if residual.max() <= tol:
            break
        sigma = _perfect_matching(residual > tol)
        if sigma is None:
            raise NoPerfectMatching(
                "support graph has no perfect matching; input is not bistochastic"
            )
        w = float(residual[rows, sigma].min())
        weights.append(w)
        perms.append(tuple(int(c) for c in sigma))
        residual[rows, sigma] -= w
    else:
        raise NoPerfectMatching("peeling failed to terminate; input is not bistochastic")
    return BirkhoffDecomposition(np.asarray(weights), tuple(perms))


class MonotoneCheck(NamedTuple):
    mapped: float
    original: float
    holds: bool


def _require_monotone_flags(gen: GeneratorFunction, force: bool) -> None:
    if force:
        return
    missing = [
        flag for flag, ok in (
            ("is_c1", gen.is_c1 and gen.deriv is not None),
            ("derivative_positive", gen.derivative_positive),
            ("reciprocal_derivative_concave", gen.reciprocal_derivative_concave),
        ) if not ok
    ]
    if missing:
        raise FlagMissing(
            f"generator {gen.label()} lacks {missing}; the monotonicity verdict "
            "would be uninterpretable (pass force=True to probe anyway)"
        )


def check_finsler_monotone(gen: GeneratorFunction, matrix: BistochasticMatrix,
                           v: TangentVector, force: bool = False) -> MonotoneCheck:
    """Checks that the tangent norm does not grow under a bistochastic map."""
    _require_monotone_flags(gen, force)
    mapped = finsler_F(gen, apply_tangent(matrix, v)).value
    original = finsler_F(gen, v).value
    return MonotoneCheck(mapped, original, bool(mapped <= original + 1e-12))


def check_dist_monotone(gen: GeneratorFunction, matrix: BistochasticMatrix,
                        p: ProbVector, q: ProbVector, force: bool = False) -> MonotoneCheck:
    """Checks that the one-way distance does not grow under a bistochastic map."""
    _require_monotone_flags(gen, force)
    mapped = quasi_dist(gen, apply(matrix, p), apply(matrix, q))
    original = quasi_dist(gen, p, q)
    return MonotoneCheck(mapped, original, bool(mapped <= original + 1e-12))


@dataclass(frozen=True, eq=False)
class CounterexampleReport:
    """Stochastic-but-not-bistochastic map that inflates the identity distance."""

    p: ProbVector
    q: ProbVector
    matrix: StochasticMatrix
    mapped_p: ProbVector
    mapped_q: ProbVector
    dist_before: float
    dist_after: float
    matrix_is_stochastic: bool
    matrix_is_bistochastic: bool

    @property
    def monotonicity_violated(self) -> bool:
        return self.dist_after > self.dist_before

    def to_json(self) -> dict:
        return {
            "P": self.p.coords.tolist(),
            "Q": self.q.coords.tolist(),
            "S": self.matrix.entries.tolist(),
            "SP": self.mapped_p.coords.tolist(),
            "SQ": self.mapped_q.coords.tolist(),
            "dist_before": self.dist_before,
            "dist_after": self.dist_after,
            "stochastic": self.matrix_is_stochastic,
            "bistochastic": self.matrix_is_bistochastic,
            "monotonicity_violated": self.monotonicity_violated,
        }


def stochastic_counterexample() -> CounterexampleReport:
    """The 3x3 instance showing monotonicity fails for merely stochastic maps.

    The map keeps the first outcome and merges the last two; the identity
    distance between (1,0,0) and (0,1/2,1/2) doubles from 1/2 to 1.
    """
    from .core import generator

    p = make_prob_vector([1.0, 0.0, 0.0])
    q = make_prob_vector([0.0, 0.5, 0.5])
    matrix = StochasticMatrix(np.array([
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 1.0],
        [0.0, 0.0, 0.0],
    ]))
    ident = generator("identity")
    sp = apply(matrix, p)
    sq = apply(matrix, q)
    return CounterexampleReport(
        p=p,
        q=q,
        matrix=matrix,
        mapped_p=sp,
        mapped_q=sq,
        dist_before=quasi_dist(ident, p, q),
        dist_after=quasi_dist(ident, sp, sq),
        matrix_is_stochastic=True,
        matrix_is_bistochastic=is_bistochastic(matrix.entries),
    )


def max_mean_inequality_check(a, b) -> bool:
    """Weighted-mean bound: (sum a) / (sum b) <= max_j a_j / b_j, slack 1e-12."""
    av = np.asarray(a, dtype=float)
    bv = np.asarray(b, dtype=float)
    if av.ndim != 1 or bv.ndim != 1 or av.size != bv.size or av.size == 0:
        raise InvalidInput("sequences must be flat, nonempty, and of equal length")
    if np.any(av < 0.0):
        raise InvalidInput("numerator entries must be nonnegative")
    if np.any(bv <= 0.0):
        raise InvalidInput("denominator entries must be positive")
    return bool(av.sum() / bv.sum() <= np.max(av / bv) + 1e-12)
