"""Stochastic matrices, Birkhoff peeling, and monotonicity checks."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st_

import qsx
from qsx import errors
from qsx.stochastic import (
    BirkhoffDecomposition,
    BistochasticMatrix,
    StochasticMatrix,
    apply,
    apply_tangent,
    birkhoff_decompose,
    check_dist_monotone,
    check_finsler_monotone,
    is_bistochastic,
    max_mean_inequality_check,
    permutation_matrix,
    random_bistochastic,
    stochastic_counterexample,
)

IDENT = qsx.generator("identity")
QUALIFYING = [IDENT, qsx.generator("power", alpha=0.5),
              qsx.generator("power", alpha=1.0 / 3.0),
              qsx.generator("log", a=1.0), qsx.generator("arcsin")]


def _interior(rng, dim):
    raw = rng.exponential(size=dim + 1)
    pts = 0.9 * raw / raw.sum() + 0.1 / (dim + 1)
    return qsx.make_prob_vector(pts)


# --- matrix types ------------------------------------------------------------

def test_stochastic_matrix_column_convention():
    mat = StochasticMatrix(np.array([[0.7, 0.2], [0.3, 0.8]]))
    assert mat.shape == (2, 2)
    with pytest.raises(errors.InvalidInput):
        StochasticMatrix(np.array([[0.7, 0.2], [0.2, 0.8]]))  # column 0 sums to 0.9
    with pytest.raises(errors.InvalidInput):
        StochasticMatrix(np.array([[1.1, 0.0], [-0.1, 1.0]]))


def test_bistochastic_requires_rows_too():
    with pytest.raises(errors.InvalidInput):
        BistochasticMatrix(np.array([[1.0, 1.0], [0.0, 0.0]]))
    ok = BistochasticMatrix(np.array([[0.25, 0.75], [0.75, 0.25]]))
    assert is_bistochastic(ok.entries)


def test_apply_identity_and_permutation():
    p = qsx.make_prob_vector([0.2, 0.3, 0.5])
    eye = BistochasticMatrix(np.eye(3))
    assert apply(eye, p).allclose(p)
    perm = BistochasticMatrix(permutation_matrix([2, 0, 1]))
    moved = apply(perm, p)
    # row i picks coordinate sigma(i)
    assert np.allclose(moved.coords, [0.5, 0.2, 0.3])


def test_apply_preserves_mass_and_interior():
    rng = np.random.default_rng(201)
    for _ in range(50):
        n = int(rng.integers(2, 8))
        mat = random_bistochastic(n, int(rng.integers(1, n + 1)),
                                  seed=int(rng.integers(0, 1 << 31)))
        p = qsx.random_point(n - 1, rng)
        sp = apply(mat, p)
        assert abs(sp.coords.sum() - 1.0) <= 1e-12
        assert sp.coords.min() >= p.coords.min() - 1e-15


def test_apply_dimension_mismatch():
    mat = BistochasticMatrix(np.eye(3))
    with pytest.raises(errors.DimensionMismatch):
        apply(mat, qsx.uniform_point(3))


def test_tangent_pushforward_linearity():
    rng = np.random.default_rng(207)
    mat = random_bistochastic(4, 3, seed=9)
    p = _interior(rng, 3)
    v = qsx.random_tangent(p, rng, scale=0.05)
    t = 0.3
    moved = apply(mat, qsx.make_prob_vector(p.coords + t * v.components))
    pushed = apply_tangent(mat, v)
    assert np.max(np.abs(moved.coords - (apply(mat, p).coords + t * pushed.components))) <= 1e-14


# --- random bistochastic ------------------------------------------------------

def test_random_bistochastic_single_permutation():
    mat = random_bistochastic(5, 1, seed=3)
    assert np.all((mat.entries == 0.0) | (mat.entries == 1.0))
    assert is_bistochastic(mat.entries)


def test_random_bistochastic_sums_and_determinism():
    a = random_bistochastic(3, 4, seed=42)
    b = random_bistochastic(3, 4, seed=42)
    assert np.array_equal(a.entries, b.entries)
    assert np.max(np.abs(a.entries.sum(axis=0) - 1.0)) <= 1e-15
    assert np.max(np.abs(a.entries.sum(axis=1) - 1.0)) <= 1e-15


def test_random_bistochastic_validation():
    with pytest.raises(errors.InvalidParameter):
        random_bistochastic(1, 1, seed=0)
    with pytest.raises(errors.InvalidParameter):
        random_bistochastic(3, 0, seed=0)


# --- Birkhoff decomposition -----------------------------------------------------

def test_birkhoff_permutation_single_weight():
    dec = birkhoff_decompose(permutation_matrix([1, 2, 0]))
    assert len(dec) == 1
    assert dec.weights[0] == pytest.approx(1.0, abs=1e-15)
    assert dec.permutations[0] == (1, 2, 0)


def test_birkhoff_half_half():
    dec = birkhoff_decompose(np.full((2, 2), 0.5))
    assert len(dec) == 2
    assert np.allclose(sorted(dec.weights), [0.5, 0.5])


def test_birkhoff_roundtrip_random():
    dec = birkhoff_decompose(random_bistochastic(4, 6, seed=11))
    recon = dec.reconstruct()
    assert np.max(np.abs(recon - random_bistochastic(4, 6, seed=11).entries)) <= 1e-9
    assert abs(dec.weights.sum() - 1.0) <= 1e-9


def test_birkhoff_rejects_non_bistochastic():
    with pytest.raises(errors.NoPerfectMatching):
        birkhoff_decompose(np.array([[0.9, 0.1], [0.2, 0.8]]))
    with pytest.raises(errors.NoPerfectMatching):
        birkhoff_decompose(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 0.0]]))


def test_birkhoff_length_bound():
    rng = np.random.default_rng(211)
    for _ in range(20):
        n = int(rng.integers(2, 9))
        k = int(rng.integers(1, max(2, n - 1) + 1))
        mat = random_bistochastic(n, k, seed=int(rng.integers(0, 1 << 31)))
        dec = birkhoff_decompose(mat)
        assert len(dec) <= (n - 1) ** 2 + 1


def test_birkhoff_decomposition_validation():
    with pytest.raises(errors.InvalidInput):
        BirkhoffDecomposition(np.asarray([0.5, -0.5]), ((0, 1), (1, 0)))


# --- monotonicity checks -----------------------------------------------------------

def test_monotone_identity_matrix_equality():
    rng = np.random.default_rng(223)
    mat = BistochasticMatrix(np.eye(4))
    p, q = qsx.random_point(3, rng), qsx.random_point(3, rng)
    result = check_dist_monotone(IDENT, mat, p, q)
    assert result.holds
    assert result.mapped == result.original


def test_monotone_permutation_equality_identity_generator():
    rng = np.random.default_rng(227)
    mat = BistochasticMatrix(permutation_matrix([2, 0, 3, 1]))
    p = _interior(rng, 3)
    v = qsx.random_tangent(p, rng, scale=0.1)
    result = check_finsler_monotone(IDENT, mat, v)
    assert result.holds
    assert result.mapped == pytest.approx(result.original, abs=1e-15)


def test_monotone_maximal_mixing():
    mat = BistochasticMatrix(np.full((4, 4), 0.25))
    p = qsx.make_prob_vector([0.7, 0.1, 0.1, 0.1])
    q = qsx.make_prob_vector([0.1, 0.2, 0.3, 0.4])
    result = check_dist_monotone(IDENT, mat, p, q)
    assert result.holds
    assert result.mapped <= 1e-15


@pytest.mark.parametrize("gen", QUALIFYING, ids=lambda g: g.label())
def test_monotone_random_sweep(gen):
    rng = np.random.default_rng(229)
    for _ in range(60):
        dim = int(rng.integers(1, 6))
        mat = random_bistochastic(dim + 1, int(rng.integers(1, dim + 2)),
                                  seed=int(rng.integers(0, 1 << 31)))
        p, q = qsx.random_point(dim, rng), qsx.random_point(dim, rng)
        assert check_dist_monotone(gen, mat, p, q).holds
        base = _interior(rng, dim)
        v = qsx.random_tangent(base, rng)
        assert check_finsler_monotone(gen, mat, v).holds


def test_monotone_refuses_unqualified_generator():
    mat = BistochasticMatrix(np.eye(3))
    p, q = qsx.uniform_point(2), qsx.make_prob_vector([0.5, 0.3, 0.2])
    quadratic = qsx.generator("power", alpha=2.0)
    with pytest.raises(errors.FlagMissing):
        check_dist_monotone(quadratic, mat, p, q)
    # force mode runs and reports a verdict instead of refusing
    result = check_dist_monotone(quadratic, mat, p, q, force=True)
    assert result.holds  # the identity matrix cannot violate anything


def test_monotone_exhaustive_small_grid():
    gens = [IDENT, qsx.generator("power", alpha=0.5)]
    perms = list(itertools.permutations(range(3)))
    lams = np.arange(9) / 8.0
    pts = [qsx.make_prob_vector(np.asarray([i, j, 6 - i - j]) / 6.0)
           for i in range(7) for j in range(7 - i)]
    rng = np.random.default_rng(233)
    picks = rng.choice(len(pts), size=(60, 2))
    for gen in gens:
        for s1, s2 in [(perms[0], perms[3]), (perms[1], perms[4]), (perms[2], perms[5])]:
            for lam in lams[::2]:
                mat = BistochasticMatrix(lam * permutation_matrix(s1)
                                         + (1.0 - lam) * permutation_matrix(s2))
                for a, b in picks:
                    assert check_dist_monotone(gen, mat, pts[a], pts[b]).holds


# --- the stochastic counterexample ---------------------------------------------------

def test_counterexample_reproduces_printed_instance():
    rep = stochastic_counterexample()
    assert rep.dist_before == 0.5
    assert rep.dist_after == 1.0
    assert rep.matrix_is_stochastic
    assert not rep.matrix_is_bistochastic
    assert rep.monotonicity_violated
    assert rep.mapped_p.allclose(qsx.make_prob_vector([1.0, 0.0, 0.0]))
    assert rep.mapped_q.allclose(qsx.make_prob_vector([0.0, 1.0, 0.0]))
    rows = rep.matrix.entries.sum(axis=1)
    assert np.allclose(rows, [1.0, 2.0, 0.0])


def test_counterexample_json_fields():
    doc = stochastic_counterexample().to_json()
    assert doc["dist_before"] == 0.5
    assert doc["dist_after"] == 1.0
    assert doc["stochastic"] is True
    assert doc["bistochastic"] is False


# --- the max-vs-mean lemma ------------------------------------------------------------

def test_max_mean_trivial_cases():
    assert max_mean_inequality_check([1.0, 2.0], [1.0, 2.0])
    assert max_mean_inequality_check([0.0, 0.0, 0.0], [1.0, 2.0, 3.0])


def test_max_mean_validation():
    with pytest.raises(errors.InvalidInput):
        max_mean_inequality_check([1.0], [0.0])
    with pytest.raises(errors.InvalidInput):
        max_mean_inequality_check([-1.0], [1.0])
    with pytest.raises(errors.InvalidInput):
        max_mean_inequality_check([], [])
    with pytest.raises(errors.InvalidInput):
        max_mean_inequality_check([1.0, 2.0], [1.0])


@settings(max_examples=150, deadline=None)
@given(st_.lists(st_.tuples(
    st_.floats(min_value=0.0, max_value=1e6),
    st_.floats(min_value=1e-6, max_value=1e6)), min_size=1, max_size=16))
def test_max_mean_hypothesis(pairs):
    a = [x for x, _ in pairs]
    b = [y for _, y in pairs]
    assert max_mean_inequality_check(a, b)
