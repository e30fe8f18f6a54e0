"""Constructive geodesics: the mixing equation, endpoints, derivatives."""

import numpy as np
import pytest

import qsx
from qsx import errors
from qsx.geodesic import backward_geodesic, make_geodesic, mu_derivative, solve_mu

IDENT = qsx.generator("identity")
GENS = [IDENT, qsx.generator("power", alpha=0.5),
        qsx.generator("power", alpha=1.0 / 3.0),
        qsx.generator("log", a=1.0), qsx.generator("arcsin")]


def _oracle_mu(gen, p, q, t, iters=200):
    """Independent scalar bisection at far finer resolution than the library."""
    fp = np.asarray(gen(p.coords), dtype=float)
    fq = np.asarray(gen(q.coords), dtype=float)
    r = float(np.max(fq - fp))
    coeff = fq - fp - r

    def total(x):
        return float(np.sum(gen.inverse(np.clip(fp + t + x * coeff, 0.0, 1.0))))

    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if total(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --- solve_mu -----------------------------------------------------------------

def test_solve_mu_endpoint_values():
    p = qsx.make_prob_vector([0.2, 0.3, 0.5])
    q = qsx.make_prob_vector([0.4, 0.4, 0.2])
    for gen in GENS:
        r = qsx.quasi_dist(gen, p, q)
        assert solve_mu(gen, p, q, 0.0) <= 1e-10
        assert abs(solve_mu(gen, p, q, r) - 1.0) <= 1e-10


def test_solve_mu_identity_is_linear():
    rng = np.random.default_rng(41)
    for _ in range(20):
        dim = int(rng.integers(1, 6))
        p, q = qsx.random_point(dim, rng), qsx.random_point(dim, rng)
        r = qsx.quasi_dist(IDENT, p, q)
        if r < 1e-6:
            continue
        for frac in (0.25, 0.5, 0.75):
            t = frac * r
            assert abs(solve_mu(IDENT, p, q, t) - t / r) <= 1e-10


def test_solve_mu_regression_pinned_value():
    # frozen from a 60-digit bisection of the unit-sum constraint
    gen = qsx.generator("power", alpha=0.5)
    p = qsx.make_prob_vector([0.2, 0.3, 0.5])
    q = qsx.make_prob_vector([0.4, 0.4, 0.2])
    r = qsx.quasi_dist(gen, p, q)
    assert r == pytest.approx(0.18524193653371793, abs=1e-16)
    value = solve_mu(gen, p, q, r / 2.0, tol=1e-15)
    assert value == pytest.approx(0.45749302460459335, abs=1e-13)
    assert value == pytest.approx(_oracle_mu(gen, p, q, r / 2.0), abs=1e-13)


def test_solve_mu_agrees_with_oracle_across_generators():
    rng = np.random.default_rng(43)
    for gen in GENS:
        p, q = qsx.random_point(3, rng), qsx.random_point(3, rng)
        r = qsx.quasi_dist(gen, p, q)
        t = 0.37 * r
        assert solve_mu(gen, p, q, t, tol=1e-15) == pytest.approx(
            _oracle_mu(gen, p, q, t), abs=1e-13)


def test_solve_mu_degenerate_endpoints():
    p = qsx.uniform_point(2)
    with pytest.raises(errors.DegenerateEndpoints):
        solve_mu(IDENT, p, p, 0.0)


def test_solve_mu_out_of_domain():
    p = qsx.make_prob_vector([0.2, 0.8])
    q = qsx.make_prob_vector([0.6, 0.4])
    r = qsx.quasi_dist(IDENT, p, q)
    with pytest.raises(errors.OutOfDomain):
        solve_mu(IDENT, p, q, 2.0 * r)
    with pytest.raises(errors.OutOfDomain):
        solve_mu(IDENT, p, q, -0.1)


# --- geodesic construction -------------------------------------------------------

def test_identity_geodesic_is_straight_segment():
    rng = np.random.default_rng(47)
    for _ in range(25):
        dim = int(rng.integers(1, 6))
        p, q = qsx.random_point(dim, rng), qsx.random_point(dim, rng)
        r = qsx.quasi_dist(IDENT, p, q)
        if r < 1e-6:
            continue
        geod = make_geodesic(IDENT, p, q)
        ts = np.linspace(0.0, r, 9)
        pts = geod.point_many(ts)
        straight = p.coords + (ts / r)[:, None] * (q.coords - p.coords)
        assert np.max(np.abs(pts - straight)) <= 1e-10


def test_boundary_to_boundary_identity_closed_form():
    p = qsx.make_prob_vector([1.0, 0.0, 0.0])
    q = qsx.make_prob_vector([0.0, 1.0, 0.0])
    geod = make_geodesic(IDENT, p, q)
    assert geod.length == 1.0
    for t in (0.0, 0.25, 0.5, 0.75, 1.0):
        expected = np.asarray([1.0 - t, t, 0.0])
        assert np.max(np.abs(geod.point(t).coords - expected)) <= 1e-10
    check = qsx.is_f_geodesic(IDENT, geod.as_curve(), grid_size=33, tol=1e-8)
    assert check.ok


def test_geodesic_identity_random_interior():
    rng = np.random.default_rng(53)
    for gen in GENS:
        for dim in (1, 2, 4):
            raw = rng.exponential(size=(2, dim + 1))
            pts = 0.9 * raw / raw.sum(axis=1, keepdims=True) + 0.1 / (dim + 1)
            p, q = qsx.make_prob_vector(pts[0]), qsx.make_prob_vector(pts[1])
            geod = make_geodesic(gen, p, q)
            check = qsx.is_f_geodesic(gen, geod.as_curve(), grid_size=33, tol=1e-8)
            assert check.ok, f"{gen.label()} dim={dim} defect={check.defect:.2e}"


def test_geodesic_endpoints_exact():
    rng = np.random.default_rng(59)
    for gen in GENS:
        p, q = qsx.random_point(3, rng), qsx.random_point(3, rng)
        geod = make_geodesic(gen, p, q)
        assert geod.point(0.0).allclose(p, tol=1e-11)
        assert geod.point(geod.length).allclose(q, tol=1e-11)


def test_geodesic_interior_image():
    rng = np.random.default_rng(61)
    for gen in GENS:
        raw = rng.exponential(size=(2, 4))
        pts = 0.9 * raw / raw.sum(axis=1, keepdims=True) + 0.1 / 4
        p, q = qsx.make_prob_vector(pts[0]), qsx.make_prob_vector(pts[1])
        geod = make_geodesic(gen, p, q)
        samples = geod.point_many(np.linspace(0.0, geod.length, 33))
        assert samples.min() > 0.0


def test_geodesic_mu_monotone():
    rng = np.random.default_rng(67)
    for gen in GENS:
        p, q = qsx.random_point(4, rng), qsx.random_point(4, rng)
        geod = make_geodesic(gen, p, q)
        mus = geod.mu_many(np.linspace(0.0, geod.length, 33))
        assert np.all(np.diff(mus) > 0.0)


def test_degenerate_geodesic_point_curve():
    p = qsx.uniform_point(2)
    geod = make_geodesic(IDENT, p, p)
    assert geod.degenerate
    assert geod.length == 0.0
    assert geod.point(0.0).allclose(p)
    curve = geod.as_curve()
    assert curve.domain == (0.0, 0.0)
    check = qsx.is_f_geodesic(IDENT, curve)
    assert check.ok and check.defect == 0.0


def test_mu_memoization_consistency():
    gen = qsx.generator("power", alpha=0.5)
    p = qsx.make_prob_vector([0.2, 0.3, 0.5])
    q = qsx.make_prob_vector([0.4, 0.4, 0.2])
    geod = make_geodesic(gen, p, q)
    t = geod.length * 0.3
    first = geod.mu(t)
    assert geod.mu(t) == first
    assert float(geod.mu_many(np.asarray([t]))[0]) == first


# --- mixing-map derivative --------------------------------------------------------

def test_mu_derivative_identity():
    p = qsx.make_prob_vector([0.2, 0.3, 0.5])
    q = qsx.make_prob_vector([0.4, 0.4, 0.2])
    geod = make_geodesic(IDENT, p, q)
    r = geod.length
    for frac in (0.2, 0.5, 0.8):
        assert mu_derivative(IDENT, geod, frac * r) == pytest.approx(1.0 / r, rel=1e-10)


def test_mu_derivative_positive_and_matches_fd():
    rng = np.random.default_rng(71)
    for gen in GENS:
        for _ in range(4):
            dim = int(rng.integers(1, 5))
            raw = rng.exponential(size=(2, dim + 1))
            pts = 0.9 * raw / raw.sum(axis=1, keepdims=True) + 0.1 / (dim + 1)
            p, q = qsx.make_prob_vector(pts[0]), qsx.make_prob_vector(pts[1])
            geod = make_geodesic(gen, p, q)
            t = 0.5 * geod.length
            h = 1e-6 * geod.length
            value = mu_derivative(gen, geod, t, h=h)
            assert value > 0.0
            fd = (solve_mu(gen, p, q, t + h) - solve_mu(gen, p, q, t - h)) / (2 * h)
            assert value == pytest.approx(fd, rel=1e-4)


def test_mu_derivative_requires_c1():
    step = qsx.custom_generator(
        "piecewise", fn=lambda x: np.where(x < 0.5, 0.8 * x, 1.2 * x - 0.2),
        inv=lambda y: np.where(y < 0.4, y / 0.8, (y + 0.2) / 1.2))
    p = qsx.make_prob_vector([0.2, 0.3, 0.5])
    q = qsx.make_prob_vector([0.4, 0.4, 0.2])
    geod = make_geodesic(step, p, q)
    with pytest.raises(errors.NotC1):
        mu_derivative(step, geod, 0.5 * geod.length)


def test_mu_derivative_domain_guard():
    p = qsx.make_prob_vector([0.2, 0.8])
    q = qsx.make_prob_vector([0.6, 0.4])
    geod = make_geodesic(IDENT, p, q)
    with pytest.raises(errors.OutOfDomain):
        mu_derivative(IDENT, geod, geod.length)


# --- backward geodesics ------------------------------------------------------------

def test_backward_geodesic_identity_reversal():
    p = qsx.make_prob_vector([1.0, 0.0, 0.0])
    q = qsx.make_prob_vector([0.0, 1.0, 0.0])
    back = backward_geodesic(IDENT, p, q)
    # span is the flipped distance; traversal starts at p and ends at q
    assert back.length == 1.0
    assert back.point(0.0).allclose(p)
    assert back.point(back.length).allclose(q)


def test_backward_geodesic_defect():
    rng = np.random.default_rng(73)
    for gen in GENS:
        raw = rng.exponential(size=(2, 4))
        pts = 0.9 * raw / raw.sum(axis=1, keepdims=True) + 0.1 / 4
        p, q = qsx.make_prob_vector(pts[0]), qsx.make_prob_vector(pts[1])
        back = backward_geodesic(gen, p, q)
        grid = np.linspace(0.0, back.length, 17)
        worst = 0.0
        for i, s in enumerate(grid):
            for t in grid[i + 1:]:
                d = qsx.quasi_dist(gen, back.point(float(t)), back.point(float(s)))
                worst = max(worst, abs(d - (t - s)))
        assert worst <= 1e-8


def test_backward_geodesic_mu_contract():
    gen = qsx.generator("power", alpha=0.5)
    p = qsx.make_prob_vector([0.2, 0.3, 0.5])
    q = qsx.make_prob_vector([0.4, 0.4, 0.2])
    back = backward_geodesic(gen, p, q)
    assert back.mu(0.0) <= 1e-10
    assert abs(back.mu(back.length) - 1.0) <= 1e-10


def test_backward_geodesic_degenerate():
    p = qsx.uniform_point(2)
    back = backward_geodesic(IDENT, p, p)
    assert back.degenerate
    assert back.point(0.0).allclose(p)


# --- batch helper -------------------------------------------------------------------

def test_grid_batch_matches_scalar_path():
    gen = qsx.generator("log", a=1.0)
    rng = np.random.default_rng(79)
    p = np.asarray([[0.2, 0.3, 0.5], [0.5, 0.25, 0.25]])
    q = np.asarray([[0.4, 0.4, 0.2], [0.1, 0.6, 0.3]])
    spans, ts, mus, coords = qsx.geodesic_grid_batch(gen, p, q, 9)
    for row in range(2):
        geod = make_geodesic(gen, qsx.make_prob_vector(p[row]), qsx.make_prob_vector(q[row]))
        assert spans[row] == pytest.approx(geod.length, abs=1e-15)
        for col, t in enumerate(ts[row]):
            assert mus[row, col] == pytest.approx(geod.mu(float(t)), abs=1e-13)
            assert np.max(np.abs(coords[row, col] - geod.point(float(t)).coords)) <= 1e-12
