"""The two drawing projections are explicit affine maps."""

import math

import pytest

from qsx_figures.projection import project


def test_barycentric_triangle_vertices():
    assert project((1, 0, 0), "barycentric-2d") == (0.0, 0.0)
    assert project((0, 1, 0), "barycentric-2d") == (1.0, 0.0)
    x, y = project((0, 0, 1), "barycentric-2d")
    assert x == 0.5
    assert y == pytest.approx(math.sqrt(3) / 2)


def test_barycentric_is_affine():
    a, b = (0.2, 0.3, 0.5), (0.6, 0.1, 0.3)
    lam = 0.37
    mixed = tuple(lam * x + (1 - lam) * y for x, y in zip(a, b))
    pa = project(a, "barycentric-2d")
    pb = project(b, "barycentric-2d")
    pm = project(mixed, "barycentric-2d")
    assert pm[0] == pytest.approx(lam * pa[0] + (1 - lam) * pb[0], abs=1e-15)
    assert pm[1] == pytest.approx(lam * pa[1] + (1 - lam) * pb[1], abs=1e-15)


def test_ambient_matches_barycentric_on_plane():
    pt = (0.25, 0.35, 0.4)
    assert project(pt, "ambient-3d") == project(pt, "barycentric-2d")


def test_ambient_shears_off_plane_points():
    above = (0.5, 0.5, 0.5)  # sums to 1.5
    x_plane, y_plane = project((1 / 3, 1 / 3, 1 / 3), "barycentric-2d")
    x, y = project(above, "ambient-3d")
    assert y > project((above[0] / 1.5, above[1] / 1.5, above[2] / 1.5), "ambient-3d")[1]


def test_unknown_projection():
    with pytest.raises(ValueError):
        project((1, 0, 0), "isometric")
