"""Explicit affine projections from ambient 3-coordinates to the drawing plane.

``barycentric-2d`` maps the simplex onto the planar equilateral triangle with
vertices (0,0), (1,0), (1/2, sqrt(3)/2).  ``ambient-3d`` is an oblique view:
the same in-plane coordinates plus a vertical shear proportional to the
coordinate-sum excess, so points off the simplex plane (the shifted ball
vertices) separate visibly above and below the triangle.
"""

from __future__ import annotations

import math

_H = math.sqrt(3.0) / 2.0
_SHEAR = 0.45


def _barycentric(pt) -> tuple[float, float]:
    return (pt[1] + 0.5 * pt[2], _H * pt[2])


def _ambient(pt) -> tuple[float, float]:
    x, y = _barycentric(pt)
    return (x, y + _SHEAR * (pt[0] + pt[1] + pt[2] - 1.0))


PROJECTIONS = {
    "barycentric-2d": _barycentric,
    "ambient-3d": _ambient,
}


def project(pt, projection: str) -> tuple[float, float]:
    try:
        fn = PROJECTIONS[projection]
    except KeyError:
        raise ValueError(f"unknown projection {projection!r}") from None
    return fn(pt)
