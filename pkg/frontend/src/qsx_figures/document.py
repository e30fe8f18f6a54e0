"""Parsing and validation of figure-data JSON documents."""

from __future__ import annotations

import json
from dataclasses import dataclass


class SchemaError(Exception):
    """The document does not satisfy the figure-data schema."""

    code = "SchemaError"
    exit_code = 2


KNOWN_ROLES = ("simplex_outline", "forward_ball", "backward_ball", "geodesic")

#: tolerance for the unit-sum invariant of on-simplex coordinates
PLANE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Polyline:
    role: str
    closed: bool
    points: tuple[tuple[float, float, float], ...]


@dataclass(frozen=True)
class Marker:
    label: str
    coords: tuple[float, float, float]
    ambient: bool


@dataclass(frozen=True)
class FigureDocument:
    dimension: int
    generator: dict
    polylines: tuple[Polyline, ...]
    markers: tuple[Marker, ...]


def _coords3(raw, context: str) -> tuple[float, float, float]:
    if not isinstance(raw, (list, tuple)) or len(raw) != 3:
        raise SchemaError(f"{context}: expected 3 coordinates, got {raw!r}")
    try:
        x, y, z = (float(v) for v in raw)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{context}: non-numeric coordinate in {raw!r}") from exc
    return (x, y, z)


def _check_on_plane(pt: tuple[float, float, float], context: str) -> None:
    total = pt[0] + pt[1] + pt[2]
    if abs(total - 1.0) > PLANE_TOLERANCE:
        raise SchemaError(f"{context}: coordinates sum to {total!r}, not 1")


def parse_document(doc) -> FigureDocument:
    if not isinstance(doc, dict):
        raise SchemaError("figure document must be a JSON object")
    if doc.get("dimension") != 2:
        raise SchemaError(f"unsupported dimension {doc.get('dimension')!r}; only 2 is drawable")

    polylines = []
    for k, raw in enumerate(doc.get("polylines", [])):
        if not isinstance(raw, dict):
            raise SchemaError(f"polyline #{k} must be an object")
        role = raw.get("role")
        if role not in KNOWN_ROLES:
            raise SchemaError(f"polyline #{k}: unknown role {role!r}")
        closed = bool(raw.get("closed", False))
        pts = tuple(_coords3(p, f"polyline #{k} point {i}")
                    for i, p in enumerate(raw.get("points", [])))
        if len(pts) < 2:
            raise SchemaError(f"polyline #{k}: needs at least two points")
        for i, pt in enumerate(pts):
            _check_on_plane(pt, f"polyline #{k} point {i}")
        if closed and max(abs(a - b) for a, b in zip(pts[0], pts[-1])) > PLANE_TOLERANCE:
            raise SchemaError(f"polyline #{k}: tagged closed but endpoints differ")
        polylines.append(Polyline(role=role, closed=closed, points=pts))

    markers = []
    for k, raw in enumerate(doc.get("points", [])):
        if not isinstance(raw, dict) or "label" not in raw or "coords" not in raw:
            raise SchemaError(f"point #{k}: needs 'label' and 'coords'")
        ambient = bool(raw.get("ambient", False))
        pt = _coords3(raw["coords"], f"point #{k} ({raw['label']})")
        if not ambient:
            _check_on_plane(pt, f"point #{k} ({raw['label']})")
        markers.append(Marker(label=str(raw["label"]), coords=pt, ambient=ambient))

    return FigureDocument(
        dimension=2,
        generator=dict(doc.get("generator", {})),
        polylines=tuple(polylines),
        markers=tuple(markers),
    )


def load_document(path: str) -> FigureDocument:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"malformed JSON in {path!r}: {exc}") from exc
    return parse_document(raw)
