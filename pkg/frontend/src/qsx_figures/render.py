"""Deterministic SVG (and optional PNG) rendering of figure documents.

The geometry group keeps raw projection coordinates (12 decimal places) under
a single affine viewport transform, so marker positions in the file are the
projected document values; labels are drawn separately in screen space.
Output bytes depend only on the document, the projection, and the package
version.
"""

from __future__ import annotations

from . import document as doc_mod
from .document import FigureDocument, SchemaError
from .projection import project

ROLE_STYLE = {
    "simplex_outline": ("#555555", 1.2, None),
    "forward_ball": ("#1f77b4", 2.0, None),
    "backward_ball": ("#d62728", 2.0, None),
    "geodesic": ("#2ca02c", 1.6, "6 3"),
}

WIDTH = 640
HEIGHT = 560
MARGIN = 48

MARKER_COLOR = {True: "#9467bd", False: "#111111"}


def _fmt(x: float, places: int = 12) -> str:
    return f"{x:.{places}f}"


def _viewport(points_xy: list[tuple[float, float]]):
    xs = [p[0] for p in points_xy]
    ys = [p[1] for p in points_xy]
    lo_x, hi_x = min(xs), max(xs)
    lo_y, hi_y = min(ys), max(ys)
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-9)
    scale = (min(WIDTH, HEIGHT) - 2 * MARGIN) / span
    # y flips: SVG grows downward
    tx = MARGIN - scale * lo_x + 0.5 * (WIDTH - 2 * MARGIN - scale * (hi_x - lo_x))
    ty = HEIGHT - MARGIN + scale * lo_y
    return scale, tx, ty


def render_svg(document: FigureDocument, projection: str, out_path: str) -> None:
    """Project the document through the named affine map and write SVG.

    In ``barycentric-2d`` mode the off-simplex (ambient) markers are omitted:
    the map is only meaningful on the simplex plane.  ``ambient-3d`` draws
    everything, including the shifted ball vertices.
    """
    if projection not in ("barycentric-2d", "ambient-3d"):
        raise SchemaError(f"unknown projection {projection!r}")
    draw_ambient = projection == "ambient-3d"

    projected_lines = []
    for poly in document.polylines:
        pts = [project(p, projection) for p in poly.points]
        projected_lines.append((poly.role, pts))
    markers = [m for m in document.markers if draw_ambient or not m.ambient]
    projected_markers = [(m, project(m.coords, projection)) for m in markers]

    everything = [xy for _, pts in projected_lines for xy in pts]
    everything.extend(xy for _, xy in projected_markers)
    if not everything:
        everything = [(0.0, 0.0), (1.0, 1.0)]
    scale, tx, ty = _viewport(everything)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f"<!-- qsx-figures {_version()} projection={projection} -->",
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<g transform="translate({_fmt(tx, 6)} {_fmt(ty, 6)}) '
        f'scale({_fmt(scale, 6)} -{_fmt(scale, 6)})">',
    ]
    for role, pts in projected_lines:
        color, stroke, dash = ROLE_STYLE[role]
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="{stroke}" vector-effect="non-scaling-stroke"'
            f'{dash_attr} data-role="{role}"/>'
        )
    radius = 4.0 / scale
    for marker, (x, y) in projected_markers:
        parts.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(radius, 8)}" '
            f'fill="{MARKER_COLOR[marker.ambient]}" data-label="{marker.label}" '
            f'data-ambient="{str(marker.ambient).lower()}"/>'
        )
    parts.append("</g>")
    for marker, (x, y) in projected_markers:
        sx = tx + scale * x
        sy = ty - scale * y
        parts.append(
            f'<text x="{_fmt(sx + 7.0, 2)}" y="{_fmt(sy - 5.0, 2)}" '
            f'font-family="Helvetica, Arial, sans-serif" font-size="13" '
            f'fill="#333333">{_escape(marker.label)}</text>'
        )
    parts.append("</svg>")
    data = "\n".join(parts) + "\n"
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(data)


def render_png(document: FigureDocument, projection: str, out_path: str) -> None:
    """Optional raster output through matplotlib; same projection, no geometry."""
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:  # pragma: no cover - depends on environment
        raise SchemaError("PNG output requires matplotlib (install qsx-figures[png])") from exc
    draw_ambient = projection == "ambient-3d"
    fig, ax = plt.subplots(figsize=(6.4, 5.6), dpi=100)
    for poly in document.polylines:
        color, stroke, dash = ROLE_STYLE[poly.role]
        pts = [project(p, projection) for p in poly.points]
        xs, ys = zip(*pts)
        ax.plot(xs, ys, color=color, linewidth=stroke,
                linestyle="--" if dash else "-")
    for marker in document.markers:
        if marker.ambient and not draw_ambient:
            continue
        x, y = project(marker.coords, projection)
        ax.plot([x], [y], "o", color=MARKER_COLOR[marker.ambient], markersize=5)
        ax.annotate(marker.label, (x, y), textcoords="offset points", xytext=(6, 4),
                    fontsize=9)
    ax.set_aspect("equal")
    ax.axis("off")
    fig.savefig(out_path, bbox_inches="tight")
    plt.close(fig)


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))


def _version() -> str:
    from . import __version__

    return __version__
