"""Rendering: determinism, marker fidelity, and the end-to-end reproduction."""

import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from qsx_figures.document import SchemaError, load_document, parse_document
from qsx_figures.projection import project
from qsx_figures.render import render_svg

SVG_NS = "{http://www.w3.org/2000/svg}"


@pytest.fixture(scope="module")
def figure_json(tmp_path_factory):
    """Default figure-data produced by the primary package's CLI."""
    path = tmp_path_factory.mktemp("data") / "figure.json"
    result = subprocess.run(
        [sys.executable, "-m", "qsx", "figure-data", "--output", str(path)],
        capture_output=True, text=True,
    )
    assert result.returncode == 0, result.stderr
    return path


def _marker_circles(svg_path):
    root = ET.parse(svg_path).getroot()
    group = root.find(f"{SVG_NS}g")
    circles = {}
    for circle in group.findall(f"{SVG_NS}circle"):
        circles[circle.get("data-label")] = (
            float(circle.get("cx")), float(circle.get("cy")),
            circle.get("data-ambient") == "true",
        )
    return circles


def test_render_default_document(figure_json, tmp_path):
    out = tmp_path / "figure.svg"
    render_svg(load_document(str(figure_json)), "barycentric-2d", str(out))
    text = out.read_text()
    assert "forward_ball" in text and "backward_ball" in text
    assert 'stroke="#1f77b4"' in text  # forward blue
    assert 'stroke="#d62728"' in text  # backward red


def test_criterion_16_marker_coordinates_match_document(figure_json, tmp_path):
    doc = json.loads(figure_json.read_text())
    parsed = load_document(str(figure_json))
    for projection, expect_ambient in (("barycentric-2d", False), ("ambient-3d", True)):
        out = tmp_path / f"fig-{projection}.svg"
        render_svg(parsed, projection, str(out))
        circles = _marker_circles(out)
        worst = 0.0
        for marker in doc["points"]:
            if marker["ambient"] and not expect_ambient:
                assert marker["label"] not in circles
                continue
            cx, cy, ambient_attr = circles[marker["label"]]
            ex, ey = project(tuple(marker["coords"]), projection)
            worst = max(worst, abs(cx - ex), abs(cy - ey))
            assert ambient_attr == marker["ambient"]
        assert worst <= 1e-9, f"{projection}: marker deviation {worst:.2e}"
        print(f"[criterion 16] PASS figure_reproduction[{projection}]: "
              f"marker deviation {worst:.2e} <= 1e-9")


def test_render_byte_identical(figure_json, tmp_path):
    parsed = load_document(str(figure_json))
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    render_svg(parsed, "ambient-3d", str(a))
    render_svg(parsed, "ambient-3d", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_render_empty_polylines_draws_outline_only(tmp_path):
    doc = parse_document({
        "dimension": 2,
        "generator": {"name": "identity"},
        "polylines": [
            {"role": "simplex_outline", "closed": True,
             "points": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 0, 0]]},
        ],
        "points": [],
    })
    out = tmp_path / "outline.svg"
    render_svg(doc, "barycentric-2d", str(out))
    root = ET.parse(out).getroot()
    group = root.find(f"{SVG_NS}g")
    assert len(group.findall(f"{SVG_NS}polyline")) == 1
    assert len(group.findall(f"{SVG_NS}circle")) == 0


def test_render_rejects_unknown_projection(figure_json, tmp_path):
    parsed = load_document(str(figure_json))
    with pytest.raises(SchemaError):
        render_svg(parsed, "orthographic", str(tmp_path / "x.svg"))


def test_cli_end_to_end(figure_json, tmp_path):
    out = tmp_path / "cli.svg"
    result = subprocess.run(
        [sys.executable, "-m", "qsx_figures", str(figure_json),
         "--projection", "ambient-3d", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert result.returncode == 0, result.stderr
    assert out.exists()


def test_cli_schema_error_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dimension": 4}')
    result = subprocess.run(
        [sys.executable, "-m", "qsx_figures", str(bad), "--out",
         str(tmp_path / "x.svg")],
        capture_output=True, text=True,
    )
    assert result.returncode == 2
    assert json.loads(result.stderr)["error"] == "SchemaError"


def test_png_output_optional(figure_json, tmp_path):
    pytest.importorskip("matplotlib")
    out = tmp_path / "fig.png"
    result = subprocess.run(
        [sys.executable, "-m", "qsx_figures", str(figure_json),
         "--out", str(tmp_path / "fig.svg"), "--png", str(out)],
        capture_output=True, text=True,
    )
    assert result.returncode == 0, result.stderr
    assert out.stat().st_size > 0
