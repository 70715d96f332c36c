import xml.etree.ElementTree as ET

import numpy as np
import pytest

from topobehavior.plots import (
    color_for,
    plot_curves,
    plot_diagram,
    plot_landscape,
    plot_scatter,
    plot_strip,
)


def svg_root(path):
    return ET.fromstring(path.read_text())


class TestPlotWriters:
    def test_diagram_svg_is_valid_xml_and_embeds_data(self, tmp_path):
        pairs = np.array([[0.0, 1.0], [0.5, 2.0], [0.1, np.inf]])
        out = tmp_path / "d.svg"
        plot_diagram(pairs, out, config_hash="abc123")
        root = svg_root(out)
        assert root.tag.endswith("svg")
        text = out.read_text()
        assert "abc123" in text
        # data rows survive at full repr precision inside the comment block
        assert repr(0.5) in text and "+inf" in text

    def test_empty_diagram_still_renders(self, tmp_path):
        out = tmp_path / "empty.svg"
        plot_diagram(np.empty((0, 2)), out)
        svg_root(out)

    def test_landscape_polylines(self, tmp_path):
        ts = np.linspace(0.0, 2.0, 11)
        values = np.vstack([np.maximum(0, 1 - np.abs(ts - 1)), np.zeros(11)])
        out = tmp_path / "l.svg"
        plot_landscape(ts, values, out)
        root = svg_root(out)
        polys = [e for e in root.iter() if e.tag.endswith("polyline")]
        assert len(polys) == 2

    def test_scatter_label_colors_and_legend(self, tmp_path):
        coords = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 0.5]])
        out = tmp_path / "s.svg"
        plot_scatter(coords, ["a", "b", "a"], out, title="t")
        text = out.read_text()
        assert color_for(0) in text and color_for(1) in text
        assert ">a<" in text and ">b<" in text

    def test_one_dimensional_coords_allowed(self, tmp_path):
        out = tmp_path / "s1.svg"
        plot_scatter(np.array([[0.0], [1.0]]), None, out, title="t")
        svg_root(out)

    def test_curves_and_strip(self, tmp_path):
        plot_curves(np.array([[0.0, 1.0, 0.5]]), ["only"], tmp_path / "c.svg", title="c")
        plot_strip({"g1": [1.0, 1.2], "g2": [3.0]}, tmp_path / "t.svg", title="t")
        svg_root(tmp_path / "c.svg")
        svg_root(tmp_path / "t.svg")

    def test_deterministic_bytes(self, tmp_path):
        coords = np.array([[0.4, 0.2], [1.3, -0.7]])
        plot_scatter(coords, ["x", "y"], tmp_path / "a.svg", title="t")
        plot_scatter(coords, ["x", "y"], tmp_path / "b.svg", title="t")
        assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()

    def test_comment_injection_is_escaped(self, tmp_path):
        # "--" is illegal inside XML comments; labels must not break parsing
        out = tmp_path / "inj.svg"
        plot_scatter(np.array([[0.0, 0.0], [1.0, 1.0]]), ["a--b", "c"], out, title="t")
        svg_root(out)

    def test_degenerate_ranges_padded(self, tmp_path):
        out = tmp_path / "deg.svg"
        plot_scatter(np.array([[2.0, 3.0], [2.0, 3.0]]), None, out, title="t")
        svg_root(out)
