import colorsys
import re
from fractions import Fraction as F

from cartan_tiler import geometry as geo
from cartan_tiler.geometry import Region
from cartan_tiler.render import dec, render_svg, tiling_vertices


def test_exact_decimals():
    assert dec(F(-3, 8)) == "-0.375"
    assert dec(2) == "2"
    assert dec(F(1, 1024)) == "0.0009765625"


def test_rendering_is_deterministic(models):
    t = models["annulus"][0]
    a = render_svg(t.regions, "tiling", vertices=tiling_vertices(t.regions))
    assert a == render_svg(t.regions, "tiling", vertices=tiling_vertices(t.regions))
    assert a.startswith("<svg") and a.endswith("</svg>\n")


def test_y_is_flipped_and_the_axis_is_drawn():
    svg = render_svg([Region.box(0, 1, 1, 2)])
    path = re.search(r'<path d="([^"]*)"', svg).group(1)
    assert "1,-2" in path and ",2" not in path
    assert re.search(r'<line [^>]*y1="0" [^>]*y2="0"', svg)


def _hls(color):
    r, g, b = (int(color[i:i + 2], 16) / 255 for i in (1, 3, 5))
    return colorsys.rgb_to_hls(r, g, b)


def test_mirror_halves_share_a_hue():
    pairs = [geo.symmetrize(Region.box(0, 1, 1, 2)), geo.symmetrize(Region.box(2, 1, 3, 2))]
    svg = render_svg(pairs)
    fills = re.findall(r'fill="(#[0-9a-f]{6})" [^>]*data-index="(\d)"', svg)
    assert len(fills) == 4
    by_index = {}
    for color, i in fills:
        by_index.setdefault(i, []).append(_hls(color))
    hues = []
    for (h1, l1, _), (h2, l2, _) in by_index.values():
        assert abs(h1 - h2) < 0.01 and l1 < l2
        hues.append(h1)
    assert abs(hues[0] - hues[1]) > 0.1


def test_vertices_of_a_t_junction():
    regs = [Region.box(0, 0, 1, 1), Region.box(1, 0, 2, 1), Region.box(0, 1, 2, 2)]
    assert tiling_vertices(regs) == [(1, 1)]
    assert render_svg(regs, vertices=[(1, 1)]).count("<circle") == 1


def test_labels_are_escaped_titles_and_indices():
    svg = render_svg([Region.box(-1, -1, 1, 1)], title="a<b", labels=True)
    assert "<title>a&lt;b</title>" in svg and ">0</text>" in svg
