"""Deterministic SVG pictures of slice traces.

Coordinates are the dyadic coordinates themselves (one user unit per unit
length, written as exact decimals), with y flipped so the real axis is
horizontal and the upper half-plane is on top.  A tile or covering set is
drawn in one hue; its upper and lower halves (the two discs of a mirror
pair) share that hue, the lower one lighter, so mirror images are visibly
linked.
"""

from __future__ import annotations

import colorsys
from fractions import Fraction
from typing import Iterable, Sequence

from . import geometry as geo
from .geometry import Region

DISPLAY_WIDTH = 640


def dec(x) -> str:
    """Exact decimal form of a dyadic rational."""
    x = Fraction(x)
    e = x.denominator.bit_length() - 1
    n = abs(x.numerator) * 5 ** e
    s = str(n).rjust(e + 1, "0")
    out = s if e == 0 else (s[:-e] + "." + s[-e:]).rstrip("0").rstrip(".")
    return ("-" if x < 0 else "") + out


def _hue(i: int) -> float:
    return (i * 0.6180339887498949) % 1.0


def _rgb(h: float, light: float, sat: float = 0.65) -> str:
    r, g, b = colorsys.hls_to_rgb(h, light, sat)
    return "#%02x%02x%02x" % (round(r * 255), round(g * 255), round(b * 255))


def _pt(x, y) -> str:
    return f"{dec(x)},{dec(-Fraction(y))}"


def _path(r: Region) -> str:
    return " ".join("M" + " L".join(_pt(x, y) for x, y in ring) + " Z" for ring in geo.to_rings(r))


def _pow2_at_most(x: Fraction) -> Fraction:
    p = Fraction(1)
    while p > x:
        p /= 2
    while p * 2 <= x:
        p *= 2
    return p


def render_svg(regions: Sequence[Region], title: str = "", opacity: float = 1.0, labels: bool = False,
               vertices: Iterable[tuple] = ()) -> str:
    """One filled path per half of every region, in input order, then the
    real axis and optional vertex markers."""
    boxes = [r.bounds for r in regions if not r.is_empty] or [(Fraction(-1), Fraction(-1), Fraction(1), Fraction(1))]
    x0 = min(b[0] for b in boxes)
    x1 = max(b[2] for b in boxes)
    y0 = min(min(b[1] for b in boxes), Fraction(0))
    y1 = max(max(b[3] for b in boxes), Fraction(0))
    span = max(x1 - x0, y1 - y0)
    pad = _pow2_at_most(span / 32)
    vx, vy, vw, vh = x0 - pad, -y1 - pad, x1 - x0 + 2 * pad, y1 - y0 + 2 * pad
    stroke = dec(_pow2_at_most(span / 512))
    height = round(DISPLAY_WIDTH * vh / vw)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{DISPLAY_WIDTH}" height="{height}" '
           f'viewBox="{dec(vx)} {dec(vy)} {dec(vw)} {dec(vh)}">']
    if title:
        out.append(f"<title>{_esc(title)}</title>")
    out.append(f'<rect x="{dec(vx)}" y="{dec(vy)}" width="{dec(vw)}" height="{dec(vh)}" fill="#ffffff"/>')
    for i, r in enumerate(regions):
        if r.is_empty:
            continue
        h = _hue(i)
        for half, light in ((r.upper(), 0.45), (r.lower(), 0.72)):
            if half.is_empty:
                continue
            out.append(f'<path d="{_path(half)}" fill="{_rgb(h, light)}" fill-opacity="{opacity:g}" '
                       f'fill-rule="evenodd" stroke="#222222" stroke-width="{stroke}" data-index="{i}"/>')
        if labels:
            up = r.upper()
            bx0, by0, bx1, by1 = (up if not up.is_empty else r).bounds
            tx, ty = _pt((bx0 + bx1) / 2, (by0 + by1) / 2).split(",")
            out.append(f'<text x="{tx}" y="{ty}" font-size="{dec(_pow2_at_most(span / 64))}" '
                       f'text-anchor="middle">{i}</text>')
    out.append(f'<line x1="{dec(vx)}" y1="0" x2="{dec(vx + vw)}" y2="0" stroke="#000000" '
               f'stroke-width="{dec(2 * Fraction(stroke))}" stroke-dasharray="{dec(4 * Fraction(stroke))}"/>')
    rad = dec(3 * Fraction(stroke))
    for x, y in sorted(set((Fraction(a), Fraction(b)) for a, b in vertices)):
        cx, cy = _pt(x, y).split(",")
        out.append(f'<circle cx="{cx}" cy="{cy}" r="{rad}" fill="#000000"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def tiling_vertices(regions: Sequence[Region]) -> list[tuple[Fraction, Fraction]]:
    """Points lying in three or more of the regions."""
    from .lattice import Lattice

    nerve, _ = Lattice(list(regions)).nerve(max_dim=3)
    pts = set()
    for key, ps in nerve.items():
        if len(key) == 3:
            pts.update(ps.points())
    return sorted(pts)


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
