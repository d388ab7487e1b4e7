"""Model tilings of a square, a square frame and a mirror pair of squares."""

from __future__ import annotations

from fractions import Fraction

from .. import geometry as geo
from ..geometry import Region
from .bricks import brick_tiles
from .types import Tile, Tiling

KINDS = ("square", "annulus", "square_pair")


def _brick_model(region: Region, w: Fraction, h0: Fraction, sx: Fraction, role: str) -> list[Tile]:
    bricks = brick_tiles(region, w, w / 2, sx, h0)
    # real band first, then rows by distance from the axis; bricks come sorted that way
    return [Tile(b.region, role=role) for b in bricks]


def _delta_for(tiles: list[Tile]) -> Fraction:
    d2 = max(max(c.diameter_squared() for c in geo.components(t.region.upper() if not t.is_real else t.region))
             for t in tiles)
    d = Fraction(1, 1 << 12)
    while d * d < d2:
        d *= 2
    return d


def model_tiling(kind: str, fineness: int = 1) -> Tiling:
    """Reference tilings.

    ``square``: staggered bricks on [-1,1]^2, real band first.
    ``annulus``: the frame [-3,3]^2 minus (-1,1)^2 cut into ``2*fineness``
    square layers, each cut perpendicularly with the cuts of neighbouring
    layers staggered.  ``square_pair``: bricks on [-1,1]x[1,3] and their
    mirror images.
    """
    if fineness < 1:
        raise ValueError("fineness must be at least 1")
    if kind == "square":
        w = Fraction(1, 1 << fineness)
        tiles = _brick_model(Region.box(-1, -1, 1, 1), w, w / 4, w / 4, "model")
    elif kind == "square_pair":
        w = Fraction(1, 1 << fineness)
        upper = Region.box(-1, 1, 1, 3)
        tiles = _brick_model(geo.symmetrize(upper), w, w / 4, w / 4, "model")
    elif kind == "annulus":
        tiles = _frame_tiles(fineness)
    else:
        raise ValueError(f"unknown model kind {kind!r}; expected one of {KINDS}")
    d = _delta_for(tiles)
    return Tiling(tuple(tiles), {0: d}, {"model": kind, "fineness": fineness}).renumbered()


def _frame_tiles(fineness: int) -> list[Tile]:
    m = 2 * fineness
    step = Fraction(2, m)
    s = Fraction(1, 1 << fineness)        # cut spacing along the sides
    tiles: list[Tile] = []
    for i in range(m):
        a, b = 1 + i * step, 1 + (i + 1) * step
        shift = s / 2 if i % 2 else Fraction(0)
        # cut positions t_0 < t_1 < ... strictly inside (0, a)
        t0 = s / 2 + shift
        ts = []
        t = t0
        while t < a:
            ts.append(t)
            t += s
        us = ts                          # same positions on the top side
        # real pieces: left then right
        reals = [Region.box(-b, -t0, -a, t0), Region.box(a, -t0, b, t0)]
        pieces = []
        for k in range(len(ts) - 1):
            lo, hi = ts[k], ts[k + 1]
            for sgn in (-1, 1):
                x0, x1 = (-b, -a) if sgn < 0 else (a, b)
                pieces.append((lo, float(sgn), Region.box(x0, lo, x1, hi)))
        # corner pieces: the side run from the last cut into the corner, then along the top
        tl, ul = ts[-1], us[-1]
        for sgn in (-1, 1):
            if sgn < 0:
                corner = Region.from_rects([(-b, tl, -a, b), (-b, a, -ul, b)])
            else:
                corner = Region.from_rects([(a, tl, b, b), (ul, a, b, b)])
            pieces.append((tl, float(sgn), corner))
        # top side cut at -u_last..-u_0, u_0..u_last; the middle piece spans (-u_0, u_0)
        xs = [-v for v in reversed(us)] + list(us)
        tops = []
        for x0, x1 in zip(xs, xs[1:]):
            tops.append((b, float(x0), Region.box(x0, a, x1, b)))
        pieces.sort(key=lambda p: (p[0], p[1]))
        for r in reals:
            tiles.append(Tile(r, stage=0, role="frame"))
        for _, _, r in pieces:
            tiles.append(Tile(geo.symmetrize(r), stage=0, role="frame"))
        for _, _, r in tops:
            tiles.append(Tile(geo.symmetrize(r), stage=0, role="frame"))
    return tiles
