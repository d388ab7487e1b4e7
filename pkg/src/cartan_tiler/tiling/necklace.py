"""Necklaces: discs joined by arcs, and their ordered tilings.

Arcs of a symmetric necklace are real segments; they are tiled by thin
strips ``|y| <= w`` cut into short pieces.  Arcs of an upper necklace are
rectilinear corridors found by a turn-minimising search on a square grid.
Every disc receives a collar ``offset(D, c) \\ int(D)`` cut by a staggered
grid, so the pieces are attached to the disc from outside.
"""

from __future__ import annotations

import math
from collections import deque
from fractions import Fraction
from typing import Sequence

import numpy as np

from .. import geometry as geo
from ..dyadic import at_level, exponent, largest_power_below
from ..errors import InfeasibleError
from ..geometry import Region
from .bricks import brick_tiles, choose_shift, feature_coords
from .types import Necklace, Tile, Tiling


# real traces ---------------------------------------------------------------------
def real_intervals(r: Region) -> list[tuple[Fraction, Fraction]]:
    """Maximal intervals of ``r`` on the real axis (degenerate ones included)."""
    if r.is_empty or not r.meets_real():
        return []
    ps = geo.point_intersection([r], real_line=True)
    j = ps._zero_row()
    d = 1 << ps.level
    seg = ps.hedges[:, j]
    out = []
    i = 0
    n = len(ps.xs)
    while i < n:
        if ps.verts[i, j]:
            k = i
            while k < len(seg) and seg[k]:
                k += 1
            out.append((Fraction(int(ps.xs[i]), d), Fraction(int(ps.xs[k]), d)))
            i = k + 1
        else:
            i += 1
    return out


def axis_clearance(r: Region, x: Fraction) -> Fraction:
    """Half-height of the vertical boundary edge of ``r`` crossing the axis at ``x``."""
    ps = geo.point_intersection([r], extra_x=[x], real_line=True)
    i = int(np.searchsorted(ps.xs, at_level(x, ps.level)))
    j = ps._zero_row()
    d = 1 << ps.level
    up = j
    while up + 1 < len(ps.ys) and ps.vedges[i, up]:
        up += 1
    return Fraction(int(ps.ys[up]), d)


# building -----------------------------------------------------------------------
def build_necklace(d: Region, beads_d: Sequence[Region], symmetric: bool, complete: bool,
                   width: Fraction | None = None, clearance: Fraction | None = None,
                   obstacles: Sequence[Region] = (), kinds: Sequence[str] | None = None) -> Necklace:
    """Join the discs of ``beads_d`` by arcs inside ``d``.

    ``kinds`` labels each disc ("bead", "hole" or "free"); it only travels
    along to :func:`tile_necklace`.  ``width``/``clearance`` control corridor
    routing of upper necklaces.
    """
    beads = list(beads_d)
    kinds = list(kinds) if kinds is not None else ["bead"] * len(beads)
    for b in beads:
        if not d.contains_in_interior(b):
            raise InfeasibleError("bead is not inside the interior of the disc")
    for a in range(len(beads)):
        for b in range(a + 1, len(beads)):
            if not geo.point_intersection([beads[a], beads[b]]).is_empty():
                raise InfeasibleError("beads are not disjoint")
    if symmetric:
        return _build_symmetric(d, beads, complete, kinds)
    return _build_upper(d, beads, complete, kinds, width, clearance, obstacles)


def _build_symmetric(d, beads, complete, kinds):
    if not d.is_symmetric() or any(not b.is_symmetric() or not b.meets_real() for b in beads):
        raise InfeasibleError("symmetric necklace needs symmetric discs meeting the axis")
    ivs = real_intervals(d)
    if len(ivs) != 1:
        raise InfeasibleError("disc meets the axis in more than one interval")
    a, b = ivs[0]
    spans = []
    for bead in beads:
        iv = real_intervals(bead)
        if len(iv) != 1:
            raise InfeasibleError("bead meets the axis in more than one interval")
        spans.append(iv[0])
    order = sorted(range(len(beads)), key=lambda i: spans[i][0])
    beads = [beads[i] for i in order]
    kinds = [kinds[i] for i in order]
    spans = [spans[i] for i in order]
    for (p0, q0), (p1, q1) in zip(spans, spans[1:]):
        if q0 >= p1:
            raise InfeasibleError("beads are not orderable along the axis")
    arcs = []
    left = a
    for p, q in spans:
        arcs.append(((left, Fraction(0)), (p, Fraction(0))))
        left = q
    if complete:
        arcs.append(((left, Fraction(0)), (b, Fraction(0))))
    return Necklace(d, tuple(beads), tuple(arcs), complete, True, (), tuple(kinds))


def _build_upper(d, beads, complete, kinds, width, clearance, obstacles):
    if any(b.bounds[1] <= 0 for b in beads):
        raise InfeasibleError("upper necklace needs discs in the open upper half-plane")
    beads = sorted(beads, key=geo._sort_key)
    if not beads:
        return Necklace(d, (), (), complete, False, (), ())
    if width is None or clearance is None:
        gap = _min_gap(d, beads, obstacles)
        width = width or largest_power_below(gap / 4)
        clearance = clearance or width
    upper_d = d.upper() if d.crosses_real() else d
    blocked = [geo.offset(o, clearance) for o in obstacles if not o.is_empty]
    arcs, corridors = [], []
    targets = list(beads) + ([None] if complete else [])
    for i, tgt in enumerate(targets):
        others = [geo.offset(b, clearance) for j, b in enumerate(beads) if j != i and (i == 0 or j != i - 1)]
        src = upper_d if i == 0 else beads[i - 1]
        path, corr = _route(upper_d, src, tgt, i == 0, width, clearance,
                            blocked + others + [geo.offset(c, clearance) for c in corridors])
        arcs.append(path)
        corridors.append(corr)
    return Necklace(d, tuple(beads), tuple(arcs), complete, False, tuple(corridors), tuple(kinds))


def _min_gap(d, beads, obstacles) -> Fraction:
    things = list(beads) + [o for o in obstacles if not o.is_empty]
    x0, y0, x1, y1 = d.bounds
    frame = Region.box(x0 - 1, y0 - 1, x1 + 1, y1 + 1)
    outside = geo.difference(frame, d)
    gaps = [geo.distance(t, outside) for t in things]
    for a in range(len(things)):
        for b in range(a + 1, len(things)):
            gaps.append(geo.distance(things[a], things[b]))
    return min(gaps) if gaps else Fraction(1)


def _route(space: Region, src: Region, tgt: Region | None, from_boundary: bool,
           g: Fraction, clear: Fraction, blocked: Sequence[Region]):
    """Turn-minimising corridor of ``g``-cells from ``src`` to ``tgt``.

    Cells must lie in ``space`` away from ``blocked``.  With ``from_boundary``
    the corridor starts at a cell touching the boundary of ``space``; with
    ``tgt`` None it ends at such a cell.
    """
    x0, y0, x1, y1 = space.bounds
    ox = Fraction(math.floor(x0 / g)) * g - g
    oy = Fraction(math.floor(y0 / g)) * g - g
    nx = int((x1 - ox) / g) + 2
    ny = int((y1 - oy) / g) + 2
    inside = _cells_inside(space, ox, oy, g, nx, ny)
    free = inside.copy()
    for b in blocked:
        free &= ~_cells_touching(b, ox, oy, g, nx, ny)

    def touch(r):
        return _cells_touching(geo.offset(r, g / 2), ox, oy, g, nx, ny)

    border = inside & _cells_touching(_outside(space), ox, oy, g, nx, ny, closed=True)
    start = free & (border if from_boundary else touch(src))
    goal = free & (border if tgt is None else touch(tgt))
    if not from_boundary:
        start &= ~_cells_touching(src, ox, oy, g, nx, ny)
    if tgt is not None:
        goal &= ~_cells_touching(tgt, ox, oy, g, nx, ny)
    path = _bfs_turns(free, start, goal)
    if path is None:
        raise InfeasibleError("no corridor found", width=str(g))
    cells = [(ox + i * g, oy + j * g, ox + (i + 1) * g, oy + (j + 1) * g) for i, j in path]
    corr = Region.from_rects(cells)
    pts = tuple((a + g / 2, b + g / 2) for a, b, _, _ in cells)
    return pts, corr


def _outside(r: Region) -> Region:
    x0, y0, x1, y1 = r.bounds
    return geo.difference(Region.box(x0 - 4, y0 - 4, x1 + 4, y1 + 4), r)


def _cell_areas(r: Region, ox, oy, g, nx, ny) -> np.ndarray:
    """Area of ``r`` inside each grid cell, in units of the finest level."""
    xl = [ox + i * g for i in range(nx + 1)]
    yl = [oy + j * g for j in range(ny + 1)]
    level, X, Y, (m,) = geo._grid([r], xl, yl)
    ci = np.searchsorted(np.array([at_level(v, level) for v in xl]), X[:-1], side="right") - 1
    cj = np.searchsorted(np.array([at_level(v, level) for v in yl]), Y[:-1], side="right") - 1
    area = np.outer(np.diff(X), np.diff(Y)) * m
    out = np.zeros((nx + 2, ny + 2), dtype=np.int64)
    vi = (ci >= 0) & (ci < nx)
    vj = (cj >= 0) & (cj < ny)
    sub = area[np.ix_(vi, vj)]
    np.add.at(out, (np.repeat(ci[vi], vj.sum()).reshape(-1, vj.sum()) + 1,
                    np.tile(cj[vj], (vi.sum(), 1)) + 1), sub)
    return out[1:nx + 1, 1:ny + 1], level


def _cells_inside(r, ox, oy, g, nx, ny):
    a, level = _cell_areas(r, ox, oy, g, nx, ny)
    full = at_level(g, level) ** 2
    return a == full


def _cells_touching(r, ox, oy, g, nx, ny, closed=False):
    """Cells whose closure meets ``r`` in positive area (or at all when ``closed``)."""
    if closed:
        r = geo.offset(r, g / 4)
    a, _ = _cell_areas(r, ox, oy, g, nx, ny)
    return a > 0


def _bfs_turns(free, start, goal):
    nx, ny = free.shape
    INF = 1 << 30
    dist = np.full((nx, ny, 4), INF, dtype=np.int64)
    prev = {}
    dq = deque()
    moves = ((1, 0), (0, 1), (-1, 0), (0, -1))
    for i, j in zip(*np.nonzero(start)):
        for k in range(4):
            dist[i, j, k] = 0
            dq.append((0, int(i), int(j), k))
    best = None
    while dq:
        c, i, j, k = dq.popleft()
        if c > dist[i, j, k]:
            continue
        if goal[i, j]:
            best = (i, j, k)
            break
        for k2, (di, dj) in enumerate(moves):
            a, b = i + di, j + dj
            if not (0 <= a < nx and 0 <= b < ny) or not free[a, b]:
                continue
            c2 = c + (0 if k2 == k else 1) * 1000 + 1
            if c2 < dist[a, b, k2]:
                dist[a, b, k2] = c2
                prev[(a, b, k2)] = (i, j, k)
                dq.append((c2, a, b, k2))
        # keep the deque roughly ordered by cost
        if len(dq) > 1 and dq[0][0] > dq[-1][0]:
            dq = deque(sorted(dq))
    if best is None:
        return None
    path = [best]
    while path[-1] in prev:
        path.append(prev[path[-1]])
    return [(i, j) for i, j, _ in reversed(path)]


# tiling ----------------------------------------------------------------------------
def collar(disc: Region, c: Fraction, within: Region | None = None) -> Region:
    ring = geo.difference(geo.offset(disc, c), disc)
    return geo.intersect(ring, within) if within is not None else ring


def _angle_key(piece: Region, center, start_angle: float, clockwise: bool) -> float:
    x0, y0, x1, y1 = piece.bounds
    cx = float(x0 + x1) / 2 - center[0]
    cy = float(y0 + y1) / 2 - center[1]
    a = math.atan2(cy, cx)
    rel = (start_angle - a) if clockwise else (a - start_angle)
    return rel % (2 * math.pi)


def collar_pieces(disc: Region, c: Fraction, s: Fraction, avoid, symmetric: bool, seed: int = 0,
                  start: Region | None = None) -> list[Region]:
    """Cut the collar of ``disc`` into at least three ordered pieces.

    Symmetric discs: the piece on the left of the axis first, then the upper
    pieces from left to right over the top (each with its mirror), then the
    real piece on the right.  Upper discs: counter-clockwise starting from
    the piece touching ``start`` (or the lowest-leftmost piece).
    """
    ring = collar(disc, c)
    for attempt in range(6):
        try:
            sx, h0 = choose_shift(ring, s, s, avoid, seed=seed + attempt)
        except InfeasibleError:
            s /= 2
            continue
        bricks = brick_tiles(ring, s, s, sx, h0, symmetric=symmetric)
        pieces = [b.region for b in bricks]
        touching = [p for p in pieces if not geo.point_intersection([p, disc]).is_empty()]
        count = len(touching) if symmetric is False else \
            sum(1 for p in touching if p.meets_real()) + 2 * sum(1 for p in touching if not p.meets_real())
        if count >= 3 and all(geo.is_disc(p) if p.meets_real() or not symmetric else True for p in pieces):
            break
        s /= 2
    else:
        raise InfeasibleError("could not cut the collar into three pieces")
    x0, y0, x1, y1 = disc.bounds
    if symmetric:
        center = (float(x0 + x1) / 2, 0.0)
        reals = sorted([p for p in pieces if p.meets_real()], key=lambda p: p.bounds[0])
        left = [p for p in reals if float(p.bounds[2]) <= center[0]]
        right = [p for p in reals if float(p.bounds[2]) > center[0]]
        ups = sorted([p for p in pieces if not p.meets_real()],
                     key=lambda p: _angle_key(p.upper(), center, math.pi, True))
        return left + ups + right
    center = (float(x0 + x1) / 2, float(y0 + y1) / 2)
    first = None
    if start is not None:
        hits = [p for p in pieces if not geo.point_intersection([p, start]).is_empty()]
        first = hits[0] if hits else None
    first = first or min(pieces, key=geo._sort_key)
    fx0, fy0, fx1, fy1 = first.bounds
    a0 = math.atan2(float(fy0 + fy1) / 2 - center[1], float(fx0 + fx1) / 2 - center[0])
    return sorted(pieces, key=lambda p: _angle_key(p, center, a0, False))


def _chunk_strip(strip: Region, length: Fraction, avoid_x: set) -> list[Region]:
    """Cut a real strip into pieces no longer than ``length`` along x."""
    x0, y0, x1, y1 = strip.bounds
    # each cut may move by length/8, so aim at 3/4 of the length
    n = max(1, math.ceil((x1 - x0) / (length * 3 / 4)))
    cuts = []
    for k in range(1, n):
        target = x0 + (x1 - x0) * k / n
        lvl = max(exponent(length), 0)
        while True:
            q = Fraction(1, 1 << lvl)
            x = round(target / q) * q
            if x0 < x < x1 and x not in avoid_x and abs(x - target) <= length / 8:
                break
            lvl += 1
        cuts.append(x)
    bounds = [x0] + cuts + [x1]
    out = []
    for a, b in zip(bounds, bounds[1:]):
        out.extend(geo.components(geo.intersect(strip, Region.box(a, y0, b, y1))))
    return out


def tile_necklace(n: Necklace, delta: Fraction, forbidden=(), collar_width: Fraction | None = None,
                  strip_width: Fraction | None = None, avoid_regions: Sequence[Region] = (),
                  seed: int = 0, stage: int = 0) -> Tiling:
    """Ordered delta-tiling of a necklace.

    Symmetric necklaces give symmetric tiles.  Upper necklaces give tiles in
    the upper half-plane (reflect them with :func:`symmetrize_tiling`).
    """
    delta = Fraction(delta)
    avoid = feature_coords(list(avoid_regions) + [n.domain] + list(n.beads), forbidden)
    gap = _min_gap(n.domain, list(n.beads), [])
    c = collar_width or min(largest_power_below(delta / 8), largest_power_below(gap / 4))
    s = largest_power_below(delta * Fraction(7, 10))
    kinds = list(n.bead_kinds) or ["bead"] * len(n.beads)
    tiles: list[Tile] = []
    if n.symmetric:
        collars = []
        for bead, kind in zip(n.beads, kinds):
            if kind == "free":
                collars.append([])
                continue
            pieces = collar_pieces(bead, c, s, avoid, True, seed=seed)
            collars.append(pieces)
        # strip half-width: below every collar band and every crossing edge
        cl = [axis_clearance(n.domain, n.arcs[0][0][0])] if n.arcs else []
        if n.complete and n.arcs:
            cl.append(axis_clearance(n.domain, n.arcs[-1][1][0]))
        for bead, pieces in zip(n.beads, collars):
            iv = real_intervals(bead)[0]
            cl.append(axis_clearance(bead, iv[0]))
            cl.append(axis_clearance(bead, iv[1]))
            for p in pieces:
                if p.meets_real():
                    cl.append(p.bounds[3])
        w = strip_width or min(largest_power_below(min(cl) / 2), c)
        while w in avoid[1] or -w in avoid[1]:
            w /= 2
        used = geo.union(*[geo.union(*p) for p in collars if p], *n.beads) if n.beads else Region.empty()
        avoid_x = avoid[0] | {geo.dyadic(v) for p in collars for r in p for v in feature_coords([r])[0]}
        for i, arc in enumerate(n.arcs):
            (ax, _), (bx, _) = arc
            band = geo.intersect(Region.box(ax - c - 1, -w, bx + c + 1, w), n.domain)
            band = geo.difference(band, used) if not used.is_empty else band
            band = geo.intersect(band, Region.box(ax - c, -w, bx + c, w))
            for comp in geo.components(band):
                for piece in _chunk_strip(comp, delta * Fraction(8, 10), avoid_x):
                    tiles.append(Tile(piece, stage=stage, role="strip"))
            if i < len(n.beads):
                for p in collars[i]:
                    tiles.append(Tile(p, stage=stage, role="collar"))
    else:
        corridors = list(n.corridors)
        collars = []
        for i, bead in enumerate(n.beads):
            if kinds[i] == "free":
                collars.append([])
                continue
            start = corridors[i] if i < len(corridors) else None
            collars.append(collar_pieces(bead, c, s, avoid, False, seed=seed, start=start))
        used = geo.union(*[geo.union(*p) for p in collars if p], *n.beads)
        for i in range(len(corridors)):
            corr = geo.intersect(corridors[i], n.domain)
            corr = geo.difference(corr, used)
            for piece in _chunk_corridor(corr, n.arcs[i], delta):
                tiles.append(Tile(piece, stage=stage, role="arc"))
            if i < len(n.beads):
                for p in collars[i]:
                    tiles.append(Tile(p, stage=stage, role="collar"))
    return Tiling(tuple(tiles), {stage: delta}).renumbered()


def _chunk_corridor(corr: Region, centers, delta: Fraction) -> list[Region]:
    """Split a trimmed corridor into consecutive pieces of diameter at most ``delta``.

    ``centers`` are the routed cell centres.  Cuts are placed across straight
    runs only, so consecutive pieces share a full edge.
    """
    if len(centers) > 1:
        g = abs(centers[1][0] - centers[0][0]) + abs(centers[1][1] - centers[0][1])
    else:
        x0, y0, x1, y1 = corr.bounds
        g = max(x1 - x0, y1 - y0)
    cells = [(cx - g / 2, cy - g / 2, cx + g / 2, cy + g / 2) for cx, cy in centers]
    out, chunk = [], []
    for k, cell in enumerate(cells):
        trial = chunk + [cell]
        reg = geo.intersect(Region.from_rects(trial), corr)
        if chunk and reg.diameter_squared() > delta * delta and _straight_at(cells, k):
            out.append(geo.intersect(Region.from_rects(chunk), corr))
            chunk = [cell]
        else:
            chunk = trial
    if chunk:
        out.append(geo.intersect(Region.from_rects(chunk), corr))
    return [r for r in out if not r.is_empty]


def _straight_at(cells, k) -> bool:
    """True when the cut between cells k-1 and k crosses a straight run."""
    if k < 1:
        return False

    def side(a, b):
        return a[3] > b[1] and b[3] > a[1]   # side by side horizontally

    horiz = side(cells[k - 1], cells[k])
    if k >= 2 and side(cells[k - 2], cells[k - 1]) != horiz:
        return False
    if k + 1 < len(cells) and side(cells[k], cells[k + 1]) != horiz:
        return False
    return True


def symmetrize_tiling(t: Tiling) -> Tiling:
    tiles = tuple(Tile(geo.symmetrize(tl.region), tl.index, tl.cov, tl.stage, tl.role) for tl in t.tiles)
    return Tiling(tiles, t.deltas, t.meta)
