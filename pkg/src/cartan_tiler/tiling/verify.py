"""Verification of symmetric tilings, with a sampling cross-check."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .. import geometry as geo
from ..geometry import PointSet, Region
from ..lattice import Lattice, interior_hosts
from ..report import Report
from .types import Tiling

CONDITIONS = ("i_union", "ii_shape", "ii_pairs", "ii_prefix", "iii_triples", "iii_boundary",
              "iii_quadruples", "iv_real", "subordination", "delta", "z_avoidance")


def _fmt(p) -> str:
    return f"({p[0]}, {p[1]})"


def orbit_points(z: Iterable[tuple]) -> list[tuple[Fraction, Fraction]]:
    """Points of the given conjugation orbits (each point together with its mirror)."""
    out = set()
    for x, y in z:
        x, y = geo.dyadic(x), geo.dyadic(y)
        out.add((x, y))
        out.add((x, -y))
    return sorted(out)


def tile_shape_ok(r: Region) -> str | None:
    """None when ``r`` is a symmetric disc meeting the axis or a mirror pair of discs."""
    return _tile_facts(r)[0]


def _tile_facts(r: Region) -> tuple[str | None, Fraction]:
    """Shape finding (None when fine) and the largest squared component diameter."""
    if r.is_empty:
        return "empty tile", Fraction(0)
    if not r.is_symmetric():
        return "tile is not symmetric", r.diameter_squared()
    if r.meets_real():
        if not geo.is_disc(r):
            return "real tile is not a closed disc", r.diameter_squared()
        return None, r.diameter_squared()
    up = geo.components(r.upper())
    if len(up) != 1:
        return f"off-axis tile has {2 * len(up)} components", max(c.diameter_squared() for c in up)
    if not geo.is_disc(up[0]):
        return "off-axis tile is not a mirror pair of discs", up[0].diameter_squared()
    return None, up[0].diameter_squared()


def _upper_arc(ps: PointSet) -> str | None:
    """None when ``S ∪ R(S)`` is one symmetric arc or a mirror pair of arcs,
    where ``S = ps`` is the part in the closed upper half-plane."""
    if ps.has_area():
        return "interiors overlap"
    pieces = ps.graph_components()
    if len(pieces) != 1:
        return f"{len(pieces)} pieces above the axis"
    return _glued_arc(pieces[0])


def _glued_arc(p) -> str | None:
    """None when the piece, glued to its mirror image, is an arc or an arc pair."""
    if not p.is_arc:
        return "point" if p.is_point else "closed curve" if p.is_closed_curve else "branched set"
    on_axis = [c for c in p.coords if c[1] == 0]
    if not on_axis:
        return None
    if len(on_axis) == 1 and on_axis[0] in p.endpoints:
        return None
    return "closed curve" if len(on_axis) == 2 and set(on_axis) == set(p.endpoints) else "arc meeting the axis"


def _mirror(pts):
    return [q for x, y in pts for q in ((x, y), (x, -y))]


def verify_tiling(t: Tiling, k: Region, cov: Sequence[Region], z_forbidden: Iterable[tuple] = (),
                  prefixes: bool = True) -> Report:
    """Check the tiling conditions, subordination, diameters and Z avoidance.

    Every intersection of symmetric tiles is the union of its part in the
    closed upper half-plane and the mirror image of that part, so the
    intersection lattice is computed on upper halves only.  The target ``k``
    keeps its full faces, which gives its true boundary near the axis.
    """
    rep = Report("tiling")
    for c in CONDITIONS:
        rep.check(c)
    tiles = [tl.region for tl in t.tiles]
    n = len(tiles)
    rep.stats["tiles"] = n
    rep.vertices, rep.assignment, rep.nerve_keys = [], [], []
    if n == 0:
        rep.check("i_union", k.is_empty, "no tiles")
        return rep
    zpts = orbit_points(z_forbidden)

    # (i) union and area bookkeeping
    total = geo.union(*tiles)
    rep.check("i_union", total == k, "union of tiles differs from the target set")
    area = sum((r.area for r in tiles), Fraction(0))
    rep.check("i_union", area == k.area, f"tile areas sum to {area}, target area {k.area}")

    # (ii) shapes; the upper-half reduction below is only valid for symmetric tiles
    diam2 = []
    for i, r in enumerate(tiles):
        msg, d2 = _tile_facts(r)
        diam2.append(d2)
        rep.check("ii_shape", msg is None, f"tile {i}: {msg}")
    if not rep.checks["ii_shape"]:
        return rep

    lat = Lattice(tiles + [k], upper=[True] * n)
    K = n
    nerve, adj = lattice_nerve(lat, n)
    vertices: set[tuple[Fraction, Fraction]] = set()
    for key, ps in nerve.items():
        if len(key) == 2:
            msg = _upper_arc(ps)
            rep.check("ii_pairs", msg is None, f"tiles {key}: {msg}")
            if msg is None:
                b = ps & lat.boundary(K, ps_window(ps, lat))
                pts = b.points() if not b.is_empty() else []
                if b.hedges.any() or b.vedges.any():
                    rep.fail("iii_boundary", f"tiles {key}: shared boundary runs along the outer boundary")
                elif pts:
                    ok = len(pts) == 1 and pts[0][1] != 0
                    rep.check("iii_boundary", ok,
                              f"tiles {key}: boundary contact {[_fmt(p) for p in _mirror(pts)]}")
                    vertices.update(_mirror(pts))
        elif len(key) == 3:
            pts = ps.points() if not ps.has_area() else []
            ok = (not ps.has_area() and not ps.hedges.any() and not ps.vedges.any()
                  and len(pts) == 1 and pts[0][1] != 0)
            rep.check("iii_triples", ok,
                      f"tiles {key}: triple intersection {[_fmt(p) for p in _mirror(pts)] or 'not two points'}")
            vertices.update(_mirror(pts))
        else:
            rep.fail("iii_quadruples", f"tiles {key} share a point")

    # prefix attachment: T_l meets earlier tiles in disjoint arcs with nonreal ends
    if prefixes:
        for l in range(1, n):
            earlier = sorted(b for b in adj[l] if b < l)
            if not earlier:
                continue
            win = lat._win[l]
            acc = None
            for b in earlier:
                ps = nerve[(b, l)]
                e = lat.embed(ps, ps_window(ps, lat), win)
                acc = e if acc is None else acc | e
            if acc.has_area():
                continue  # already reported as an overlap
            bad = [m for m in (_glued_arc(p) for p in acc.graph_components()) if m]
            rep.check("ii_prefix", not bad, f"tile {l} meets earlier tiles in {bad}")

    # (iv) real tiles
    real = [i for i, r in enumerate(tiles) if r.meets_real()]
    for i in real:
        g = geo.FaceGrid([tiles[i]], real_line=True)
        b = g.boundary(tiles[i])
        j = b._zero_row()
        row_pts = int(b.verts[:, j].sum())
        row_seg = int(b.hedges[:, j].sum())
        rep.check("iv_real", row_pts == 2 and row_seg == 0,
                  f"tile {i}: boundary meets the axis in {row_pts} points and {row_seg} segments")
        nbrs = sorted(j for j in adj[i] if tiles[j].meets_real())
        rep.check("iv_real", len(nbrs) <= 2, f"tile {i}: {len(nbrs)} real neighbours {nbrs}")
        if len(nbrs) == 2:
            rep.check("iv_real", nbrs[1] not in adj[nbrs[0]], f"tile {i}: real neighbours {nbrs} meet")

    # subordination and diameters
    assign = []
    hosts = interior_hosts(tiles, cov)
    for i, tl in enumerate(t.tiles):
        j = tl.cov if tl.cov in hosts[i] else (hosts[i][0] if hosts[i] else -1)
        assign.append(j)
        rep.check("subordination", j >= 0, f"tile {i} is inside no covering member")
        d = t.delta_of(tl)
        rep.check("delta", diam2[i] <= d * d, f"tile {i}: component diameter^2 {diam2[i]} > delta^2 {d * d}")

    # a point of Z inside k lies in exactly one tile, so it is no vertex and no
    # pairwise intersection contains it; on the boundary of k that tile's
    # interior cannot hold it, which is fine
    for p in zpts:
        if not k.contains_point(*p):
            continue
        near = [i for i, r in enumerate(tiles) if _in_box(r, p)]
        zl = Lattice([tiles[i] for i in near], points=[p])
        ij = zl.vertex_index(*p)
        owners = [near[a] for a in range(len(near)) if zl.holds_vertex(a, ij)]
        rep.check("z_avoidance", len(owners) == 1, f"point {_fmt(p)} lies in tiles {owners}")

    rep.stats.update({
        "pairs": sum(1 for key in nerve if len(key) == 2),
        "triples": sum(1 for key in nerve if len(key) == 3),
        "max_multiplicity": max([len(key) for key in nerve] + [1]),
        "vertices": len(vertices),
    })
    rep.vertices = sorted(vertices)
    rep.assignment = assign
    rep.nerve_keys = sorted(nerve)
    return rep


def _in_box(r: Region, p) -> bool:
    x0, y0, x1, y1 = r.bounds
    return x0 <= p[0] <= x1 and y0 <= p[1] <= y1


def ps_window(ps: PointSet, lat: Lattice):
    I0 = int(np.searchsorted(lat.X, ps.xs[0]))
    J0 = int(np.searchsorted(lat.Y, ps.ys[0]))
    return I0, I0 + len(ps.xs) - 1, J0, J0 + len(ps.ys) - 1


def lattice_nerve(lat: Lattice, n: int, max_dim: int = 4):
    return lat.nerve(max_dim=max_dim, among=list(range(n)))


def exact_lattice(regions: Sequence[Region], max_dim: int = 4) -> set[tuple[int, ...]]:
    lat = Lattice(list(regions))
    nerve, _ = lat.nerve(max_dim=max_dim)
    return set(nerve)


def raster_lattice(regions: Sequence[Region], factor: int = 4, max_dim: int = 4) -> set[tuple[int, ...]]:
    """Nonempty intersections found by sampling a grid ``factor`` times finer.

    Membership is decided directly from the rectangles of each region, with
    no use of the face machinery, so this is an independent check.  Sample
    points include the grid lines, so every open face of the arrangement
    receives at least one sample.
    """
    regions = [r for r in regions]
    live = [r for r in regions if not r.is_empty]
    if not live:
        return set()
    level, X, Y, _ = geo._grid(live)
    bits = max(0, (factor - 1).bit_length())
    flevel = level + bits
    X = X << bits
    Y = Y << bits
    step = 1 << bits

    def refine(A):
        parts = [A[:-1, None] + (np.arange(factor) * (A[1:, None] - A[:-1, None])) // factor]
        return np.unique(np.concatenate([parts[0].ravel(), A]))

    FX, FY = refine(X), refine(Y)
    del step
    keys = []
    owners = []
    for idx, r in enumerate(regions):
        if r.is_empty:
            continue
        rects = r.rects(flevel)
        x0, y0, x1, y1 = r.int_bounds(flevel)
        sx = FX[(FX >= x0) & (FX <= x1)]
        sy = FY[(FY >= y0) & (FY <= y1)]
        gx, gy = np.meshgrid(sx, sy, indexing="ij")
        gx, gy = gx.ravel(), gy.ravel()
        inside = np.zeros(len(gx), dtype=bool)
        for a in range(0, len(rects), 256):
            R = rects[a:a + 256]
            inside |= np.any((gx[:, None] >= R[None, :, 0]) & (gx[:, None] <= R[None, :, 2])
                             & (gy[:, None] >= R[None, :, 1]) & (gy[:, None] <= R[None, :, 3]), axis=1)
        keys.append(np.stack([gx[inside], gy[inside]], axis=1))
        owners.append(np.full(int(inside.sum()), idx))
    pts = np.concatenate(keys)
    own = np.concatenate(owners)
    order = np.lexsort((own, pts[:, 1], pts[:, 0]))
    pts, own = pts[order], own[order]
    brk = np.nonzero(np.any(np.diff(pts, axis=0) != 0, axis=1))[0] + 1
    found: set[tuple[int, ...]] = set()
    from itertools import combinations
    for grp in np.split(own, brk):
        if len(grp) < 2:
            continue
        g = tuple(sorted(set(int(v) for v in grp)))
        for size in range(2, min(len(g), max_dim) + 1):
            for c in combinations(g, size):
                found.add(c)
    return found
