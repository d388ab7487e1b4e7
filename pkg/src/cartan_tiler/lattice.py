"""Exact intersection lattice of many regions on one shared grid.

Each region keeps its face arrays only over its own bounding window of the
shared grid, so intersections of a few nearby regions stay cheap even when
the family is large.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .geometry import PointSet, Region, _faces, _grid, _interior_faces, _resample
from .dyadic import at_level


class Lattice:
    def __init__(self, regions: Sequence[Region], points: Iterable[tuple] = (), symmetric: bool = True,
                 upper: Sequence[bool] = ()):
        """``upper[i]`` True stores only the part of region i in the closed upper half-plane."""
        pts = list(points)
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts] + [0]
        self.regions = list(regions)
        level, X, Y, _ = _grid([r for r in self.regions if not r.is_empty], xs, ys, symmetric=symmetric)
        self.level, self.X, self.Y = level, X, Y
        self.zero_row = int(np.searchsorted(Y, 0))
        self._win = []
        self._closed = []
        self._inner = []
        for k, r in enumerate(self.regions):
            if r.is_empty:
                self._win.append(None)
                self._closed.append(None)
                self._inner.append(None)
                continue
            x0, y0, x1, y1 = r.int_bounds(level)
            i0, i1 = int(np.searchsorted(X, x0)), int(np.searchsorted(X, x1))
            j0, j1 = int(np.searchsorted(Y, y0)), int(np.searchsorted(Y, y1))
            if k < len(upper) and upper[k]:
                if y1 <= 0:
                    self._win.append(None)
                    self._closed.append(None)
                    self._inner.append(None)
                    continue
                # lowest row of the region at or above the axis
                cols = np.nonzero(r.mask.any(axis=0) & (r.ys[1:] > 0))[0]
                ylow = max(int(r.ys[cols[0]]), 0) << (level - r.level)
                j0 = max(int(np.searchsorted(Y, ylow)), self.zero_row)
            m = _resample(r, level, X[i0:i1 + 1], Y[j0:j1 + 1])
            self._win.append((i0, i1, j0, j1))
            self._closed.append(_faces(m))
            self._inner.append(_interior_faces(m))
        b = np.array([w if w is not None else (1, 0, 1, 0) for w in self._win], dtype=np.int64).reshape(-1, 4)
        self._bounds = b

    def __len__(self) -> int:
        return len(self.regions)

    # windows ---------------------------------------------------------------
    def window(self, idx: Sequence[int]):
        ws = [self._win[i] for i in idx]
        if any(w is None for w in ws):
            return None
        I0 = max(w[0] for w in ws)
        I1 = min(w[1] for w in ws)
        J0 = max(w[2] for w in ws)
        J1 = min(w[3] for w in ws)
        if I0 > I1 or J0 > J1:
            return None
        return I0, I1, J0, J1

    @staticmethod
    def _cut(faces, own, win):
        """Faces of one region over ``win``; parts of ``win`` outside ``own`` are empty."""
        i0, i1, j0, j1 = own
        I0, I1, J0, J1 = win
        if i0 <= I0 and I1 <= i1 and j0 <= J0 and J1 <= j1:
            a, b = I0 - i0, I1 - i0
            c, d = J0 - j0, J1 - j0
            cells, v, h, w = faces
            return (cells[a:b, c:d], v[a:b + 1, c:d], h[a:b, c:d + 1], w[a:b + 1, c:d + 1])
        nx, ny = I1 - I0, J1 - J0
        out = [np.zeros((nx, ny), bool), np.zeros((nx + 1, ny), bool),
               np.zeros((nx, ny + 1), bool), np.zeros((nx + 1, ny + 1), bool)]
        A0, A1, B0, B1 = max(I0, i0), min(I1, i1), max(J0, j0), min(J1, j1)
        if A0 > A1 or B0 > B1:
            return tuple(out)
        src = Lattice._cut(faces, own, (A0, A1, B0, B1))
        a, b, c, d = A0 - I0, A1 - I0, B0 - J0, B1 - J0
        out[0][a:b, c:d] = src[0]
        out[1][a:b + 1, c:d] = src[1]
        out[2][a:b, c:d + 1] = src[2]
        out[3][a:b + 1, c:d + 1] = src[3]
        return tuple(out)

    def _ps(self, faces, win) -> PointSet:
        I0, I1, J0, J1 = win
        return PointSet(self.level, self.X[I0:I1 + 1], self.Y[J0:J1 + 1], *faces)

    def closed(self, i: int, win=None) -> PointSet:
        win = win or self._win[i]
        return self._ps(self._cut(self._closed[i], self._win[i], win), win)

    def interior(self, i: int, win=None) -> PointSet:
        win = win or self._win[i]
        return self._ps(self._cut(self._inner[i], self._win[i], win), win)

    def boundary(self, i: int, win=None) -> PointSet:
        win = win or self._win[i]
        c = self._cut(self._closed[i], self._win[i], win)
        n = self._cut(self._inner[i], self._win[i], win)
        return self._ps(tuple(a & ~b for a, b in zip(c, n)), win)

    def intersect(self, idx: Sequence[int], win=None) -> PointSet | None:
        """Exact closed intersection, or None when the windows do not overlap."""
        win = win or self.window(idx)
        if win is None:
            return None
        out = None
        for i in idx:
            f = self._cut(self._closed[i], self._win[i], win)
            out = f if out is None else tuple(a & b for a, b in zip(out, f))
        return self._ps(out, win)

    def embed(self, ps: PointSet, win, into) -> PointSet:
        """Place ``ps`` (on window ``win``) into the larger window ``into``."""
        I0, I1, J0, J1 = into
        a, b, c, d = win[0] - I0, win[1] - I0, win[2] - J0, win[3] - J0
        nx, ny = I1 - I0, J1 - J0
        out = [np.zeros((nx, ny), bool), np.zeros((nx + 1, ny), bool),
               np.zeros((nx, ny + 1), bool), np.zeros((nx + 1, ny + 1), bool)]
        out[0][a:b, c:d] = ps.cells
        out[1][a:b + 1, c:d] = ps.vedges
        out[2][a:b, c:d + 1] = ps.hedges
        out[3][a:b + 1, c:d + 1] = ps.verts
        return self._ps(tuple(out), into)

    def uncovered(self, k: int, among: Sequence[int]) -> PointSet:
        """Faces of closed region k that lie in the interior of none of ``among``."""
        win = self._win[k]
        rest = [a.copy() for a in self._closed[k]]
        for i in among:
            w = self._win[i]
            if w is None:
                continue
            ov = (max(w[0], win[0]), min(w[1], win[1]), max(w[2], win[2]), min(w[3], win[3]))
            if ov[0] > ov[1] or ov[2] > ov[3]:
                continue
            src = self._cut(self._inner[i], w, ov)
            a, b, c, d = ov[0] - win[0], ov[1] - win[0], ov[2] - win[2], ov[3] - win[2]
            rest[0][a:b, c:d] &= ~src[0]
            rest[1][a:b + 1, c:d] &= ~src[1]
            rest[2][a:b, c:d + 1] &= ~src[2]
            rest[3][a:b + 1, c:d + 1] &= ~src[3]
        return self._ps(tuple(rest), win)

    # candidate tuples ------------------------------------------------------------
    def overlapping_pairs(self, among: Sequence[int] | None = None) -> list[tuple[int, int]]:
        idx = np.arange(len(self.regions)) if among is None else np.asarray(among)
        if len(idx) < 2:
            return []
        b = self._bounds[idx]
        ok = ((np.maximum(b[:, None, 0], b[None, :, 0]) <= np.minimum(b[:, None, 1], b[None, :, 1]))
              & (np.maximum(b[:, None, 2], b[None, :, 2]) <= np.minimum(b[:, None, 3], b[None, :, 3])))
        ii, jj = np.nonzero(np.triu(ok, 1))
        return [(int(idx[a]), int(idx[c])) for a, c in zip(ii, jj)]

    def nerve(self, max_dim: int = 4, among: Sequence[int] | None = None):
        """Nonempty intersections up to ``max_dim`` sets: dict tuple -> PointSet."""
        out: dict[tuple[int, ...], PointSet] = {}
        adj: dict[int, set[int]] = {i: set() for i in (range(len(self)) if among is None else among)}
        for a, b in self.overlapping_pairs(among):
            ps = self.intersect([a, b])
            if ps is not None and not ps.is_empty():
                out[(a, b)] = ps
                adj[a].add(b)
                adj[b].add(a)
        frontier = [k for k in out if len(k) == 2]
        for size in range(3, max_dim + 1):
            nxt = []
            for key in frontier:
                common = set.intersection(*(adj[i] for i in key))
                for c in sorted(common):
                    if c <= key[-1]:
                        continue
                    tup = key + (c,)
                    ps = self.intersect(list(tup))
                    if ps is not None and not ps.is_empty():
                        out[tup] = ps
                        nxt.append(tup)
            frontier = nxt
        return out, adj

    # points --------------------------------------------------------------------
    def vertex_index(self, x, y) -> tuple[int, int] | None:
        xi, yi = at_level(x, self.level), at_level(y, self.level)
        i = int(np.searchsorted(self.X, xi))
        j = int(np.searchsorted(self.Y, yi))
        if i < len(self.X) and j < len(self.Y) and self.X[i] == xi and self.Y[j] == yi:
            return i, j
        return None

    def holds_vertex(self, r: int, ij: tuple[int, int], interior: bool = False) -> bool:
        w = self._win[r]
        if w is None:
            return False
        i, j = ij
        if not (w[0] <= i <= w[1] and w[2] <= j <= w[3]):
            return False
        faces = self._inner[r] if interior else self._closed[r]
        return bool(faces[3][i - w[0], j - w[2]])

    def coord(self, i: int, j: int) -> tuple[Fraction, Fraction]:
        d = 1 << self.level
        return Fraction(int(self.X[i]), d), Fraction(int(self.Y[j]), d)


def interior_hosts(regions: Sequence[Region], hosts: Sequence[Region]) -> list[list[int]]:
    """For each region, the indices of hosts whose interior contains it.

    A compact region lies in the interior of a host exactly when it misses
    the closed complement of the host.
    """
    live = [r for r in list(regions) + list(hosts) if not r.is_empty]
    if not live:
        return [[] for _ in regions]
    lv = max(r.level for r in live)
    d = 1 << lv
    x0 = min(r.int_bounds(lv)[0] for r in live) - d
    y0 = min(r.int_bounds(lv)[1] for r in live) - d
    x1 = max(r.int_bounds(lv)[2] for r in live) + d
    y1 = max(r.int_bounds(lv)[3] for r in live) + d
    frame = Region(lv, [x0, x1], [y0, y1], [[True]])
    from .geometry import difference
    comps = [difference(frame, h) for h in hosts]
    lat = Lattice(list(regions) + comps, symmetric=False)
    n = len(regions)
    out = []
    for i, r in enumerate(regions):
        if r.is_empty:
            out.append(list(range(len(hosts))))
            continue
        mine = []
        for m in range(len(hosts)):
            if comps[m].is_empty:
                mine.append(m)
                continue
            ps = lat.intersect([i, n + m])
            if ps is None or ps.is_empty():
                mine.append(m)
        out.append(mine)
    return out
