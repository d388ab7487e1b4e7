"""Exact rectilinear planar sets with dyadic vertices.

A :class:`Region` is a closed set that is a finite union of axis-parallel
rectangles.  It is stored on a coordinate-compressed grid: sorted integer
grid lines ``xs``/``ys`` at a dyadic ``level`` (coordinate = n / 2**level)
and a boolean ``mask`` of grid cells.  The canonical form keeps only the
grid lines across which the mask changes and the coarsest level that
represents every line, so equality of regions is equality of arrays.

Lower-dimensional information (shared edges, vertices) is handled by
:class:`PointSet`, which records every open face (cell, edge, vertex) of a
common grid that a closed set contains.  Intersections of closed regions
are then exact, face by face.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from .dyadic import DEFAULT_PRECISION, at_level, check_budget, dyadic, exponent

_EIGHT = np.ones((3, 3), dtype=bool)
_FOUR = ndimage.generate_binary_structure(2, 1)


def _scale(arr: np.ndarray, src: int, dst: int) -> np.ndarray:
    if dst < src:
        raise ValueError("cannot coarsen coordinates")
    return np.asarray(arr, dtype=np.int64) << (dst - src)


class Region:
    """Closed rectilinear set, immutable, always in canonical form."""

    __slots__ = ("level", "xs", "ys", "mask", "_key")

    def __init__(self, level: int, xs, ys, mask):
        level, xs, ys, mask = _canonical(int(level), np.asarray(xs, dtype=np.int64),
                                         np.asarray(ys, dtype=np.int64), np.asarray(mask, dtype=bool))
        xs.setflags(write=False)
        ys.setflags(write=False)
        mask.setflags(write=False)
        self.level = level
        self.xs = xs
        self.ys = ys
        self.mask = mask
        self._key = (level, xs.tobytes(), ys.tobytes(), mask.shape, np.packbits(mask).tobytes())

    # construction -------------------------------------------------------
    @classmethod
    def empty(cls) -> "Region":
        return cls(0, [], [], np.zeros((0, 0), dtype=bool))

    @classmethod
    def from_rects(cls, rects: Iterable[Sequence], level: int | None = None) -> "Region":
        """Union of closed rectangles ``(x0, y0, x1, y1)`` given as dyadic numbers."""
        rects = [tuple(dyadic(v) for v in r) for r in rects]
        rects = [r for r in rects if r[0] < r[2] and r[1] < r[3]]
        if not rects:
            return cls.empty()
        if level is None:
            level = max(exponent(v) for r in rects for v in r)
        arr = np.array([[at_level(v, level) for v in r] for r in rects], dtype=np.int64)
        return _union_of_int_rects(arr, level)

    @classmethod
    def box(cls, x0, y0, x1, y1) -> "Region":
        return cls.from_rects([(x0, y0, x1, y1)])

    @classmethod
    def from_cells(cls, cells: Iterable[tuple[int, int]], level: int) -> "Region":
        """Union of unit cells ``[i, i+1] x [j, j+1]`` at ``level``."""
        cells = list(cells)
        if not cells:
            return cls.empty()
        arr = np.array([(i, j, i + 1, j + 1) for i, j in cells], dtype=np.int64)
        return _union_of_int_rects(arr, level)

    # basic queries ---------------------------------------------------------
    def __eq__(self, other) -> bool:
        return isinstance(other, Region) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        if self.is_empty:
            return "Region(empty)"
        x0, y0, x1, y1 = self.bounds
        return f"Region(level={self.level}, bounds=({x0}, {y0}, {x1}, {y1}), cells={int(self.mask.sum())})"

    @property
    def is_empty(self) -> bool:
        return self.mask.size == 0

    @property
    def bounds(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        d = 1 << self.level
        return (Fraction(int(self.xs[0]), d), Fraction(int(self.ys[0]), d),
                Fraction(int(self.xs[-1]), d), Fraction(int(self.ys[-1]), d))

    def int_bounds(self, level: int) -> tuple[int, int, int, int]:
        s = level - self.level
        return (int(self.xs[0]) << s, int(self.ys[0]) << s, int(self.xs[-1]) << s, int(self.ys[-1]) << s)

    def rects(self, level: int | None = None) -> np.ndarray:
        """Grid cells of the compressed grid as integer rectangles ``(x0, y0, x1, y1)``."""
        level = self.level if level is None else level
        if self.is_empty:
            return np.zeros((0, 4), dtype=np.int64)
        xs = _scale(self.xs, self.level, level)
        ys = _scale(self.ys, self.level, level)
        ii, jj = np.nonzero(self.mask)
        return np.stack([xs[ii], ys[jj], xs[ii + 1], ys[jj + 1]], axis=1)

    def fraction_rects(self) -> list[tuple[Fraction, Fraction, Fraction, Fraction]]:
        d = 1 << self.level
        return [tuple(Fraction(int(v), d) for v in r) for r in self.rects()]

    @property
    def area(self) -> Fraction:
        if self.is_empty:
            return Fraction(0)
        r = self.rects()
        total = int(((r[:, 2] - r[:, 0]) * (r[:, 3] - r[:, 1])).sum())
        return Fraction(total, 1 << (2 * self.level))

    @property
    def n_cells(self) -> int:
        return int(self.mask.sum())

    def meets_real(self) -> bool:
        """True when the closed set meets the real axis y = 0."""
        if self.is_empty:
            return False
        ii, jj = np.nonzero(self.mask)
        return bool(np.any((self.ys[jj] <= 0) & (self.ys[jj + 1] >= 0)))

    def crosses_real(self) -> bool:
        """True when the interior of the set meets y = 0."""
        if self.is_empty:
            return False
        ii, jj = np.nonzero(self.mask)
        if np.any((self.ys[jj] < 0) & (self.ys[jj + 1] > 0)):
            return True
        # cells stacked on the axis share an edge that lies in the interior
        j = int(np.searchsorted(self.ys, 0))
        if j == 0 or j >= len(self.ys) - 1 or self.ys[j] != 0:
            return False
        return bool(np.any(self.mask[:, j - 1] & self.mask[:, j]))

    def upper(self) -> "Region":
        """Part in the closed upper half-plane."""
        if self.is_empty:
            return self
        k = int(np.searchsorted(self.ys, 0, side="right"))   # first line above the axis
        if k == 0:
            return self
        if k >= len(self.ys):
            return Region.empty()
        ys = np.concatenate([[0], self.ys[k:]])
        return Region(self.level, self.xs, ys, self.mask[:, k - 1:])

    def lower(self) -> "Region":
        return reflect(reflect(self).upper())

    def is_symmetric(self) -> bool:
        # canonical forms are unique, so compare against the mirrored arrays
        return bool(np.array_equal(self.ys, -self.ys[::-1]) and np.array_equal(self.mask, self.mask[:, ::-1]))

    def contains(self, other: "Region") -> bool:
        """``other`` is a subset of ``self``."""
        return difference(other, self).is_empty

    def contains_in_interior(self, other: "Region") -> bool:
        """``other`` is a subset of the (topological) interior of ``self``."""
        if other.is_empty:
            return True
        if self.is_empty:
            return False
        level, X, Y, (m_self, m_other) = _grid([self, other])
        inner = _interior_faces(m_self)
        closed = _faces(m_other)
        return all(not np.any(c & ~i) for c, i in zip(closed, inner))

    def contains_point(self, x, y) -> bool:
        """Closed-set membership of the point (x, y)."""
        if self.is_empty:
            return False
        ps = point_intersection([self], extra_x=[x], extra_y=[y])
        i = int(np.searchsorted(ps.xs, at_level(x, ps.level)))
        j = int(np.searchsorted(ps.ys, at_level(y, ps.level)))
        if i >= len(ps.xs) or j >= len(ps.ys) or ps.xs[i] != at_level(x, ps.level) or ps.ys[j] != at_level(y, ps.level):
            return False
        return bool(ps.verts[i, j])

    def vertices(self) -> list[tuple[Fraction, Fraction]]:
        """Corner points of the compressed cells (a superset of the boundary corners)."""
        d = 1 << self.level
        verts = _faces(self.mask)[3]
        ii, jj = np.nonzero(verts)
        return [(Fraction(int(self.xs[i]), d), Fraction(int(self.ys[j]), d)) for i, j in zip(ii, jj)]

    def diameter_squared(self) -> Fraction:
        """Exact squared Euclidean diameter."""
        if self.is_empty:
            return Fraction(0)
        verts = _faces(self.mask)[3]
        ii, jj = np.nonzero(verts)
        pts = sorted(set(zip(self.xs[ii].tolist(), self.ys[jj].tolist())))
        hull = _convex_hull(pts)
        best = 0
        for a in range(len(hull)):
            ax, ay = hull[a]
            for b in range(a + 1, len(hull)):
                bx, by = hull[b]
                best = max(best, (ax - bx) ** 2 + (ay - by) ** 2)
        return Fraction(best, 1 << (2 * self.level))

    def translate(self, dx, dy) -> "Region":
        dx, dy = dyadic(dx), dyadic(dy)
        level = max(self.level, exponent(dx), exponent(dy))
        return Region(level, _scale(self.xs, self.level, level) + at_level(dx, level),
                      _scale(self.ys, self.level, level) + at_level(dy, level), self.mask)

    def at(self, level: int, xs=None, ys=None) -> np.ndarray:
        """Mask resampled onto a refining grid."""
        return _resample(self, level, xs, ys)


# canonical form ---------------------------------------------------------------
def _canonical(level, xs, ys, mask):
    if mask.size == 0 or not mask.any():
        return 0, np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros((0, 0), dtype=bool)
    rows = np.nonzero(mask.any(axis=1))[0]
    cols = np.nonzero(mask.any(axis=0))[0]
    mask = mask[rows[0]:rows[-1] + 1, cols[0]:cols[-1] + 1]
    xs = xs[rows[0]:rows[-1] + 2]
    ys = ys[cols[0]:cols[-1] + 2]
    # drop interior grid lines across which nothing changes
    keep_x = np.ones(len(xs), dtype=bool)
    if mask.shape[0] > 1:
        same = np.all(mask[1:, :] == mask[:-1, :], axis=1)
        keep_x[1:-1] = ~same
    keep_y = np.ones(len(ys), dtype=bool)
    if mask.shape[1] > 1:
        same = np.all(mask[:, 1:] == mask[:, :-1], axis=0)
        keep_y[1:-1] = ~same
    cell_x = np.nonzero(keep_x[:-1])[0]
    cell_y = np.nonzero(keep_y[:-1])[0]
    mask = mask[np.ix_(cell_x, cell_y)].copy()
    xs = xs[keep_x].copy()
    ys = ys[keep_y].copy()
    while level > 0 and not np.any(xs & 1) and not np.any(ys & 1):
        xs >>= 1
        ys >>= 1
        level -= 1
    return level, xs, ys, mask


def _union_of_int_rects(arr: np.ndarray, level: int) -> Region:
    X = np.unique(np.concatenate([arr[:, 0], arr[:, 2]]))
    Y = np.unique(np.concatenate([arr[:, 1], arr[:, 3]]))
    diff = np.zeros((len(X), len(Y)), dtype=np.int64)
    i0 = np.searchsorted(X, arr[:, 0])
    i1 = np.searchsorted(X, arr[:, 2])
    j0 = np.searchsorted(Y, arr[:, 1])
    j1 = np.searchsorted(Y, arr[:, 3])
    np.add.at(diff, (i0, j0), 1)
    np.add.at(diff, (i1, j0), -1)
    np.add.at(diff, (i0, j1), -1)
    np.add.at(diff, (i1, j1), 1)
    cover = diff.cumsum(axis=0).cumsum(axis=1)[:-1, :-1] > 0
    return Region(level, X, Y, cover)


# common grids -----------------------------------------------------------------
def _resample(r: Region, level: int, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    out = np.zeros((len(X) - 1, len(Y) - 1), dtype=bool)
    if r.is_empty or out.size == 0:
        return out
    xs = _scale(r.xs, r.level, level)
    ys = _scale(r.ys, r.level, level)
    ix = np.searchsorted(xs, X[:-1], side="right") - 1
    iy = np.searchsorted(ys, Y[:-1], side="right") - 1
    vx = np.nonzero((ix >= 0) & (ix < len(xs) - 1))[0]
    vy = np.nonzero((iy >= 0) & (iy < len(ys) - 1))[0]
    if len(vx) and len(vy):
        out[np.ix_(vx, vy)] = r.mask[np.ix_(ix[vx], iy[vy])]
    return out


def _grid(regions: Sequence[Region], extra_x: Iterable = (), extra_y: Iterable = (),
          symmetric: bool = False, level: int | None = None):
    """Common refining grid of several regions (plus optional extra lines)."""
    extra_x = [dyadic(v) for v in extra_x]
    extra_y = [dyadic(v) for v in extra_y]
    if level is None:
        level = max([r.level for r in regions if not r.is_empty] + [exponent(v) for v in extra_x + extra_y] + [0])
    xs_parts = [_scale(r.xs, r.level, level) for r in regions if not r.is_empty]
    ys_parts = [_scale(r.ys, r.level, level) for r in regions if not r.is_empty]
    xs_parts.append(np.array([at_level(v, level) for v in extra_x], dtype=np.int64))
    ys_parts.append(np.array([at_level(v, level) for v in extra_y], dtype=np.int64))
    X = np.unique(np.concatenate(xs_parts)) if xs_parts else np.zeros(0, dtype=np.int64)
    Y = np.unique(np.concatenate(ys_parts)) if ys_parts else np.zeros(0, dtype=np.int64)
    if symmetric and len(Y):
        Y = np.unique(np.concatenate([Y, -Y]))
    if len(X) < 2 or len(Y) < 2:
        X = np.array([0, 1], dtype=np.int64) if len(X) < 2 else X
        Y = np.array([0, 1], dtype=np.int64) if len(Y) < 2 else Y
    return level, X, Y, [_resample(r, level, X, Y) for r in regions]


# faces of a mask --------------------------------------------------------------
def _faces(mask: np.ndarray):
    """Closed-set faces: (cells, vertical edges, horizontal edges, vertices)."""
    nx, ny = mask.shape
    p = np.zeros((nx + 2, ny + 2), dtype=bool)
    p[1:-1, 1:-1] = mask
    v = p[:-1, 1:-1] | p[1:, 1:-1]           # (nx+1, ny)
    h = p[1:-1, :-1] | p[1:-1, 1:]           # (nx, ny+1)
    w = p[:-1, :-1] | p[1:, :-1] | p[:-1, 1:] | p[1:, 1:]  # (nx+1, ny+1)
    return mask.copy(), v, h, w


def _interior_faces(mask: np.ndarray):
    nx, ny = mask.shape
    p = np.zeros((nx + 2, ny + 2), dtype=bool)
    p[1:-1, 1:-1] = mask
    v = p[:-1, 1:-1] & p[1:, 1:-1]
    h = p[1:-1, :-1] & p[1:-1, 1:]
    w = p[:-1, :-1] & p[1:, :-1] & p[:-1, 1:] & p[1:, 1:]
    return mask.copy(), v, h, w


def _from_mask(level, X, Y, mask) -> Region:
    return Region(level, X, Y, mask)


# boolean operations -------------------------------------------------------------
def union(*regions: Region) -> Region:
    regions = [r for r in regions if not r.is_empty]
    if not regions:
        return Region.empty()
    if len(regions) == 1:
        return regions[0]
    level, X, Y, masks = _grid(regions)
    return Region(level, X, Y, np.logical_or.reduce(masks))


def intersect(*regions: Region) -> Region:
    """Regularised intersection (closure of the interior of the intersection)."""
    if any(r.is_empty for r in regions):
        return Region.empty()
    if not _bbox_overlap(regions):
        return Region.empty()
    level, X, Y, masks = _grid(regions)
    return Region(level, X, Y, np.logical_and.reduce(masks))


def difference(a: Region, b: Region) -> Region:
    """Closure of ``a`` minus ``b``."""
    if a.is_empty or b.is_empty:
        return a
    level, X, Y, (ma, mb) = _grid([a, b])
    return Region(level, X, Y, ma & ~mb)


def intersection_parts(a: Region, b: Region) -> tuple[Region, "PointSet"]:
    """Area part of ``a ∩ b`` and the lower-dimensional remainder."""
    ps = point_intersection([a, b])
    return ps.area_region(), ps.lower()


def _bbox_overlap(regions: Sequence[Region]) -> bool:
    level = max(r.level for r in regions)
    bs = [r.int_bounds(level) for r in regions]
    return (max(b[0] for b in bs) <= min(b[2] for b in bs)
            and max(b[1] for b in bs) <= min(b[3] for b in bs))


# reflection and symmetry ---------------------------------------------------------
def reflect(r: Region) -> Region:
    """Image under complex conjugation (x, y) -> (x, -y)."""
    if r.is_empty:
        return r
    return Region(r.level, r.xs, -r.ys[::-1], r.mask[:, ::-1])


def symmetrize(r: Region) -> Region:
    return union(r, reflect(r))


# components, holes, fill -------------------------------------------------------------
def _sort_key(r: Region):
    verts = _faces(r.mask)[3]
    ii, jj = np.nonzero(verts)
    d = 1 << r.level
    pts = sorted(zip(r.xs[ii].tolist(), r.ys[jj].tolist()))
    x, y = pts[0]
    return (Fraction(x, d), Fraction(y, d))


def components(r: Region) -> list[Region]:
    """Connected components of the closed set (corner contact connects)."""
    if r.is_empty:
        return []
    labels, n = ndimage.label(r.mask, structure=_EIGHT)
    if n == 1:
        return [r]
    out = [Region(r.level, r.xs, r.ys, labels == k) for k in range(1, n + 1)]
    return sorted(out, key=_sort_key)


def _complement_labels(mask: np.ndarray):
    p = np.zeros((mask.shape[0] + 2, mask.shape[1] + 2), dtype=bool)
    p[1:-1, 1:-1] = ~mask
    p[0, :] = p[-1, :] = p[:, 0] = p[:, -1] = True
    labels, n = ndimage.label(p, structure=_FOUR)
    outside = labels[0, 0]
    return labels[1:-1, 1:-1], n, outside


def holes(r: Region) -> list[Region]:
    """Closures of the bounded components of the complement."""
    if r.is_empty:
        return []
    labels, n, outside = _complement_labels(r.mask)
    out = [Region(r.level, r.xs, r.ys, labels == k) for k in range(1, n + 1) if k != outside]
    out = [h for h in out if not h.is_empty]
    return sorted(out, key=_sort_key)


def fill(r: Region) -> Region:
    """The set together with all bounded components of its complement."""
    if r.is_empty:
        return r
    labels, n, outside = _complement_labels(r.mask)
    return Region(r.level, r.xs, r.ys, r.mask | ((labels != outside) & (labels > 0)))


def euler_characteristic(r: Region) -> int:
    if r.is_empty:
        return 0
    c, v, h, w = _faces(r.mask)
    return int(w.sum()) - int(v.sum()) - int(h.sum()) + int(c.sum())


def _pinch_count(mask: np.ndarray) -> int:
    p = np.zeros((mask.shape[0] + 2, mask.shape[1] + 2), dtype=bool)
    p[1:-1, 1:-1] = mask
    a, b, c, d = p[:-1, :-1], p[1:, :-1], p[:-1, 1:], p[1:, 1:]
    diag1 = a & d & ~b & ~c
    diag2 = b & c & ~a & ~d
    return int(diag1.sum() + diag2.sum())


def is_disc(r: Region) -> bool:
    """Closed topological disc: connected 2-manifold with boundary and χ = 1."""
    if r.is_empty:
        return False
    _, n = ndimage.label(r.mask, structure=_EIGHT)
    return n == 1 and _pinch_count(r.mask) == 0 and euler_characteristic(r) == 1


def is_regular(r: Region) -> bool:
    """Cell unions are always the closure of their interior; pinches are allowed."""
    return True


# offsets and distances ------------------------------------------------------------
def offset(r: Region, eps, precision: int = DEFAULT_PRECISION) -> Region:
    """Minkowski sum with the closed square [-eps, eps]^2."""
    eps = dyadic(eps)
    if eps <= 0:
        raise ValueError("offset radius must be positive")
    if r.is_empty:
        raise ValueError("cannot offset an empty region")
    level = max(r.level, exponent(eps))
    check_budget(level, precision)
    e = at_level(eps, level)
    rects = r.rects(level) + np.array([-e, -e, e, e], dtype=np.int64)
    return _union_of_int_rects(rects, level)


def erode(r: Region, eps) -> Region:
    """Points at L∞ distance >= eps from the complement (inner parallel set)."""
    eps = dyadic(eps)
    if r.is_empty:
        return r
    x0, y0, x1, y1 = r.bounds
    pad = eps * 2 + 1
    frame = Region.box(x0 - pad, y0 - pad, x1 + pad, y1 + pad)
    comp = difference(frame, r)
    grown = offset(comp, eps, precision=max(r.level, exponent(eps)) + 1)
    return difference(r, grown)


def distance(a: Region, b: Region) -> Fraction:
    """L∞ distance between two closed regions."""
    if a.is_empty or b.is_empty:
        raise ValueError("distance to an empty region is undefined")
    level = max(a.level, b.level)
    ra, rb = a.rects(level), b.rects(level)
    best = None
    chunk = max(1, 200000 // max(1, len(rb)))
    for s in range(0, len(ra), chunk):
        A = ra[s:s + chunk, None, :]
        dx = np.maximum(0, np.maximum(A[..., 0] - rb[None, :, 2], rb[None, :, 0] - A[..., 2]))
        dy = np.maximum(0, np.maximum(A[..., 1] - rb[None, :, 3], rb[None, :, 1] - A[..., 3]))
        m = int(np.maximum(dx, dy).min())
        best = m if best is None else min(best, m)
    return Fraction(best, 1 << level)


def _convex_hull(pts):
    if len(pts) <= 2:
        return list(pts)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


# lower-dimensional sets --------------------------------------------------------------
@dataclass(frozen=True)
class PointSet:
    """A closed subset of the plane that is a union of open faces of a grid.

    ``cells[i, j]`` is the open cell ``(X[i], X[i+1]) x (Y[j], Y[j+1])``,
    ``vedges[i, j]`` the open vertical edge on ``x = X[i]`` over ``(Y[j], Y[j+1])``,
    ``hedges[i, j]`` the open horizontal edge on ``y = Y[j]`` over ``(X[i], X[i+1])``
    and ``verts[i, j]`` the point ``(X[i], Y[j])``.
    """

    level: int
    xs: np.ndarray
    ys: np.ndarray
    cells: np.ndarray
    vedges: np.ndarray
    hedges: np.ndarray
    verts: np.ndarray

    @property
    def faces(self):
        return (self.cells, self.vedges, self.hedges, self.verts)

    def _with(self, faces) -> "PointSet":
        return PointSet(self.level, self.xs, self.ys, *faces)

    def __and__(self, other: "PointSet") -> "PointSet":
        return self._with(tuple(a & b for a, b in zip(self.faces, other.faces)))

    def __or__(self, other: "PointSet") -> "PointSet":
        return self._with(tuple(a | b for a, b in zip(self.faces, other.faces)))

    def minus(self, other: "PointSet") -> "PointSet":
        """Faces of ``self`` not in ``other`` (not closed in general)."""
        return self._with(tuple(a & ~b for a, b in zip(self.faces, other.faces)))

    def is_empty(self) -> bool:
        return not any(f.any() for f in self.faces)

    def has_area(self) -> bool:
        return bool(self.cells.any())

    def area_region(self) -> Region:
        return Region(self.level, self.xs, self.ys, self.cells)

    def lower(self) -> "PointSet":
        """Faces not contained in the closure of the 2-dimensional part."""
        closed = _faces(self.cells)
        return self._with((np.zeros_like(self.cells),) + tuple(
            a & ~c for a, c in zip(self.faces[1:], closed[1:])))

    def reflect(self) -> "PointSet":
        if not np.array_equal(self.ys, -self.ys[::-1]):
            raise ValueError("reflection needs a symmetric grid")
        return self._with(tuple(f[:, ::-1] for f in self.faces))

    def is_symmetric(self) -> bool:
        return all(np.array_equal(a, b) for a, b in zip(self.faces, self.reflect().faces))

    def _zero_row(self) -> int | None:
        j = int(np.searchsorted(self.ys, 0))
        return j if j < len(self.ys) and self.ys[j] == 0 else None

    def meets_real(self) -> bool:
        j = self._zero_row()
        if j is not None:
            return bool(self.verts[:, j].any() or self.hedges[:, j].any())
        # no grid line on the axis: a cell or vertical edge must straddle it
        k = int(np.searchsorted(self.ys, 0)) - 1
        if k < 0 or k >= len(self.ys) - 1:
            return False
        return bool(self.cells[:, k].any() or self.vedges[:, k].any())

    def real_points(self) -> tuple[list[Fraction], int]:
        """Isolated points on the axis and the number of axis segments."""
        j = self._zero_row()
        if j is None:
            raise ValueError("grid has no line on the real axis")
        d = 1 << self.level
        seg = self.hedges[:, j]
        pts = []
        for i in np.nonzero(self.verts[:, j])[0]:
            left = i > 0 and seg[i - 1]
            right = i < len(seg) and seg[i]
            if not left and not right:
                pts.append(Fraction(int(self.xs[i]), d))
        runs = int(np.count_nonzero(np.diff(np.concatenate([[0], seg.astype(np.int8), [0]])) == 1))
        return pts, runs

    def points(self) -> list[tuple[Fraction, Fraction]]:
        d = 1 << self.level
        ii, jj = np.nonzero(self.verts)
        return [(Fraction(int(self.xs[i]), d), Fraction(int(self.ys[j]), d)) for i, j in zip(ii, jj)]

    def graph_components(self) -> list["Piece"]:
        """Connected pieces of the 1-dimensional part (requires no cells)."""
        if self.cells.any():
            raise ValueError("set has 2-dimensional part")
        return _graph_pieces(self)


@dataclass(frozen=True)
class Piece:
    """A connected component of a 1-dimensional face set."""

    vertices: tuple[tuple[int, int], ...]   # grid indices
    n_edges: int
    max_degree: int
    level: int
    coords: tuple[tuple[Fraction, Fraction], ...]
    endpoints: tuple[tuple[Fraction, Fraction], ...]

    @property
    def is_point(self) -> bool:
        return self.n_edges == 0

    @property
    def is_arc(self) -> bool:
        """Embedded arc with at least one edge."""
        return self.n_edges >= 1 and self.n_edges == len(self.vertices) - 1 and self.max_degree <= 2

    @property
    def is_closed_curve(self) -> bool:
        return self.n_edges >= 4 and self.n_edges == len(self.vertices) and self.max_degree == 2

    def lies_above(self) -> bool:
        return all(y > 0 for _, y in self.coords)

    def lies_below(self) -> bool:
        return all(y < 0 for _, y in self.coords)


def _graph_pieces(ps: PointSet) -> list[Piece]:
    nvx, nvy = ps.verts.shape
    vi, vj = np.nonzero(ps.verts)
    n = len(vi)
    if n == 0:
        return []
    vid = -np.ones((nvx, nvy), dtype=np.int64)
    vid[vi, vj] = np.arange(n)
    ei, ej = np.nonzero(ps.vedges)        # (X[i], Y[j]) -- (X[i], Y[j+1])
    hi, hj = np.nonzero(ps.hedges)        # (X[i], Y[j]) -- (X[i+1], Y[j])
    r = np.concatenate([vid[ei, ej], vid[hi, hj]])
    c = np.concatenate([vid[ei, ej + 1], vid[hi + 1, hj]])
    if np.any(r < 0) or np.any(c < 0):
        raise ValueError("face set is not closed")
    # union-find; these graphs are small
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in zip(r.tolist(), c.tolist()):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    lab = np.array([find(a) for a in range(n)], dtype=np.int64)
    deg = np.bincount(np.concatenate([r, c]), minlength=n)
    edge_lab = lab[r] if len(r) else np.zeros(0, dtype=np.int64)
    d = 1 << ps.level
    out = []
    for k in np.unique(lab).tolist():
        members = np.nonzero(lab == k)[0]
        verts = tuple((int(vi[m]), int(vj[m])) for m in members)
        coords = tuple((Fraction(int(ps.xs[i]), d), Fraction(int(ps.ys[j]), d)) for i, j in verts)
        ends = tuple(coords[t] for t, m in enumerate(members) if deg[m] == 1)
        out.append(Piece(verts, int(np.count_nonzero(edge_lab == k)),
                         int(deg[members].max()), ps.level, coords, ends))
    out.sort(key=lambda p: min(p.coords))
    return out


class FaceGrid:
    """A common grid on which several regions are compared face by face."""

    def __init__(self, regions: Sequence[Region], extra_x: Iterable = (), extra_y: Iterable = (),
                 symmetric: bool = False, real_line: bool = False, level: int | None = None):
        extra_y = list(extra_y) + ([0] if real_line else [])
        self.level, self.xs, self.ys, masks = _grid(regions, extra_x, extra_y, symmetric, level)
        self._masks = {id(r): m for r, m in zip(regions, masks)}
        self._regions = list(regions)

    def mask(self, r: Region) -> np.ndarray:
        m = self._masks.get(id(r))
        if m is None:
            m = _resample(r, self.level, self.xs, self.ys)
        return m

    def _ps(self, faces) -> PointSet:
        return PointSet(self.level, self.xs, self.ys, *faces)

    def closed(self, r: Region) -> PointSet:
        return self._ps(_faces(self.mask(r)))

    def interior(self, r: Region) -> PointSet:
        return self._ps(_interior_faces(self.mask(r)))

    def boundary(self, r: Region) -> PointSet:
        c = _faces(self.mask(r))
        i = _interior_faces(self.mask(r))
        return self._ps(tuple(a & ~b for a, b in zip(c, i)))

    def empty(self) -> PointSet:
        nx, ny = len(self.xs) - 1, len(self.ys) - 1
        z = np.zeros
        return self._ps((z((nx, ny), bool), z((nx + 1, ny), bool), z((nx, ny + 1), bool), z((nx + 1, ny + 1), bool)))

    def index_of(self, x, y) -> tuple[int, int] | None:
        xi, yi = at_level(x, self.level), at_level(y, self.level)
        i = int(np.searchsorted(self.xs, xi))
        j = int(np.searchsorted(self.ys, yi))
        if i < len(self.xs) and j < len(self.ys) and self.xs[i] == xi and self.ys[j] == yi:
            return i, j
        return None

    def point_face(self, x, y) -> tuple[str, int, int]:
        """The open face containing the point (x, y), which must lie inside the grid."""
        xi, yi = at_level(x, self.level), at_level(y, self.level)
        i = int(np.searchsorted(self.xs, xi, side="right")) - 1
        j = int(np.searchsorted(self.ys, yi, side="right")) - 1
        if i < 0 or j < 0 or i >= len(self.xs) or j >= len(self.ys):
            return ("outside", -1, -1)
        on_x = self.xs[i] == xi
        on_y = self.ys[j] == yi
        if on_x and on_y:
            return ("vert", i, j)
        if i == len(self.xs) - 1 or j == len(self.ys) - 1:
            return ("outside", -1, -1)
        if on_x:
            return ("vedge", i, j)
        if on_y:
            return ("hedge", i, j)
        return ("cell", i, j)


def point_in(ps: PointSet, face: tuple[str, int, int]) -> bool:
    kind, i, j = face
    if kind == "outside":
        return False
    arr = {"cell": ps.cells, "vedge": ps.vedges, "hedge": ps.hedges, "vert": ps.verts}[kind]
    return bool(arr[i, j])


def point_intersection(regions: Sequence[Region], extra_x: Iterable = (), extra_y: Iterable = (),
                       symmetric: bool = False, real_line: bool = False) -> PointSet:
    """Exact intersection of closed regions, including edges and isolated points."""
    g = FaceGrid(regions, extra_x, extra_y, symmetric=symmetric, real_line=real_line)
    out = None
    for r in regions:
        f = g.closed(r)
        out = f if out is None else out & f
    return out


# boundary rings ------------------------------------------------------------------
_DIRS = {(1, 0): 0, (0, 1): 1, (-1, 0): 2, (0, -1): 3}


def to_rings(r: Region) -> list[list[tuple[Fraction, Fraction]]]:
    """Boundary rings with the region on the left (outer rings counter-clockwise).

    At a pinch vertex the trace turns left, so rings never cross themselves.
    """
    if r.is_empty:
        return []
    m = r.mask
    nx, ny = m.shape
    p = np.zeros((nx + 2, ny + 2), dtype=bool)
    p[1:-1, 1:-1] = m
    out_edges: dict[tuple[int, int], list[tuple[int, int]]] = {}

    def add(a, b):
        out_edges.setdefault(a, []).append(b)

    # horizontal edges on line j between columns i, i+1 (vertex indices)
    below = p[1:-1, :-1]
    above = p[1:-1, 1:]
    for i, j in zip(*np.nonzero(above & ~below)):
        add((i, j), (i + 1, j))
    for i, j in zip(*np.nonzero(below & ~above)):
        add((i + 1, j), (i, j))
    left = p[:-1, 1:-1]
    right = p[1:, 1:-1]
    for i, j in zip(*np.nonzero(left & ~right)):
        add((i, j), (i, j + 1))
    for i, j in zip(*np.nonzero(right & ~left)):
        add((i, j + 1), (i, j))
    used: set[tuple] = set()
    rings = []
    for start in sorted(out_edges):
        for nxt in sorted(out_edges[start]):
            if (start, nxt) in used:
                continue
            ring = [start]
            a, b = start, nxt
            while True:
                used.add((a, b))
                ring.append(b)
                d_in = (b[0] - a[0], b[1] - a[1])
                cands = [c for c in out_edges[b] if (b, c) not in used]
                if not cands:
                    break
                # prefer the left turn, then straight, then right
                def turn(c):
                    d_out = (c[0] - b[0], c[1] - b[1])
                    return (_DIRS[d_out] - _DIRS[d_in]) % 4
                order = {1: 0, 0: 1, 3: 2, 2: 3}
                c = min(cands, key=lambda c: order[turn(c)])
                a, b = b, c
                if a == start and b == nxt:
                    break
            if ring[-1] == ring[0]:
                ring = ring[:-1]
            rings.append(_merge_collinear(ring))
    d = 1 << r.level
    return [[(Fraction(int(r.xs[i]), d), Fraction(int(r.ys[j]), d)) for i, j in ring] for ring in rings]


def _merge_collinear(ring):
    n = len(ring)
    keep = []
    for k in range(n):
        a, b, c = ring[k - 1], ring[k], ring[(k + 1) % n]
        if (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]) != 0:
            keep.append(b)
    # start at the lowest-leftmost vertex for a deterministic form
    s = min(range(len(keep)), key=lambda k: (keep[k][0], keep[k][1]))
    return keep[s:] + keep[:s]


def from_rings(rings: Sequence[Sequence[tuple]]) -> Region:
    """Even-odd fill of closed rectilinear rings."""
    pts = [(dyadic(x), dyadic(y)) for ring in rings for x, y in ring]
    if not pts:
        return Region.empty()
    level = max(max(exponent(x), exponent(y)) for x, y in pts)
    X = np.unique([at_level(x, level) for x, _ in pts])
    Y = np.unique([at_level(y, level) for _, y in pts])
    parity = np.zeros((len(X), len(Y) - 1), dtype=np.int8)
    for ring in rings:
        ring = [(at_level(x, level), at_level(y, level)) for x, y in ring]
        for (x0, y0), (x1, y1) in zip(ring, ring[1:] + ring[:1]):
            if x0 == x1 and y0 != y1:
                i = int(np.searchsorted(X, x0))
                ja, jb = sorted((int(np.searchsorted(Y, y0)), int(np.searchsorted(Y, y1))))
                parity[i, ja:jb] ^= 1
            elif x0 != x1 and y0 != y1:
                raise ValueError("ring edges must be axis-parallel")
    inside = (np.cumsum(parity, axis=0) % 2).astype(bool)[:-1]
    return Region(level, X, Y, inside)


def region_to_json(r: Region) -> dict:
    from .dyadic import split

    def enc(x, y):
        xn, xe = split(x)
        yn, ye = split(y)
        return [xn, xe, yn, ye]

    return {"rings": [[enc(x, y) for x, y in ring] for ring in to_rings(r)]}


def region_from_json(obj: dict) -> Region:
    from .dyadic import join

    if not isinstance(obj, dict) or not isinstance(obj.get("rings"), list):
        raise ValueError("region must be an object with a 'rings' list")
    rings = []
    for ring in obj["rings"]:
        pts = []
        for v in ring:
            if not (isinstance(v, list) and len(v) == 4 and all(isinstance(t, int) for t in v)):
                raise ValueError(f"bad ring vertex {v!r}")
            pts.append((join(v[0], v[1]), join(v[2], v[3])))
        if len(pts) < 4:
            raise ValueError("a ring needs at least four vertices")
        rings.append(pts)
    return from_rings(rings)


# classification --------------------------------------------------------------------
@dataclass(frozen=True)
class Classification:
    meets_real: bool
    kind: str
    open_basic: bool
    closed_basic: bool
    symmetric: bool
    regular: bool = True

    def as_dict(self) -> dict:
        return {"meets_real": self.meets_real, "kind": self.kind, "open_basic": self.open_basic,
                "closed_basic": self.closed_basic, "symmetric": self.symmetric, "regular": self.regular}


def _open_components(r: Region) -> list[np.ndarray]:
    labels, n = ndimage.label(r.mask, structure=_FOUR)
    return [labels == k for k in range(1, n + 1)]


def _simply_connected_open(mask: np.ndarray) -> bool:
    p = np.ones((mask.shape[0] + 2, mask.shape[1] + 2), dtype=bool)
    p[1:-1, 1:-1] = ~mask
    _, n = ndimage.label(p, structure=_EIGHT)
    return n == 1


def _mask_disc(mask: np.ndarray) -> bool:
    if _pinch_count(mask):
        return False
    c, v, h, w = _faces(mask)
    return int(w.sum()) - int(v.sum()) - int(h.sum()) + int(c.sum()) == 1


def is_closed_basic(r: Region) -> bool:
    """Closed basic slice trace; the empty set counts as basic.

    A connected symmetric set that misses the axis cannot exist, so a
    symmetric set with two components off the axis is a mirror pair.
    """
    if r.is_empty:
        return True
    if not r.is_symmetric():
        return False
    labels, n = ndimage.label(r.mask, structure=_EIGHT)
    if n != (1 if r.meets_real() else 2):
        return False
    if n == 1:
        return _mask_disc(r.mask)
    return all(_mask_disc(labels == k) for k in (1, 2))


def is_open_basic(r: Region) -> bool:
    """Interior of ``r`` is an open basic slice trace."""
    if r.is_empty:
        return True
    comps = _open_components(r)
    if not all(_simply_connected_open(c) for c in comps):
        return False
    if not r.is_symmetric():
        return False
    if len(comps) == 1:
        return True
    if len(comps) != 2:
        return False
    a = Region(r.level, r.xs, r.ys, comps[0])
    b = Region(r.level, r.xs, r.ys, comps[1])
    return not a.crosses_real() and reflect(a) == b


def classify(r: Region) -> Classification:
    if r.is_empty:
        raise ValueError("classify needs a nonempty region")
    meets = r.meets_real()
    return Classification(meets_real=meets, kind="slice" if meets else "product",
                          open_basic=is_open_basic(r), closed_basic=is_closed_basic(r),
                          symmetric=r.is_symmetric())


def is_closed_basic_set(ps: PointSet) -> bool:
    """A face set is closed basic when it has no lower-dimensional remainder
    and its area part is closed basic."""
    if ps.is_empty():
        return True
    if not ps.lower().is_empty():
        return False
    return is_closed_basic(ps.area_region())
