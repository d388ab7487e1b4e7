"""Staggered symmetric brick grids clipped to a region.

Rows are the real band ``|y| <= h0`` and the mirrored strips
``h0 + k*h <= |y| <= h0 + (k+1)*h``.  Vertical cuts in row ``k`` sit at
``sx + (k % 2) * w / 2 + m * w``, so every interior grid vertex is a
T-junction where exactly three bricks meet.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np
from scipy import ndimage
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .. import geometry as geo
from ..dyadic import at_level, exponent
from ..errors import InfeasibleError
from ..geometry import Region


@dataclass(frozen=True)
class Brick:
    region: Region
    row: int          # 0 for the real band, k >= 1 above it
    col: int
    real: bool


def brick_size(delta: Fraction) -> tuple[Fraction, Fraction]:
    """Width and height (w = 2h) of bricks whose diameter stays below ``delta``."""
    # w * sqrt(5)/2 < 0.95 * delta  <=>  w < 0.85 * delta
    cands = []
    e = Fraction(1)
    while e > delta / 1024:
        cands.extend([e, 3 * e / 2])
        e /= 2
    w = max(c for c in cands if c <= Fraction(85, 100) * delta)
    return w, w / 2


def _lines(lo: Fraction, hi: Fraction, start: Fraction, step: Fraction) -> list[Fraction]:
    k0 = (lo - start) // step
    out = []
    v = start + k0 * step
    while v <= hi:
        if v > lo:
            out.append(v)
        v += step
    return out


def layout_lines(region: Region, w: Fraction, h: Fraction, sx: Fraction, h0: Fraction):
    """Row boundaries (y >= 0) and per-row vertical cuts inside the region's box."""
    x0, y0, x1, y1 = region.bounds
    ymax = max(abs(y0), abs(y1))
    rows = [h0]
    while rows[-1] < ymax:
        rows.append(rows[-1] + h)
    cuts = []
    for r in range(len(rows)):
        off = sx + (w / 2 if r % 2 else 0)
        cuts.append(_lines(x0, x1, off, w))
    return rows, cuts


def lines_avoid(region_coords: tuple[set, set], rows, cuts, level: int) -> bool:
    xs_bad, ys_bad = region_coords
    for y in rows:
        if y in ys_bad or -y in ys_bad:
            return False
    for row in cuts:
        for x in row:
            if x in xs_bad:
                return False
    return True


def feature_coords(regions: Iterable[Region], points: Iterable[tuple] = ()) -> tuple[set, set]:
    """All grid-line coordinates of the given regions, plus point coordinates."""
    xs, ys = set(), set()
    for r in regions:
        if r.is_empty:
            continue
        d = 1 << r.level
        xs.update(Fraction(int(v), d) for v in r.xs)
        ys.update(Fraction(int(v), d) for v in r.ys)
    for x, y in points:
        xs.add(Fraction(x))
        ys.add(Fraction(y))
        ys.add(-Fraction(y))
    return xs, ys


def _int_avoids(bounds, w, h, sx, h0, xbad, ybad) -> bool:
    """Integer version of :func:`lines_avoid` (all values at one level)."""
    x0, y0, x1, y1 = bounds
    ymax = max(abs(y0), abs(y1))
    rows = np.arange(h0, ymax + h, h)
    if np.isin(rows, ybad).any() or np.isin(-rows, ybad).any():
        return False
    for off in (sx, sx + w // 2):
        k0 = (x0 - off) // w
        cuts = off + w * np.arange(k0, (x1 - off) // w + 1)
        cuts = cuts[(cuts > x0) & (cuts <= x1)]
        if np.isin(cuts, xbad).any():
            return False
    return True


def choose_shift(region: Region, w: Fraction, h: Fraction, avoid: tuple[set, set],
                 seed: int = 0, tries: int = 256) -> tuple[Fraction, Fraction]:
    """Pick a cut offset and band half-height so no grid line hits a feature coordinate.

    Coarse dyadic offsets are tried first, which keeps the precision of the
    output as low as possible.
    """
    base = max(exponent(w), exponent(h))
    top = max([exponent(v) for v in avoid[0] | avoid[1]] + [base, region.level]) + 2
    L = top
    xbad = np.array(sorted(at_level(v, L) for v in avoid[0]), dtype=np.int64)
    ybad = np.array(sorted(at_level(v, L) for v in avoid[1]), dtype=np.int64)
    bounds = tuple(at_level(v, L) for v in region.bounds)
    wi, hi_ = at_level(w, L), at_level(h, L)
    rng = np.random.default_rng(seed)
    left = tries
    for lvl in range(base + 1, top + 1):
        step = 1 << (L - lvl)
        nx = wi // step
        lo, hi = hi_ // 4 // step, 3 * hi_ // 4 // step
        xs_c = rng.permutation(nx) * step
        ys_c = rng.permutation(np.arange(max(lo, 1), max(hi, lo + 1) + 1)) * step
        for t in range(min(left, len(xs_c) * len(ys_c))):
            sx = int(xs_c[t % len(xs_c)])
            h0 = int(ys_c[(t // len(xs_c) + t) % len(ys_c)])
            if _int_avoids(bounds, wi, hi_, sx, h0, xbad, ybad):
                return Fraction(sx, 1 << L), Fraction(h0, 1 << L)
        left = max(left - len(xs_c) * len(ys_c), 32)
    raise InfeasibleError("no brick offset avoids every feature coordinate", w=str(w))


def brick_tiles(region: Region, w: Fraction, h: Fraction, sx: Fraction, h0: Fraction,
                symmetric: bool = True) -> list[Brick]:
    """Components of the region inside each brick, as symmetric tiles.

    A component crossing the axis becomes one tile; an upper component is
    paired with its mirror image; lower components are skipped.  With
    ``symmetric=False`` the region is assumed to lie in the upper half-plane
    and upper components are returned unpaired.
    """
    if region.is_empty:
        return []
    rows, cuts = layout_lines(region, w, h, sx, h0)
    x0, y0, x1, y1 = region.bounds
    ylines = sorted(set([-v for v in rows] + rows))
    xlines = sorted(set(x for row in cuts for x in row))
    level, X, Y, (m,) = geo._grid([region], xlines, ylines)
    Yf = Y[:-1] + Y[1:]                      # twice the cell centre
    ycen = np.abs(Yf)
    rows_i = np.array([at_level(v, level) * 2 for v in rows], dtype=np.int64)
    row_of = np.searchsorted(rows_i, ycen)   # 0 = band, k = between rows[k-1] and rows[k]
    Xc = X[:-1] + X[1:]
    col = np.zeros(m.shape, dtype=np.int64)
    for r in range(len(rows) + 1):
        sel = row_of == r
        if not sel.any():
            continue
        cut_i = np.array([at_level(v, level) * 2 for v in cuts[min(r, len(cuts) - 1)]], dtype=np.int64)
        col[:, sel] = np.searchsorted(cut_i, Xc)[:, None]
    side = np.sign(Yf).astype(np.int64)
    side[row_of == 0] = 0
    bid = (row_of[None, :] * 2 + (side[None, :] < 0)) * 100000 + col
    labels = _constrained_labels(m, bid)
    out = []
    for k, sl in enumerate(ndimage.find_objects(labels), start=1):
        if sl is None:
            continue
        sub = labels[sl] == k
        i0, i1 = sl[0].start, sl[0].stop
        j0, j1 = sl[1].start, sl[1].stop
        comp = Region(level, X[i0:i1 + 1], Y[j0:j1 + 1], sub)
        lo, hi = comp.bounds[1], comp.bounds[3]
        r = int(row_of[j0])
        c = int(col[i0, j0])
        if lo < 0 < hi:
            out.append(Brick(comp, 0, c, True))
        elif lo >= 0:
            reg = geo.symmetrize(comp) if symmetric else comp
            out.append(Brick(reg, r, c, False))
    out.sort(key=lambda b: (b.row, b.region.bounds[0], b.region.bounds[1]))
    return out


def _constrained_labels(mask: np.ndarray, bid: np.ndarray) -> np.ndarray:
    """8-connected components of ``mask`` that never join cells of different bricks."""
    nx, ny = mask.shape
    idx = -np.ones(mask.shape, dtype=np.int64)
    ii, jj = np.nonzero(mask)
    idx[ii, jj] = np.arange(len(ii))
    n = len(ii)
    rows, cols = [], []
    shifts = (
        (np.s_[:-1, :], np.s_[1:, :]),
        (np.s_[:, :-1], np.s_[:, 1:]),
        (np.s_[:-1, :-1], np.s_[1:, 1:]),
        (np.s_[:-1, 1:], np.s_[1:, :-1]),
    )
    for sa, sb in shifts:
        a, b = idx[sa], idx[sb]
        ok = (a >= 0) & (b >= 0) & (bid[sa] == bid[sb])
        rows.append(a[ok])
        cols.append(b[ok])
    r = np.concatenate(rows) if rows else np.zeros(0, np.int64)
    c = np.concatenate(cols) if cols else np.zeros(0, np.int64)
    g = coo_matrix((np.ones(len(r)), (r, c)), shape=(n, n))
    _, lab = connected_components(g, directed=False)
    out = np.zeros(mask.shape, dtype=np.int64)
    out[ii, jj] = lab + 1
    return out
