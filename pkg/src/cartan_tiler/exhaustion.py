"""Symmetric Runge exhaustions of symmetric planar domains.

A domain is passed as a closed symmetric :class:`Region`; the open set it
stands for is its interior.  Stage ``n >= 1`` is the inner parallel set
``{dist_inf(z, complement) >= 2**-(n + shift)}`` cut to the square of
radius ``2**(n + shift)``.  Stage 0 is either supplied or a small seed square
(or mirror pair of squares) well inside stage 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import geometry as geo
from .dyadic import DEFAULT_PRECISION, check_budget, exponent
from .errors import CartanTilerError
from .geometry import Region


class ExhaustionError(CartanTilerError, ValueError):
    pass


@dataclass(frozen=True)
class Exhaustion:
    domain: Region
    stages: tuple[Region, ...]
    shift: int
    repairs: tuple[int, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.stages)

    def __getitem__(self, n: int) -> Region:
        return self.stages[n]

    def eps(self, n: int) -> Fraction:
        """Erosion radius of stage ``n >= 1``."""
        return Fraction(1, 1 << (n + self.shift))


def _interior_faces_outside(h: Region, domain: Region) -> bool:
    """True when the interior of ``h`` contains a point outside the open domain."""
    g = geo.FaceGrid([h, domain])
    ih = g.interior(h)
    idom = g.interior(domain)
    return not (ih.minus(idom)).is_empty()


def is_runge_in(k: Region, domain: Region) -> bool:
    """No component of ``domain \\ k`` is relatively compact in the domain."""
    if k.is_empty:
        return True
    if not domain.contains_in_interior(k):
        raise ExhaustionError("k is not contained in the open domain")
    return all(_interior_faces_outside(h, domain) for h in geo.holes(k))


def runge_repair(k: Region, domain: Region, width: Fraction | None = None) -> Region:
    """Open every enclosed pocket of ``k`` by carving a symmetric channel upwards.

    The channel runs from the top of the offending hole through the top of
    ``k`` (and mirrored below), so the pocket joins the unbounded component.
    """
    for _ in range(64):
        bad = [h for h in geo.holes(k) if not _interior_faces_outside(h, domain)]
        if not bad:
            return k
        h = bad[0]
        x0, y0, x1, y1 = h.bounds
        w = width if width is not None else min((x1 - x0) / 4, Fraction(1, 1 << (k.level + 1)))
        # a channel from a point inside the hole's upper boundary row
        cells = h.fraction_rects()
        top = max(cells, key=lambda r: (r[3], -r[0]))
        cx = top[0] + (top[2] - top[0]) / 2
        _, _, _, ky1 = k.bounds
        chan = Region.box(cx - w / 2, top[3] - w, cx + w / 2, ky1 + 1)
        k = geo.difference(k, geo.symmetrize(chan))
    raise ExhaustionError("Runge repair did not converge")


def on_boundary(r: Region, p) -> bool:
    x, y = Fraction(p[0]), Fraction(p[1])
    if not r.contains_point(x, y):
        return False
    h = Fraction(1, 1 << (max(r.level, exponent(x), exponent(y)) + 1))
    return not r.contains(Region.box(x - h, y - h, x + h, y + h))


def _seed(k1: Region, meets_real: bool, level: int, within=None, avoid=()) -> Region:
    """Small square (or mirror pair) deep inside ``k1`` and inside one set of ``within``."""
    h = Fraction(1, 1 << level)
    hosts = list(within) if within else [k1]
    for _ in range(40):
        s = _seed_at(k1, meets_real, h, hosts)
        if s is not None and not any(on_boundary(s, p) for p in avoid):
            return s
        h /= 2
    raise ExhaustionError("could not place a seed set")


def _seed_at(k1: Region, meets_real: bool, h: Fraction, hosts) -> Region | None:
    """Seed of half-width ``h``, or None."""
    for host in hosts:
        inner = geo.erode(geo.intersect(k1, host), 2 * h)
        if inner.is_empty:
            continue
        if meets_real:
            ps = geo.point_intersection([inner], extra_y=[0], real_line=True)
            j = ps._zero_row()
            idx = np.nonzero(ps.verts[:, j])[0]
            if len(idx):
                d = 1 << ps.level
                xs = [Fraction(int(ps.xs[i]), d) for i in idx]
                mid = (xs[0] + xs[-1]) / 2
                x = min(xs, key=lambda v: (abs(v - mid), v))
                return Region.box(x - h, -h, x + h, h)
        else:
            for c in geo.components(inner.upper()):
                x, y = geo._sort_key(c)
                if y - h > 0:
                    return geo.symmetrize(Region.box(x - h, y - h, x + h, y + h))
    return None


def build_exhaustion(domain: Region, k0: Region | None = None, stages: int = 2,
                     precision: int = DEFAULT_PRECISION, seed_within=None, avoid=()) -> Exhaustion:
    """Symmetric Runge exhaustion ``K_0 ⋐ K_1 ⋐ ... ⋐ K_stages`` of the open domain.

    Without ``k0`` a seed square is placed inside ``K_1`` (and inside one of
    the regions ``seed_within`` when given).  No stage boundary passes
    through a point of ``avoid``: the erosion radius and the cut square are
    scaled by up to 7/16 until they miss it.
    """
    if domain.is_empty:
        raise ExhaustionError("domain is empty")
    if not domain.is_symmetric():
        raise ExhaustionError("domain is not symmetric")
    if stages < 1:
        raise ExhaustionError("need at least one stage after K_0")
    shift = 0
    while geo.erode(domain, Fraction(1, 1 << (1 + shift))).is_empty:
        shift += 1
        check_budget(shift + 1, precision)
    ks: list[Region] = []
    repairs = []
    for n in range(1, stages + 1):
        for j in range(8):
            # e stays in (e/2, e] and r in [r, 2r), so the stages remain nested
            e = Fraction(16 - j, 16 << (n + shift))
            check_budget(max(domain.level, exponent(e)), precision)
            r = Fraction((16 + j) << (n + shift), 16)
            kn = geo.intersect(geo.erode(domain, e), Region.box(-r, -r, r, r))
            if kn.is_empty:
                raise ExhaustionError(f"stage {n} is empty")
            fixed = runge_repair(kn, domain)
            if not any(on_boundary(fixed, p) for p in avoid):
                break
        else:
            raise ExhaustionError(f"every stage {n} boundary meets a forbidden point")
        repairs.append(int(fixed != kn))
        ks.append(fixed)
    if k0 is None:
        meets = ks[0].crosses_real()
        k0 = _seed(ks[0], meets, shift + 3, seed_within, avoid)
    else:
        if not k0.is_symmetric():
            raise ExhaustionError("k0 is not symmetric")
        if not is_runge_in(k0, domain):
            raise ExhaustionError("k0 is not Runge in the domain")
        if not ks[0].contains_in_interior(k0):
            raise ExhaustionError("k0 is not inside the interior of K_1")
    return Exhaustion(domain=domain, stages=(k0, *ks), shift=shift, repairs=tuple(repairs))
