"""Inductive construction of symmetric tilings of a domain.

Stage ``n + 1`` tiles ``K_{n+1} \\ int K_n`` one component at a time.  A
component meeting the axis first receives a complete symmetric necklace
through its real holes and beads; what is left above the axis is tiled
like an off-axis component and reflected.  Inside an annular region the
order is: collars (and corridors) of the beads, bricks, then collars (and
corridors) of the holes.  Bricks are placed in decreasing graph distance
to the free boundary, so no tile meets its predecessors in a closed curve.
"""

from __future__ import annotations

import logging
from collections import deque
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .. import geometry as geo
from ..dyadic import DEFAULT_PRECISION, largest_power_below
from ..errors import InfeasibleError
from ..exhaustion import build_exhaustion
from ..geometry import Region
from ..lattice import interior_hosts
from .bricks import brick_size, brick_tiles, choose_shift, feature_coords
from .necklace import build_necklace, tile_necklace
from .types import Tile, Tiling
from .verify import orbit_points, verify_tiling

log = logging.getLogger(__name__)


# step sizes ------------------------------------------------------------------------
def lebesgue_number(k: Region, cov: Sequence[Region], upper: Fraction = Fraction(4)) -> Fraction:
    """Largest dyadic ``r <= upper`` with every sup-norm ball ``B(z, r)``, z in k,
    inside the interior of one member."""
    r = largest_power_below(upper)
    floor = Fraction(1, 1 << 30)
    while r >= floor:
        cores = [geo.erode(u, r) for u in cov]
        cores = [c for c in cores if not c.is_empty]
        if cores and geo.union(*cores).contains(k):
            return r
        r /= 2
    raise InfeasibleError("covering has no positive Lebesgue number on this set")


def stage_delta(k: Region, cov: Sequence[Region], cap: Fraction | None = None) -> Fraction:
    """Half the Lebesgue number, rounded down to a dyadic, capped by ``cap``."""
    d = lebesgue_number(k, cov) / 2
    if cap is not None:
        d = min(d, largest_power_below(cap))
    return d


# adjacency on a common grid ---------------------------------------------------
def edge_adjacency(regions: Sequence[Region], others: Sequence[Region] = ()):
    """Pairs (a, b) of region indices sharing a boundary segment.

    Indices ``len(regions) + j`` refer to ``others[j]``.  Regions must have
    disjoint interiors.
    """
    allr = list(regions) + list(others)
    if not allr:
        return set()
    _, X, Y, masks = geo._grid([r for r in allr])
    lab = np.full((len(X) - 1, len(Y) - 1), -1, dtype=np.int64)
    for i, m in enumerate(masks):
        lab[m & (lab < 0)] = i
    pairs = set()
    for a, b in ((lab[:-1, :], lab[1:, :]), (lab[:, :-1], lab[:, 1:])):
        sel = (a != b) & (a >= 0) & (b >= 0)
        for p, q in zip(a[sel].tolist(), b[sel].tolist()):
            pairs.add((min(p, q), max(p, q)))
    return pairs


def order_by_distance(pieces: Sequence[Region], free: Sequence[Region], keys=None) -> list[int]:
    """Indices of ``pieces`` sorted by decreasing graph distance to ``free``."""
    n = len(pieces)
    pairs = edge_adjacency(pieces, [f for f in free if not f.is_empty])
    adj = {i: set() for i in range(n)}
    dist = [None] * n
    dq = deque()
    for a, b in pairs:
        if b >= n and a < n:
            if dist[a] is None:
                dist[a] = 0
                dq.append(a)
        elif a < n and b < n:
            adj[a].add(b)
            adj[b].add(a)
    while dq:
        a = dq.popleft()
        for b in adj[a]:
            if dist[b] is None:
                dist[b] = dist[a] + 1
                dq.append(b)
    big = n + 1
    keys = keys or [geo._sort_key(p) for p in pieces]
    return sorted(range(n), key=lambda i: (-(dist[i] if dist[i] is not None else big), keys[i]))


# one annular step -------------------------------------------------------------------
def _exterior(k: Region) -> Region:
    x0, y0, x1, y1 = k.bounds
    pad = max(x1 - x0, y1 - y0, Fraction(1))
    return geo.difference(Region.box(x0 - pad, y0 - pad, x1 + pad, y1 + pad), k)


def _bricks(rest: Region, delta: Fraction, avoid, symmetric: bool, seed: int) -> list[Region]:
    if rest.is_empty:
        return []
    w, h = brick_size(delta)
    sx, h0 = choose_shift(rest, w, h, avoid, seed=seed)
    out = [b.region for b in brick_tiles(rest, w, h, sx, h0, symmetric=symmetric)]
    for r in out:
        piece = r if (r.meets_real() or not symmetric) else r.upper()
        if not all(geo.is_disc(c) for c in geo.components(piece)) or len(geo.components(piece)) != 1:
            raise InfeasibleError("a brick piece is not a disc", delta=str(delta))
    return out


def _upper_step(du: Region, holes_u, beads_u, delta, avoid_regions, forbidden, free: Region,
                seed: int, stage: int, corridors: bool) -> list[Tile]:
    """Tile the upper region ``du`` minus holes and beads (no reflection)."""
    avoid = feature_coords(list(avoid_regions) + [du] + list(holes_u) + list(beads_u), forbidden)
    tb, td = [], []
    placed = []
    if beads_u:
        tb = _upper_necklace(du, beads_u, list(holes_u), "bead", delta, forbidden,
                             avoid_regions, seed, stage, corridors)
        placed += [t.region for t in tb]
    if holes_u:
        obst = list(beads_u) + placed
        td = _upper_necklace(du, holes_u, obst, "hole", delta, forbidden,
                             list(avoid_regions) + placed, seed, stage, corridors)
        placed += [t.region for t in td]
    rest = geo.difference(du, geo.union(*holes_u, *beads_u, *placed)) if (holes_u or beads_u or placed) else du
    avoid = feature_coords(list(avoid_regions) + [du] + list(holes_u) + list(beads_u) + placed, forbidden)
    pieces = _bricks(rest, delta, avoid, False, seed)
    free_regions = [free] + [t.region for t in td] + [h for h in holes_u]
    order = order_by_distance(pieces, free_regions)
    mid = [Tile(pieces[i], stage=stage, role="brick") for i in order]
    return tb + mid + td


def _upper_necklace(du, discs, obstacles, kind, delta, forbidden, avoid_regions, seed, stage, corridors):
    if corridors:
        try:
            n = build_necklace(du, discs, False, False, obstacles=obstacles, kinds=[kind] * len(discs))
            t = tile_necklace(n, delta, forbidden, avoid_regions=avoid_regions, seed=seed, stage=stage)
            return [Tile(x.region, stage=stage, role=f"{kind}-{x.role}") for x in t.tiles]
        except InfeasibleError as exc:
            log.info("corridor routing failed (%s); using collars only", exc)
    from .types import Necklace
    n = Necklace(du, tuple(sorted(discs, key=geo._sort_key)), (), False, False, (), tuple([kind] * len(discs)))
    t = tile_necklace(n, delta, forbidden, avoid_regions=avoid_regions, seed=seed, stage=stage)
    return [Tile(x.region, stage=stage, role=f"{kind}-{x.role}") for x in t.tiles]


def tile_annular_step(d: Region, holes_d: Sequence[Region], beads_b: Sequence[Region], delta,
                      v_forbidden: Iterable = (), *, prev: Sequence[Region] = (), outer_free: bool = True,
                      target: Region | None = None, seed: int = 0, stage: int = 0,
                      corridors: bool = True) -> Tiling:
    """Ordered symmetric delta-tiling of ``d`` minus the interiors of holes and beads.

    ``d`` is a symmetric disc meeting the axis or a disc in the upper
    half-plane (tiles are then reflected).  ``prev`` lists tiles already
    placed, whose coordinates the new cut lines avoid.  ``target`` is the
    set being completed; its exterior is where the free boundary lies.
    With ``outer_free`` False the outer boundary of ``d`` is already tiled.
    """
    delta = Fraction(delta)
    holes_d, beads_b = list(holes_d), list(beads_b)
    forbidden = orbit_points(v_forbidden)
    k_target = target if target is not None else geo.difference(d, geo.union(*holes_d)) if holes_d else d
    free = _exterior(k_target)
    if not outer_free:
        # the outer boundary of d is old: only the exterior inside d counts as free
        free = geo.intersect(free, d)
    avoid_regions = list(prev)
    tiles: list[Tile] = []
    if d.meets_real():
        if not d.is_symmetric():
            raise InfeasibleError("disc meets the axis but is not symmetric")
        real_discs, kinds = [], []
        for h in holes_d:
            if h.meets_real():
                real_discs.append(h)
                kinds.append("hole")
        for b in beads_b:
            if b.meets_real():
                real_discs.append(b)
                kinds.append("bead")
        if not outer_free and "hole" in kinds:
            # one real hole stands in for the free outer boundary
            first = min((i for i, k in enumerate(kinds) if k == "hole"), key=lambda i: real_discs[i].bounds[0])
            kinds[first] = "free"
        n = build_necklace(d, real_discs, True, True, kinds=kinds)
        tn = tile_necklace(n, delta, forbidden, avoid_regions=avoid_regions + holes_d + beads_b,
                           seed=seed, stage=stage)
        tiles += [Tile(t.region, stage=stage, role=f"necklace-{t.role}") for t in tn.tiles]
        used = geo.union(*[t.region for t in tiles], *real_discs)
        space = geo.difference(d.upper(), used)
        up_holes = [h for h in holes_d if h.bounds[1] > 0]
        up_beads = [b for b in beads_b if b.bounds[1] > 0]
        comps = sorted(geo.components(space), key=geo._sort_key)
        for du in comps:
            hu = [h for h in up_holes if du.contains(h)]
            bu = [b for b in up_beads if du.contains(b)]
            du = geo.union(du, *hu, *bu)
            ups = _upper_step(du, hu, bu, delta, avoid_regions + [t.region for t in tiles], forbidden,
                              free, seed, stage, corridors)
            tiles += [Tile(geo.symmetrize(t.region), stage=stage, role=t.role) for t in ups]
    else:
        flip = d.bounds[3] <= 0
        du = geo.reflect(d) if flip else d
        hu = [geo.reflect(h) if flip else h for h in holes_d]
        bu = [geo.reflect(b) if flip else b for b in beads_b]
        ups = _upper_step(du, hu, bu, delta, avoid_regions, forbidden,
                          geo.reflect(free) if flip else free, seed, stage, corridors)
        tiles += [Tile(geo.symmetrize(t.region), stage=stage, role=t.role) for t in ups]
    return Tiling(tuple(tiles), {stage: delta}).renumbered()


def ring_bricks(ring: Region, target: Region, delta, v_forbidden: Iterable = (), *,
                prev: Sequence[Region] = (), seed: int = 0, stage: int = 0) -> Tiling:
    """Fallback: plain symmetric bricks on ``ring`` ordered by distance to the free boundary."""
    delta = Fraction(delta)
    forbidden = orbit_points(v_forbidden)
    avoid = feature_coords(list(prev) + [ring, target], forbidden)
    pieces = _bricks(ring, delta, avoid, True, seed)
    order = order_by_distance(pieces, [_exterior(target)])
    # real tiles keep their left-to-right chain order inside each distance class
    return Tiling(tuple(Tile(pieces[i], stage=stage, role="ring-brick") for i in order),
                  {stage: delta}).renumbered()


# the full construction ------------------------------------------------------------
def _stage_jobs(k_old: Region, k_new: Region):
    """Annular jobs ``(d, holes, beads, outer_free)`` covering ``k_new \\ int k_old``."""
    olds = geo.components(k_old)
    jobs = []
    for c in sorted(geo.components(k_new), key=geo._sort_key):
        if c.bounds[3] <= 0:
            continue   # mirror image of an upper component
        mine = [o for o in olds if c.contains(o)]
        beads = [geo.fill(o) for o in mine]
        hs = [h for h in geo.holes(c) if not any(b.contains(h) for b in beads)]
        jobs.append((geo.fill(c), hs, beads, True))
        for o in mine:
            for hole in geo.holes(o):
                part = geo.intersect(c, hole)
                if part.is_empty:
                    continue
                if hole.bounds[3] <= 0 and not hole.meets_real():
                    continue
                inner_beads = [geo.fill(o2) for o2 in mine if o2 is not o and hole.contains(o2)]
                dh = geo.fill(hole)
                ring = geo.intersect(c, dh)
                inner_holes = [h for h in geo.holes(ring)
                               if not any(b.contains(h) for b in inner_beads)]
                jobs.append((dh, inner_holes, inner_beads, False))
    return jobs


def _assign(tiles: Sequence[Tile], cov: Sequence[Region]) -> list[Tile]:
    hosts = interior_hosts([t.region for t in tiles], cov)
    return [Tile(t.region, t.index, h[0] if h else -1, t.stage, t.role) for t, h in zip(tiles, hosts)]


def tile_domain(domain: Region, cov: Sequence[Region] | None = None, z: Iterable = (), *,
                stages: int = 2, precision: int = DEFAULT_PRECISION, seed: int = 0,
                retries: int = 3, check: bool = True, corridors: bool = True) -> Tiling:
    """Symmetric tiling of ``K_stages`` of the exhaustion of ``domain``, subordinated to ``cov``.

    Each stage is verified as a prefix before the next one starts; failed
    stages are retried with other grid offsets, then with half the step,
    then with plain ring bricks.  ``meta`` records deltas, retries and
    fallbacks.
    """
    cov = list(cov) if cov else [domain]
    zpts = orbit_points(z)
    ex = build_exhaustion(domain, stages=stages, precision=precision, seed_within=cov, avoid=zpts)
    k0 = ex[0]
    tiles = [Tile(k0, stage=0, role="seed")]
    deltas = {0: _diam_bound(k0)}
    meta = {"stages": stages, "shift": ex.shift, "retries": 0, "fallbacks": 0, "halvings": 0}
    for n in range(stages):
        k_old, k_new = ex[n], ex[n + 1]
        delta = stage_delta(k_new, cov, cap=Fraction(1, 1 << n) if n else Fraction(1))
        found = None
        over_budget = 0
        attempts = [("necklace", delta, s) for s in range(retries)] + \
                   [("necklace", delta / 2, s) for s in range(retries)] + \
                   [("ring", delta / 2, s) for s in range(retries)] + \
                   [("ring", delta / 4, s) for s in range(retries)]
        for a, (mode, dlt, s) in enumerate(attempts):
            try:
                new = _build_stage(mode, k_old, k_new, dlt, zpts, tiles, seed + 101 * s + 7 * n, n + 1, corridors)
            except InfeasibleError as exc:
                log.info("stage %d attempt %d failed: %s", n + 1, a, exc)
                continue
            trial = Tiling(tuple(tiles + new), {**deltas, n + 1: dlt}).renumbered()
            if _level(trial) > precision:
                log.info("stage %d attempt %d exceeds precision", n + 1, a)
                over_budget += 1
                continue
            if check:
                rep = verify_tiling(trial, k_new, cov, zpts, prefixes=True)
                if not rep.passed:
                    log.info("stage %d attempt %d rejected: %s", n + 1, a, rep.failed_checks())
                    continue
                trial = Tiling(tuple(Tile(x.region, x.index, j, x.stage, x.role)
                                     for x, j in zip(trial.tiles, rep.assignment)), trial.deltas)
            found = (trial, mode, dlt, a)
            break
        if found is None:
            why = f" within precision budget {precision}" if over_budget == len(attempts) else ""
            raise InfeasibleError(f"could not tile stage {n + 1}{why}", stage=n + 1)
        trial, mode, dlt, a = found
        tiles = list(trial.tiles)
        deltas[n + 1] = dlt
        meta["retries"] += a
        meta["fallbacks"] += int(mode == "ring")
        meta["halvings"] += int(dlt < delta)
    meta["deltas"] = {k: str(v) for k, v in deltas.items()}
    if not check:
        tiles = _assign(tiles, cov)
    out = Tiling(tuple(tiles), deltas, meta).renumbered()
    out.meta["exhaustion"] = ex
    return out


def _build_stage(mode, k_old, k_new, delta, zpts, tiles, seed, stage, corridors) -> list[Tile]:
    prev = [t.region for t in tiles]
    if mode == "ring":
        ring = geo.difference(k_new, k_old)
        return list(ring_bricks(ring, k_new, delta, zpts, prev=prev, seed=seed, stage=stage).tiles)
    new: list[Tile] = []
    for d, hs, bs, outer_free in _stage_jobs(k_old, k_new):
        t = tile_annular_step(d, hs, bs, delta, zpts, prev=prev + [x.region for x in new],
                              outer_free=outer_free, target=k_new, seed=seed, stage=stage,
                              corridors=corridors)
        new += list(t.tiles)
    return new


def _diam_bound(r: Region) -> Fraction:
    parts = geo.components(r.upper()) if not r.meets_real() else [r]
    d2 = max(p.diameter_squared() for p in parts)
    d = Fraction(1, 1 << 20)
    while d * d < d2:
        d *= 2
    return d


def _level(t: Tiling) -> int:
    return max(x.region.level for x in t.tiles)
