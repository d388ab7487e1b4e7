"""Cartan coverings obtained by fattening a symmetric tiling.

Every tile ``T_n`` is fattened with one common radius ``R``::

    A_n = (T_n + F) ∪ ((T_n + E) ∩ (A_0 ∪ … ∪ A_{n-1})),   F = R/4,  E = 3R/4

where ``+`` is the Minkowski sum with a closed square.  The second term
pushes ``A_n`` a little further into the sets that are already placed, so
``A_n ∖ earlier`` stays within F of the tile while ``earlier ∖ A_n`` stays
at distance at least E.  That gap is what gives the separation property, and
it survives the dilation ``A_n + t·ε`` for ``ε = R/8`` and all t in [0, 1].
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from . import geometry as geo
from .dyadic import at_level, dyadic, exponent, largest_power_below
from .errors import InfeasibleError
from .geometry import PointSet, Region
from .lattice import Lattice, interior_hosts
from .report import Report
from .tiling.types import Tiling
from .tiling.verify import orbit_points, verify_tiling

log = logging.getLogger(__name__)

CONDITIONS = ("1_boundary", "2_basic", "3_real", "4_order", "5_string",
              "subordination", "z_avoidance", "cover", "lattice_stable")

DEFAULT_T = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))


@dataclass(frozen=True)
class CoveringSpec:
    """Slice traces of the covering members and the exceptional set Z."""

    members: tuple[Region, ...]
    z_orbits: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "z_orbits", tuple((dyadic(x), dyadic(y)) for x, y in self.z_orbits))


@dataclass(frozen=True)
class CartanCovering:
    """``closures[n]`` is A_n; the open set B_n is its interior."""

    closures: tuple[Region, ...]
    eps: tuple[Fraction, ...]
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def sets(self) -> tuple[Region, ...]:
        return self.closures

    def __len__(self) -> int:
        return len(self.closures)

    def at(self, t) -> list[Region]:
        """Closures of the fattened family B_n + t·square(ε_n)."""
        t = dyadic(t)
        if t == 0:
            return list(self.closures)
        return [geo.offset(a, t * e, precision=64) for a, e in zip(self.closures, self.eps)]


# construction -------------------------------------------------------------------------
def _frame(regions: Sequence[Region], pad) -> Region:
    x0 = min(r.bounds[0] for r in regions) - pad
    y0 = min(r.bounds[1] for r in regions) - pad
    x1 = max(r.bounds[2] for r in regions) + pad
    y1 = max(r.bounds[3] for r in regions) + pad
    return Region.box(x0, y0, x1, y1)


def _rect_gap(A: np.ndarray, B: np.ndarray) -> int:
    """Smallest L∞ gap between two stacks of integer rectangles."""
    dx = np.maximum(0, np.maximum(A[:, None, 0] - B[None, :, 2], B[None, :, 0] - A[:, None, 2]))
    dy = np.maximum(0, np.maximum(A[:, None, 1] - B[None, :, 3], B[None, :, 1] - A[:, None, 3]))
    return int(np.maximum(dx, dy).min())


def _box_gap(boxes: np.ndarray, b: np.ndarray) -> np.ndarray:
    dx = np.maximum(0, np.maximum(boxes[:, 0] - b[2], b[0] - boxes[:, 2]))
    dy = np.maximum(0, np.maximum(boxes[:, 1] - b[3], b[1] - boxes[:, 3]))
    return np.maximum(dx, dy)


def radius_bounds(t: Tiling, spec: CoveringSpec, adjacency: dict[int, set[int]],
                  assignment: Sequence[int], vertices: Iterable[tuple]) -> list[Fraction]:
    """Per-tile distance budget: the smallest of the gaps to non-adjacent tiles,
    to the complement of the host member, to Z points and tile vertices off the
    tile, and (for mirror pairs) to the mirror component."""
    tiles = t.regions
    pts = list(orbit_points(spec.z_orbits)) + list(vertices)
    level = max([r.level for r in tiles] + [m.level for m in spec.members]
                + [exponent(c) for p in pts for c in p])
    unit = 1 << level
    rects = [r.rects(level) for r in tiles]
    boxes = np.array([r.int_bounds(level) for r in tiles], dtype=np.int64)
    frame = _frame(list(spec.members) + tiles, 2)
    comp = {m: geo.difference(frame, spec.members[m]).rects(level) for m in set(assignment) if m >= 0}
    P = np.array([[at_level(x, level), at_level(y, level)] for x, y in pts], dtype=np.int64).reshape(-1, 2)
    P = np.concatenate([P, P], axis=1)
    out = []
    for i, r in enumerate(tiles):
        R = rects[i]
        b = boxes[i]
        best = int(max(b[2] - b[0], b[3] - b[1]))
        near = np.nonzero(_box_gap(boxes, b) < best)[0]
        for j in near:
            j = int(j)
            if j != i and j not in adjacency.get(i, ()):
                best = min(best, _rect_gap(R, rects[j]))
        m = assignment[i]
        if m >= 0 and len(comp[m]):
            C = comp[m]
            C = C[_box_gap(C, b) < best]
            if len(C):
                best = min(best, _rect_gap(R, C))
        if len(P):
            Q = P[_box_gap(P, b) < best]
            for q in Q:
                g = _rect_gap(R, q[None, :])
                if g > 0:
                    best = min(best, g)
        if not r.meets_real():
            ymin = np.where(R[:, 1] >= 0, R[:, 1], -R[:, 3])
            best = min(best, 2 * int(ymin.min()))
        out.append(Fraction(best, unit))
    return out


def fatten(tiles: Sequence[Region], adjacency: dict[int, set[int]], radius: Fraction) -> list[Region]:
    """The sets A_n for a common radius (see the module docstring)."""
    inner, outer = radius / 4, radius * 3 / 4
    out: list[Region] = []
    for n, r in enumerate(tiles):
        a = geo.offset(r, inner, precision=64)
        earlier = sorted(k for k in adjacency.get(n, ()) if k < n)
        if earlier:
            big = geo.offset(r, outer, precision=64)
            a = geo.union(a, *(geo.intersect(big, out[k]) for k in earlier))
        out.append(a)
    return out


def cartan_from_tiling(t: Tiling, spec: CoveringSpec, *, rounds: int = 8, t_samples=DEFAULT_T,
                       check: bool = True) -> CartanCovering:
    """Fatten a verified tiling into a Cartan covering subordinated to ``spec``.

    The radius starts at the largest power of two below a quarter of the
    smallest per-tile budget and is halved after every failed verification.
    """
    if len(t) == 0:
        raise ValueError("empty tiling")
    k = geo.union(*t.regions)
    trep = verify_tiling(t, k, spec.members, spec.z_orbits, prefixes=False)
    if not trep.passed:
        raise InfeasibleError("tiling does not verify against the covering", failed=trep.failed_checks())
    adjacency: dict[int, set[int]] = {i: set() for i in range(len(t))}
    for key in trep.nerve_keys:
        if len(key) == 2:
            adjacency[key[0]].add(key[1])
            adjacency[key[1]].add(key[0])
    bounds = radius_bounds(t, spec, adjacency, trep.assignment, trep.vertices)
    radius = largest_power_below(min(bounds) / 4)
    last = None
    for attempt in range(rounds):
        sets = fatten(t.regions, adjacency, radius)
        eps = radius / 8
        cov = CartanCovering(tuple(sets), tuple([eps] * len(sets)),
                             {"radius": radius, "rounds": attempt, "assignment": list(trep.assignment)})
        if not check:
            return cov
        rep = verify_cartan(cov, spec, t_samples, domain=k)
        if rep.passed:
            cov.meta["report"] = rep.as_dict()
            return cov
        last = rep
        log.info("covering round %d with radius %s failed: %s", attempt, radius, rep.failed_checks())
        radius /= 2
    raise InfeasibleError("covering verification failed", failed=last.failed_checks(),
                          findings={k: v for k, v in last.findings.items() if v})


# verification -------------------------------------------------------------------------
def basic_union(ps: PointSet) -> str | None:
    """None when ``ps`` is a finite union of disjoint closed basic sets."""
    if ps.is_empty():
        return None
    if not ps.lower().is_empty():
        return "lower-dimensional contact"
    r = ps.area_region()
    if not r.is_symmetric():
        return "not symmetric"
    comps = geo.components(r)
    for c in comps:
        if not geo.is_disc(c):
            return "component is not a disc"
        if c.meets_real():
            if not c.is_symmetric():
                return "real component is not symmetric"
        elif geo.reflect(c) not in comps:
            return "off-axis component without mirror"
    return None


def _separated(a: Region, b: Region) -> bool:
    """Separation property: closure(a ∖ b) and closure(b ∖ a) are disjoint."""
    if a.is_empty or b.is_empty:
        return True
    p, q = geo.difference(a, b), geo.difference(b, a)
    if p.is_empty or q.is_empty:
        return True
    if not geo._bbox_overlap([p, q]):
        return True
    return geo.point_intersection([p, q]).is_empty()


def cartan_string(sets: Sequence[Region], depth: int = 0) -> str | None:
    """None when the sequence is a Cartan string; empty sets count as basic.

    A single set is a string when it is closed basic.  Longer strings are
    checked prefix by prefix: the new set is closed basic, it meets the union
    of the earlier ones in disjoint closed basic sets with the separation
    property, and the induced string of intersections is again a string.
    """
    for j, b in enumerate(sets):
        if not b.is_empty and not geo.is_closed_basic(b):
            return f"set {j} is not closed basic"
        if j == 0:
            continue
        live = [a for a in sets[:j] if not a.is_empty and not b.is_empty and geo._bbox_overlap([a, b])]
        if not live:
            continue
        u = geo.union(*live)
        msg = basic_union(geo.point_intersection([u, b]))
        if msg:
            return f"set {j} meets the earlier union in a {msg}"
        if not _separated(u, b):
            return f"set {j} and the earlier union are not separated"
        induced = [geo.intersect(a, b) if not a.is_empty and not b.is_empty else Region.empty() for a in sets[:j]]
        if sum(1 for s in induced if not s.is_empty) > 1:
            msg = cartan_string(induced, depth + 1)
            if msg:
                return f"induced string at set {j}: {msg}"
    return None


def _mask_basic(mask: np.ndarray, ys: np.ndarray) -> bool:
    """Closed basic test for a cell mask already known to be symmetric."""
    if not mask.any():
        return True
    labels, n = ndimage.label(mask, structure=geo._EIGHT)
    on_axis = (ys[:-1] <= 0) & (ys[1:] >= 0)
    if n != (1 if mask[:, on_axis].any() else 2):
        return False
    if n == 1:
        return geo._mask_disc(mask)
    return geo._mask_disc(labels == 1) and geo._mask_disc(labels == 2)


def _string_step(earlier: Sequence[np.ndarray], b: np.ndarray, ys: np.ndarray) -> str | None:
    """Pair and induced-string conditions for appending ``b`` to a string of
    symmetric cell masks on one window grid."""
    if not _mask_basic(b, ys):
        return "set is not closed basic"
    live = [m for m in earlier if m.any()]
    if not live or not b.any():
        return None
    u = np.logical_or.reduce(live)
    meet = u & b
    fu, fb, fm = geo._faces(u), geo._faces(b), geo._faces(meet)
    if any(np.any(x & y & ~z) for x, y, z in zip(fu, fb, fm)):
        return "earlier union meets it in lower-dimensional contact"
    labels, k = ndimage.label(meet, structure=geo._EIGHT)
    if not all(geo._mask_disc(labels == c) for c in range(1, k + 1)):
        return "earlier union meets it in a non-disc component"
    p, q = geo._faces(u & ~b), geo._faces(b & ~u)
    if any(np.any(x & y) for x, y in zip(p, q)):
        return "separation property fails"
    induced = [m & b for m in earlier]
    if sum(1 for m in induced if m.any()) > 1:
        for jj in range(1, len(induced)):
            msg = _string_step(induced[:jj], induced[jj], ys)
            if msg:
                return f"induced string: {msg}"
    return None


def _is_path_forest(nodes: Sequence[int], edges: Iterable[tuple[int, int]]) -> bool:
    deg = {v: 0 for v in nodes}
    parent = {v: v for v in nodes}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return all(d <= 2 for d in deg.values())


def check_family(sets: Sequence[Region], spec: CoveringSpec, rep: Report, tag: str = "",
                 domain: Region | None = None):
    """Conditions (1)-(5), subordination and Z for one family of closed sets.

    Returns the set of nonempty index tuples (the intersection lattice).
    """
    n = len(sets)
    zpts = orbit_points(spec.z_orbits)
    extra = [domain] if domain is not None and not domain.is_empty else []
    lat = Lattice(list(sets) + extra, points=zpts)
    nerve, adj = lat.nerve(max_dim=4, among=list(range(n)))
    keys = set(nerve)

    for i, a in enumerate(sets):
        # (1) cell unions are regular closed with rectilinear boundary; the
        # only thing to check is that A_n is a closed basic set at all
        rep.check("1_boundary", not a.is_empty and geo.is_regular(a), f"{tag}set {i} is empty")
        rep.check("2_basic", geo.is_closed_basic(a), f"{tag}set {i} is not closed basic")

    for key, ps in nerve.items():
        if len(key) in (2, 3):
            ok = geo.is_closed_basic_set(ps)
            rep.check("2_basic", ok, f"{tag}intersection {key} is not closed basic")
        if len(key) >= 4:
            rep.fail("4_order", f"{tag}sets {key} share a point")

    # (3) the real chain
    real = [i for i, a in enumerate(sets) if a.meets_real()]
    rset = set(real)
    real_edges = []
    for key, ps in nerve.items():
        if len(key) == 2 and key[0] in rset and key[1] in rset:
            real_edges.append(key)
            rep.check("3_real", ps.meets_real(), f"{tag}real sets {key} meet off the axis only")
    for i in real:
        nb = sorted(j for j in adj[i] if j in rset)
        rep.check("3_real", len(nb) <= 2, f"{tag}set {i} has real neighbours {nb}")
        if len(nb) == 2:
            rep.check("3_real", (nb[0], nb[1]) not in keys, f"{tag}real neighbours {nb} of set {i} meet")
    rep.check("3_real", _is_path_forest(real, real_edges), f"{tag}real sets do not form disjoint paths")

    # (5) prefix strings, checked locally: only earlier sets meeting A_n matter.
    # A_n is symmetric (checked above), so every set met here is symmetric.
    nx, ny = len(lat.X) - 1, len(lat.Y) - 1
    for j in range(1, n):
        earlier = sorted(i for i in adj[j] if i < j)
        if not earlier:
            continue
        i0, i1, j0, j1 = lat._win[j]
        win = (max(i0 - 1, 0), min(i1 + 1, nx), max(j0 - 1, 0), min(j1 + 1, ny))
        ys = lat.Y[win[2]:win[3] + 1]
        a = lat._cut(lat._closed[j], lat._win[j], win)[0]
        cells = [lat._cut(lat._closed[i], lat._win[i], win)[0] for i in earlier]
        msg = _string_step(cells, a, ys)
        rep.check("5_string", msg is None, f"{tag}set {j}: {msg}")

    # subordination and Z
    hosts = interior_hosts(list(sets), list(spec.members))
    for i, h in enumerate(hosts):
        rep.check("subordination", bool(h), f"{tag}set {i} is inside no covering member")
    for p in zpts:
        ij = lat.vertex_index(*p)
        if ij is None:
            continue
        owners = [i for i in range(n) if lat.holds_vertex(i, ij)]
        rep.check("z_avoidance", len(owners) <= 1, f"{tag}point {p} lies in sets {owners}")
    if extra:
        left = lat.uncovered(n, range(n))
        rep.check("cover", left.is_empty(), f"{tag}the open sets miss {len(left.points())} grid points of the domain")
    return keys


def _window(ps: PointSet, lat: Lattice):
    i0 = int(np.searchsorted(lat.X, ps.xs[0]))
    j0 = int(np.searchsorted(lat.Y, ps.ys[0]))
    return i0, i0 + len(ps.xs) - 1, j0, j0 + len(ps.ys) - 1


def verify_cartan(c: CartanCovering, spec: CoveringSpec, t_samples=DEFAULT_T,
                  domain: Region | None = None) -> Report:
    """All Cartan sequence conditions for every sampled member of the B^t family,
    plus stability of the intersection lattice across the samples."""
    rep = Report("cartan")
    for k in CONDITIONS:
        rep.check(k)
    lattices = {}
    for t in t_samples:
        t = dyadic(t)
        fam = c.at(t)
        lattices[t] = check_family(fam, spec, rep, tag=f"t={t}: ", domain=domain)
    ref = None
    for t, keys in lattices.items():
        if ref is None:
            ref = (t, keys)
            continue
        rep.check("lattice_stable", keys == ref[1],
                  f"lattice at t={t} differs from t={ref[0]}: {sorted(keys ^ ref[1])[:6]}")
    if ref is not None:
        keys = ref[1]
        rep.stats.update({
            "sets": len(c), "pairs": sum(1 for k in keys if len(k) == 2),
            "triples": sum(1 for k in keys if len(k) == 3),
            "max_multiplicity": max([len(k) for k in keys] + [1 if len(c) else 0]),
            "t_samples": [str(t) for t in lattices],
        })
    return rep


# nerve --------------------------------------------------------------------------------
@dataclass(frozen=True)
class Nerve:
    """Simplices of a finite family of open sets (interiors of the given closures).

    ``parts[key]`` lists the closures of the connected components of the open
    intersection, ``mirror[key][a]`` is the index of the mirror image of part a
    and ``real[key][a]`` tells whether part a meets the real axis.
    """

    size: int
    parts: dict[tuple[int, ...], tuple[Region, ...]]
    mirror: dict[tuple[int, ...], tuple[int, ...]]
    real: dict[tuple[int, ...], tuple[bool, ...]]

    @property
    def simplices(self) -> list[tuple[int, ...]]:
        return sorted(self.parts, key=lambda k: (len(k), k))

    def of_dim(self, d: int) -> list[tuple[int, ...]]:
        return [k for k in self.simplices if len(k) == d + 1]

    @property
    def dim(self) -> int:
        return max((len(k) - 1 for k in self.parts), default=-1)

    def meets_real(self, key) -> bool:
        return any(self.real[tuple(key)])


def _open_parts(r: Region) -> tuple[Region, ...]:
    if r.is_empty:
        return ()
    comps = [Region(r.level, r.xs, r.ys, m) for m in geo._open_components(r)]
    return tuple(sorted(comps, key=geo._sort_key))


def nerve_of(regions: Sequence[Region], max_dim: int = 4) -> Nerve:
    """Nerve of the interiors of ``regions`` with component data per simplex."""
    regions = list(regions)
    lat = Lattice(regions)
    raw, _ = lat.nerve(max_dim=max_dim)
    parts, mirror, real = {}, {}, {}

    def add(key, area: Region):
        ps = _open_parts(area)
        if not ps:
            return
        parts[key] = ps
        mirror[key] = tuple(ps.index(geo.reflect(p)) if geo.reflect(p) in ps else -1 for p in ps)
        real[key] = tuple(p.crosses_real() for p in ps)
    for i, r in enumerate(regions):
        add((i,), r)
    for key in sorted(raw, key=lambda k: (len(k), k)):
        ps = raw[key]
        if not ps.has_area():
            continue
        if all(key[:m] + key[m + 1:] in parts for m in range(len(key))) or len(key) == 2:
            add(key, ps.area_region())
    return Nerve(len(regions), parts, mirror, real)


def nerve(c: CartanCovering | CoveringSpec | Sequence[Region], max_dim: int = 4) -> Nerve:
    if isinstance(c, CartanCovering):
        return nerve_of(c.closures, max_dim)
    if isinstance(c, CoveringSpec):
        return nerve_of(c.members, max_dim)
    return nerve_of(list(c), max_dim)


def order_report(nv: Nerve) -> dict:
    """Multiplicity facts used by the order-bound checks."""
    mult = max((len(k) for k in nv.parts), default=0)
    has_triple = any(len(k) == 3 for k in nv.parts)
    real_nodes = [k[0] for k in nv.parts if len(k) == 1 and any(nv.real[k])]
    rs = set(real_nodes)
    real_edges = [k for k in nv.parts if len(k) == 2 and k[0] in rs and k[1] in rs]
    real_tri = [k for k in nv.parts if len(k) == 3 and all(i in rs for i in k)]
    v, e, f = (len(nv.of_dim(d)) for d in (0, 1, 2))
    return {
        "max_multiplicity": mult,
        "has_triple": has_triple,
        "order_ok": mult <= 3 and (mult == 3) == has_triple,
        "real_paths": not real_tri and _is_path_forest(real_nodes, real_edges),
        "euler": v - e + f,
        "planar_edge_bound": v < 3 or e <= 3 * v - 6,
    }
