"""Seeded property suites over the canonical instances.

Each suite returns a Report whose JSON form depends only on its arguments
(no timings, no hidden entropy), so two runs with the same seed produce
identical bytes.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import geometry as geo
from .cohomology import SymmetricCovering, check_higher_vanishing, coboundary, random_antisym, solve_antisym_h2
from .covering import DEFAULT_T, CartanCovering, CoveringSpec, cartan_from_tiling, fatten, nerve, order_report
from .errors import CartanTilerError
from .geometry import Region
from .report import Report
from .slicereg import (AxSymCompact, Quaternion, QPolynomial, _component_route, _conv_route, eval_formula_a,
                       evaluate, exp_log_bound, exp_star, log_star_one_minus, sphere_max, star_product,
                       sup_norm)
from .tiling.bricks import brick_tiles
from .tiling.construct import tile_domain
from .tiling.types import Tiling
from .tiling.verify import exact_lattice, raster_lattice, verify_tiling

F = Fraction

DOMAIN_NAMES = ("square", "annulus", "pair", "holes", "tworeal", "L")
COVERING_NAMES = ("trivial", "three")


def canonical_domains() -> dict[str, Region]:
    """Symmetric square; annulus with a real hole; mirror pair of squares; box with a
    real hole and a mirror pair of holes; two real components; an L and its mirror."""
    box2 = Region.box(-2, -2, 2, 2)
    return {
        "square": Region.box(-1, -1, 1, 1),
        "annulus": geo.difference(box2, Region.box(F(-1, 2), F(-1, 2), F(1, 2), F(1, 2))),
        "pair": Region.from_rects([(-1, 1, 1, 3), (-1, -3, 1, -1)]),
        "holes": geo.difference(box2, Region.from_rects([
            (F(-1, 2), F(-1, 4), F(1, 2), F(1, 4)), (F(-1, 2), 1, F(1, 2), F(5, 4)),
            (F(-1, 2), F(-5, 4), F(1, 2), -1)])),
        "tworeal": Region.from_rects([(-3, -1, -1, 1), (1, -1, 3, 1)]),
        "L": Region.from_rects([(-1, -1, 2, 1), (0, -2, 2, 2)]),
    }


def canonical_coverings(d: Region) -> dict[str, list[Region]]:
    """The domain itself, and three vertical strips overlapping by an eighth of the width."""
    x0, y0, x1, y1 = d.bounds
    w = x1 - x0
    c1, c2, o = x0 + w * F(3, 8), x0 + w * F(5, 8), w / 8
    cuts = [(x0 - 1, c1 + o), (c1 - o, c2 + o), (c2 - o, x1 + 1)]
    return {"trivial": [d], "three": [geo.intersect(d, Region.box(a, y0 - 1, b, y1 + 1)) for a, b in cuts]}


@dataclass
class Instance:
    domain_name: str
    cov_name: str
    domain: Region
    spec: CoveringSpec
    tiling: Tiling | None = None
    covering: CartanCovering | None = None
    seconds: dict = field(default_factory=dict)

    @property
    def name(self) -> str:
        return f"{self.domain_name}/{self.cov_name}"


def instances(names: Sequence[str] = DOMAIN_NAMES) -> list[Instance]:
    doms = canonical_domains()
    out = []
    for n in names:
        for cn, members in canonical_coverings(doms[n]).items():
            out.append(Instance(n, cn, doms[n], CoveringSpec(tuple(members))))
    return out


# 1: tilings ----------------------------------------------------------------------------
def tiling_suite(insts: list[Instance], precision: int = 10, seed: int = 0, stages: int = 2) -> Report:
    rep = Report("tiling suite")
    for it in insts:
        t0 = time.perf_counter()
        try:
            t = tile_domain(it.domain, it.spec.members, it.spec.z_orbits, stages=stages,
                            precision=precision, seed=seed)
        except CartanTilerError as exc:
            rep.fail("tiled", f"{it.name}: {exc}")
            continue
        it.seconds["tile"] = time.perf_counter() - t0
        it.tiling = t
        r = verify_tiling(t, t.meta["exhaustion"][stages], it.spec.members, it.spec.z_orbits, prefixes=True)
        rep.check("tiled", True)
        rep.check("verified", r.passed, f"{it.name}: {r.failed_checks()}")
        rep.stats[it.name] = {"tiles": len(t), "retries": t.meta["retries"], "fallbacks": t.meta["fallbacks"],
                              "passed": r.passed}
    rep.stats["passed"] = f"{sum(1 for it in insts if rep.stats.get(it.name, {}).get('passed'))}/{len(insts)}"
    return rep


# 2 and 3: coverings -------------------------------------------------------------------
def cartan_suite(insts: list[Instance], t_samples=DEFAULT_T) -> Report:
    rep = Report("cartan suite")
    for it in insts:
        if it.tiling is None:
            rep.fail("built", f"{it.name}: no tiling")
            continue
        t0 = time.perf_counter()
        try:
            c = cartan_from_tiling(it.tiling, it.spec, t_samples=t_samples)
        except CartanTilerError as exc:
            rep.fail("built", f"{it.name}: {exc} {getattr(exc, 'details', '')}")
            continue
        it.seconds["cover"] = time.perf_counter() - t0
        it.covering = c
        r = c.meta["report"]
        rep.check("built", True)
        rep.check("verified", r["passed"], f"{it.name}: {[k for k, v in r['checks'].items() if not v]}")
        rep.check("lattice_stable", r["checks"].get("lattice_stable", True), it.name)
        rep.stats[it.name] = {"sets": len(c), "radius": str(c.meta["radius"]), "rounds": c.meta["rounds"],
                              "pairs": r["stats"].get("pairs"), "triples": r["stats"].get("triples")}
    return rep


def order_suite(insts: list[Instance]) -> Report:
    rep = Report("order suite")
    for it in insts:
        if it.covering is None:
            rep.fail("available", f"{it.name}: no covering")
            continue
        o = order_report(nerve(it.covering))
        rep.check("never_four", o["max_multiplicity"] <= 3, f"{it.name}: multiplicity {o['max_multiplicity']}")
        rep.check("three_iff_triple", (o["max_multiplicity"] == 3) == o["has_triple"], it.name)
        rep.check("real_paths", o["real_paths"], it.name)
        rep.stats[it.name] = o
    return rep


# 4: cohomology -------------------------------------------------------------------------
def cohomology_suite(insts: list[Instance], samples: int = 200, seed: int = 0, plain_samples: int = 20) -> Report:
    """Round trips δb → c1 on every covering nerve.  The equivariant gauge is the
    solver under test; the plain gauge is run on fewer samples to report how often
    averaging alone would have needed the constrained fallback."""
    rep = Report("cohomology suite")
    total, fallbacks = 0, 0
    for it in insts:
        if it.covering is None:
            rep.fail("available", f"{it.name}: no covering")
            continue
        cov = SymmetricCovering.of(it.covering)
        entry = {}
        for gauge, equivariant, count in (("equivariant", True, samples), ("plain", False, plain_samples)):
            rng = np.random.default_rng([seed, DOMAIN_NAMES.index(it.domain_name), COVERING_NAMES.index(it.cov_name)])
            fb = 0
            for s in range(count):
                c2 = coboundary(random_antisym(cov, 1, rng), cov)
                st: dict = {}
                try:
                    c1 = solve_antisym_h2(cov, c2, st, equivariant=equivariant)
                    ok = coboundary(c1, cov) == c2
                except CartanTilerError as exc:
                    ok, st = False, {"fallback": True}
                    rep.fail("exact", f"{it.name} {gauge} sample {s}: {exc}")
                rep.check("exact", ok, f"{it.name} {gauge} sample {s}")
                fb += int(st.get("fallback", False))
            entry[f"fallback_{gauge}"] = f"{fb}/{count}"
            if equivariant:
                total += count
                fallbacks += fb
        for n in (3, 4, 5):
            rep.check("higher_vanishing", check_higher_vanishing(cov, n), f"{it.name}: n={n}")
        entry["edges"] = len(cov.simplices(1))
        entry["triangles"] = len(cov.simplices(2))
        rep.stats[it.name] = entry
    rep.stats["fallback_rate"] = f"{fallbacks}/{total}"
    return rep


# 5: slice-regular algebra --------------------------------------------------------------
def random_poly(rng: np.random.Generator, deg: int, exact: bool) -> QPolynomial:
    d = int(rng.integers(0, deg + 1))
    nums = rng.integers(-9, 10, size=(d + 1, 4))
    if exact:
        dens = rng.integers(1, 9, size=(d + 1, 4))
        return QPolynomial([[F(int(a), int(b)) for a, b in zip(r, s)] for r, s in zip(nums, dens)])
    return QPolynomial(nums / 8.0, exact=False)


def submult_compacts() -> dict[str, AxSymCompact]:
    return {"unit_ball": AxSymCompact.ball(0, 1),
            "ball_off_centre": AxSymCompact.ball(F(1, 2), F(3, 4)),
            "square_trace": AxSymCompact(Region.box(-1, -1, 1, 1))}


def slicereg_suite(seed: int = 0, count: int = 1000, degree: int = 8, triples: int | None = None,
                   sampling: int = 5) -> Report:
    rep = Report("slicereg suite")
    rng = np.random.default_rng(seed)
    for i in range(count):
        f, g = random_poly(rng, degree, True), random_poly(rng, degree, True)
        rep.check("dual_route_exact", _conv_route(f, g) == _component_route(f, g), f"pair {i}")
    worst = 0.0
    for i in range(count):
        f, g = random_poly(rng, degree, False), random_poly(rng, degree, False)
        q = Quaternion(*rng.uniform(-1, 1, size=4), exact=False)
        a, b = eval_formula_a(f, g, q), evaluate(star_product(f, g), q)
        rel = abs(a - b) / abs(b) if not b.is_zero() else abs(a)
        worst = max(worst, rel)
        rep.check("formula_a", rel <= 1e-10, f"pair {i}: relative {rel:.3g}")
    for i in range(count // 10 if triples is None else triples):
        f, g, h = (random_poly(rng, degree, True) for _ in range(3))
        rep.check("associative", star_product(star_product(f, g), h) == star_product(f, star_product(g, h)),
                  f"triple {i}")
    excess = -1.0
    compacts = submult_compacts()
    for i in range(count):
        f, g = random_poly(rng, degree, False), random_poly(rng, degree, False)
        fg = star_product(f, g)
        for name, k in compacts.items():
            lhs, rhs = sup_norm(fg, k, sampling), sup_norm(f, k, sampling) * sup_norm(g, k, sampling)
            ex = (lhs - rhs) / rhs if rhs else lhs
            excess = max(excess, ex)
            rep.check("submultiplicative", ex <= 1e-12, f"pair {i} on {name}: excess {ex:.3g}")
    rep.stats.update({"seed": seed, "pairs": count, "formula_a_worst_rel": float(f"{worst:.3e}"),
                      "submult_worst_excess": float(f"{excess:.3e}")})
    return rep


# 6: exp/log ----------------------------------------------------------------------------
def exp_log_suite(seed: int = 0, count: int = 100, n_terms: int = 40, r: float = 0.5,
                  degree: int = 3, sampling: int = 6) -> Report:
    """exp_*(log_*(1 − f)) against 1 − f on the unit ball for seeded f scaled so that
    the measured |f|_K lies in (r/10, r]; the error is compared with the tail bound
    for the hypothesis |f|_K ≤ r."""
    rep = Report("exp/log suite")
    rng = np.random.default_rng(seed)
    k = AxSymCompact.ball(0, 1)
    x, y = k.samples(sampling)
    one = QPolynomial.constant((1, 0, 0, 0), exact=False)
    bound = exp_log_bound(r, n_terms)
    worst = 0.0
    below_own = 0
    for i in range(count):
        d = int(rng.integers(1, degree + 1))
        f = QPolynomial(rng.normal(size=(d + 1, 4)), exact=False)
        target = r * float(rng.uniform(0.1, 1.0))
        f = f.scale(target / sup_norm(f, k, sampling))
        m = sup_norm(f, k, sampling)
        if m > r:
            f = f.scale(r / m)
            m = sup_norm(f, k, sampling)
        rep.check("hypothesis", m <= r, f"f {i}: measured {m:.17g}")
        g = exp_star(log_star_one_minus(f, n_terms, k, r=r, sampling=sampling), n_terms)
        err = float(sphere_max(g - (one - f), x, y).max())
        worst = max(worst, err / bound)
        below_own += int(err <= exp_log_bound(m, n_terms))
        rep.check("round_trip", err <= bound, f"f {i}: error {err:.3e} > bound {bound:.3e}")
    rep.stats.update({"seed": seed, "count": count, "n_terms": n_terms, "r": r,
                      "bound": float(f"{bound:.6e}"), "worst_error_over_bound": float(f"{worst:.3e}"),
                      "within_bound_at_measured_r": f"{below_own}/{count}"})
    return rep


# 7: lattice oracle ---------------------------------------------------------------------
def random_symmetric_domain(rng: np.random.Generator) -> Region:
    rects = []
    for _ in range(int(rng.integers(1, 4))):
        x0 = F(int(rng.integers(-16, 8)), 8)
        y0 = F(int(rng.integers(-12, 8)), 8)
        rects.append((x0, y0, x0 + F(int(rng.integers(4, 16)), 8), y0 + F(int(rng.integers(4, 12)), 8)))
    r = Region.from_rects(rects)
    return geo.symmetrize(r)


def seeded_tiling(seed: int) -> list[Region]:
    rng = np.random.default_rng([7, seed])
    d = random_symmetric_domain(rng)
    w = F(int(rng.integers(2, 7)), 16)
    sx = F(int(rng.integers(0, 8)), 64)
    h0 = F(int(rng.integers(1, 8)), 64)
    return [b.region for b in brick_tiles(d, w, w / 2, sx, h0)]


def lattice_suite(seed: int = 0, count: int = 50, factor: int = 4) -> Report:
    """Exact intersection lattice against the finer raster, for each seeded brick
    tiling and for the family obtained by fattening it."""
    rep = Report("lattice suite")
    sizes = []
    for s in range(count):
        tiles = seeded_tiling(seed * 1000 + s)
        ex = exact_lattice(tiles)
        rs = raster_lattice(tiles, factor=factor)
        rep.check("tiles_agree", ex == rs, f"tiling {s}: {sorted(ex ^ rs)[:5]}")
        adj: dict[int, set[int]] = {i: set() for i in range(len(tiles))}
        for key in ex:
            if len(key) == 2:
                adj[key[0]].add(key[1])
                adj[key[1]].add(key[0])
        fat = fatten(tiles, adj, F(1, 64))
        exf = exact_lattice(fat)
        rsf = raster_lattice(fat, factor=factor)
        rep.check("fattened_agree", exf == rsf, f"tiling {s}: {sorted(exf ^ rsf)[:5]}")
        sizes.append((len(tiles), len(ex), len(exf)))
    rep.stats.update({"seed": seed, "count": count, "factor": factor,
                      "tiles": sum(a for a, _, _ in sizes), "keys": sum(b + c for _, b, c in sizes)})
    return rep
