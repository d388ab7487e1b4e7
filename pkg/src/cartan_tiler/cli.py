"""Command-line front end.

Every run writes ``report.json`` (plus its artifacts) into ``--out-dir``.
Exit status: 0 when every requested verification passes, 1 when one fails
(the report is still written), 2 when an input is malformed (nothing is
written).
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import geometry as geo
from . import io, suites
from .cohomology import (SymmetricCovering, check_higher_vanishing, coboundary, is_antisymmetric,
                         random_antisym, solve_antisym_h2)
from .covering import DEFAULT_T, cartan_from_tiling, nerve, order_report, verify_cartan
from .dyadic import DEFAULT_PRECISION, dyadic
from .errors import CartanTilerError, SchemaError
from .exhaustion import build_exhaustion, is_runge_in
from .render import render_svg, tiling_vertices
from .report import Report
from .slicereg import (AxSymCompact, NumericDegradation, Quaternion, eval_formula_a, evaluate, exp_star,
                       log_star_one_minus, star_product)
from .tiling.construct import tile_domain
from .tiling.verify import verify_tiling

log = logging.getLogger(__name__)


@dataclass
class RunConfig:
    command: str
    inputs: dict[str, str] = field(default_factory=dict)
    precision: int = DEFAULT_PRECISION
    t_samples: tuple[Fraction, ...] = DEFAULT_T
    seed: int = 0
    out_dir: Path = Path(".")
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.precision < 4:
            raise SchemaError("precision budget must be at least 4")


@dataclass
class Outcome:
    reports: list[Report] = field(default_factory=list)
    files: dict[str, str] = field(default_factory=dict)
    error: str | None = None
    primary: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(r.passed for r in self.reports)


def _load(cfg: RunConfig, key: str, reader: Callable, *extra):
    path = cfg.inputs.get(key)
    if path is None:
        raise SchemaError(f"missing --{key.replace('_', '-')}")
    return reader(io.load(path), *extra)


def _maybe(cfg: RunConfig, key: str, reader: Callable, *extra):
    return _load(cfg, key, reader, *extra) if cfg.inputs.get(key) else None


# subcommands ---------------------------------------------------------------------------
def cmd_exhaust(cfg: RunConfig) -> Outcome:
    domain = _load(cfg, "domain", io.domain_from_doc)
    out = Outcome()
    ex = build_exhaustion(domain, stages=cfg.options.get("stages", 2), precision=cfg.precision)
    rep = Report("exhaustion")
    for n, k in enumerate(ex.stages):
        rep.check("symmetric", k.is_symmetric(), f"K_{n} is not symmetric")
        rep.check("runge", is_runge_in(k, domain), f"K_{n} is not Runge in the domain")
        rep.check("inside", domain.contains_in_interior(k), f"K_{n} leaves the domain")
        if n:
            rep.check("nested", k.contains_in_interior(ex.stages[n - 1]), f"K_{n - 1} not inside int K_{n}")
    rep.stats.update({"stages": len(ex.stages), "shift": ex.shift, "repairs": list(ex.repairs)})
    out.reports.append(rep)
    out.primary = "exhaustion.json"
    out.files["exhaustion.json"] = io.dumps(io.envelope("exhaustion", {
        "stages": [io.region_out(k) for k in ex.stages], "shift": ex.shift}))
    return out


def cmd_tile(cfg: RunConfig) -> Outcome:
    domain = _load(cfg, "domain", io.domain_from_doc)
    spec = _load(cfg, "cov", io.spec_from_doc, domain)
    stages = cfg.options.get("stages", 2)
    t = tile_domain(domain, spec.members, spec.z_orbits, stages=stages, precision=cfg.precision,
                    seed=cfg.seed)
    target = t.meta["exhaustion"][stages]
    rep = verify_tiling(t, target, spec.members, spec.z_orbits, prefixes=True)
    rep.stats.update({"retries": t.meta["retries"], "fallbacks": t.meta["fallbacks"],
                      "deltas": {str(k): io.frac_out(v) for k, v in sorted(t.deltas.items())}})
    return Outcome([rep], {"tiling.json": io.dumps(io.tiling_doc(t)),
                           "target.json": io.dumps(io.region_doc(target))}, primary="tiling.json")


def cmd_cover(cfg: RunConfig) -> Outcome:
    t = _load(cfg, "tiling", io.tiling_from_doc)
    domain = _maybe(cfg, "domain", io.domain_from_doc)
    spec = _load(cfg, "cov", io.spec_from_doc, domain)
    c = cartan_from_tiling(t, spec, t_samples=cfg.t_samples)
    rep = Report("cartan")
    stored = c.meta["report"]
    for k, v in stored["checks"].items():
        rep.check(k, v)
        for f in stored["findings"].get(k, []):
            rep.findings[k].append(f)
    rep.stats.update(stored["stats"])
    order = order_report(nerve(c))
    rep.check("order_bound", order["order_ok"], f"multiplicity {order['max_multiplicity']}")
    rep.check("real_chain", order["real_paths"], "real-meeting nerve is not a union of paths")
    rep.stats.update({"order": order, "radius": io.frac_out(c.meta["radius"]), "rounds": c.meta["rounds"]})
    return Outcome([rep], {"covering.json": io.dumps(io.covering_doc(c))}, primary="covering.json")


def cmd_verify(cfg: RunConfig) -> Outcome:
    domain = _maybe(cfg, "domain", io.domain_from_doc)
    spec = _load(cfg, "cov", io.spec_from_doc, domain)
    target = _maybe(cfg, "target", io.domain_from_doc)
    t = _maybe(cfg, "tiling", io.tiling_from_doc)
    c = _maybe(cfg, "covering", io.covering_from_doc)
    if t is None and c is None:
        raise SchemaError("verify needs --tiling or --covering")
    out = Outcome()
    if t is not None:
        k = target if target is not None else geo.union(*t.regions)
        out.reports.append(verify_tiling(t, k, spec.members, spec.z_orbits, prefixes=True))
    if c is not None:
        rep = verify_cartan(c, spec, cfg.t_samples, domain=target)
        order = order_report(nerve(c))
        rep.check("order_bound", order["order_ok"], f"multiplicity {order['max_multiplicity']}")
        rep.check("real_chain", order["real_paths"], "real-meeting nerve is not a union of paths")
        rep.stats["order"] = order
        out.reports.append(rep)
    return out


def cmd_cohomology(cfg: RunConfig) -> Outcome:
    c = _load(cfg, "covering", io.covering_from_doc)
    cov = SymmetricCovering.of(c)
    action = cfg.options["action"]
    rep = Report(f"cohomology {action}")
    out = Outcome([rep])
    if action == "solve":
        c2 = _load(cfg, "cochain", io.cochain_from_doc)
        rep.check("input_degree", c2.degree == 2, f"degree {c2.degree}")
        if c2.degree != 2:
            return out
        rep.check("input_antisymmetric", is_antisymmetric(c2, cov), "input is not antisymmetric")
        rep.check("input_cocycle", coboundary(c2, cov).is_zero(), "input is not a cocycle")
        if not rep.passed:
            return out
        stats: dict = {}
        c1 = solve_antisym_h2(cov, c2, stats)
        rep.check("exact", coboundary(c1, cov) == c2, "δc1 differs from the input")
        rep.check("antisymmetric", is_antisymmetric(c1, cov), "solution is not antisymmetric")
        rep.stats.update(stats)
        out.files["cochain.json"] = io.dumps(io.cochain_doc(c1))
        out.primary = "cochain.json"
        return out
    # suite: seeded round trips for both gauges
    samples = cfg.options.get("samples", 200)
    for gauge, equivariant in (("equivariant", True), ("plain", False)):
        rng = np.random.default_rng(cfg.seed)
        fallbacks = 0
        for s in range(samples):
            b = random_antisym(cov, 1, rng)
            c2 = coboundary(b, cov)
            st: dict = {}
            c1 = solve_antisym_h2(cov, c2, st, equivariant=equivariant)
            rep.check("exact", coboundary(c1, cov) == c2, f"{gauge} sample {s}")
            fallbacks += int(st["fallback"])
        rep.stats[f"fallback_{gauge}"] = f"{fallbacks}/{samples}"
    for n in (3, 4, 5):
        rep.check(f"higher_vanishing_{n}", check_higher_vanishing(cov, n))
    rep.stats["samples"] = samples
    return out


def _quat(text: str, exact: bool) -> Quaternion:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise SchemaError("a quaternion is given as a0,a1,a2,a3")
    try:
        return Quaternion(*(Fraction(p) if exact else float(Fraction(p)) for p in parts), exact=exact)
    except (ValueError, ZeroDivisionError):
        raise SchemaError(f"bad quaternion {text!r}") from None


def cmd_slicereg(cfg: RunConfig) -> Outcome:
    action = cfg.options["action"]
    exact = cfg.options.get("exact")
    rep = Report(f"slicereg {action}")
    out = Outcome([rep])
    ins = cfg.options.get("in") or []
    polys = [io.poly_from_doc(io.load(p), exact) for p in ins]
    if action == "star":
        if len(polys) != 2:
            raise SchemaError("star needs two --in files")
        f, g = polys
        if f.exact != g.exact:
            raise SchemaError("inputs mix exact and double coefficients")
        try:
            h = star_product(f, g)
            rep.check("dual_route", True)
        except (AssertionError, NumericDegradation) as exc:
            rep.fail("dual_route", str(exc))
            return out
        out.files["product.json"] = io.dumps(io.poly_doc(h))
    elif action == "eval":
        if not polys:
            raise SchemaError("eval needs --in")
        f = polys[0]
        q = _quat(cfg.options.get("at") or "0,0,0,0", f.exact)
        res = {"f": [io.frac_out(x) if f.exact else x for x in evaluate(f, q)]}
        if len(polys) > 1:
            g = polys[1]
            a = eval_formula_a(f, g, q)
            b = evaluate(star_product(f, g), q)
            tol = 0 if f.exact else 1e-10 * max(abs(b), 1.0)
            rep.check("formula_a", abs(a - b) <= tol, f"|formula − star| = {abs(a - b):.3g}")
            res["star"] = [io.frac_out(x) if f.exact else x for x in b]
        out.files["values.json"] = io.dumps(io.envelope("values", res))
    elif action == "exp":
        if not polys:
            raise SchemaError("exp needs --in")
        f = polys[0]
        n = cfg.options.get("n_terms", 20)
        if cfg.options.get("log"):
            k = AxSymCompact.ball(0, 1)
            h = log_star_one_minus(f.to_double() if f.exact else f, n, k)
        else:
            h = exp_star(f, n)
        out.files["series.json"] = io.dumps(io.poly_doc(h))
    else:
        out.reports = [suites.slicereg_suite(cfg.seed, cfg.options.get("count", 100))]
    return out


def cmd_suite(cfg: RunConfig) -> Outcome:
    names = cfg.options["names"]
    doms = cfg.options.get("domains") or list(suites.DOMAIN_NAMES)
    out = Outcome()
    insts = None
    if any(n in names for n in ("tiling", "cartan", "order", "cohomology")):
        insts = suites.instances(doms)
        out.reports.append(suites.tiling_suite(insts, precision=cfg.precision, seed=cfg.seed))
    if any(n in names for n in ("cartan", "order", "cohomology")):
        out.reports.append(suites.cartan_suite(insts, cfg.t_samples))
    if "order" in names:
        out.reports.append(suites.order_suite(insts))
    if "cohomology" in names:
        out.reports.append(suites.cohomology_suite(insts, cfg.options.get("samples", 200), cfg.seed))
    if "slicereg" in names:
        out.reports.append(suites.slicereg_suite(cfg.seed, cfg.options.get("count", 1000)))
    if "explog" in names:
        out.reports.append(suites.exp_log_suite(cfg.seed))
    if "lattice" in names:
        out.reports.append(suites.lattice_suite(cfg.seed))
    return out


def cmd_render(cfg: RunConfig) -> Outcome:
    regions, title, marks = None, "", []
    for key, reader, what in (("tiling", io.tiling_from_doc, "tiling"),
                              ("covering", io.covering_from_doc, "covering"),
                              ("region", io.domain_from_doc, "region")):
        obj = _maybe(cfg, key, reader)
        if obj is None:
            continue
        if what == "tiling":
            regions = obj.regions
            marks = tiling_vertices(regions)
        elif what == "covering":
            regions = list(obj.closures)
        else:
            regions = [obj]
        title = what
        break
    if regions is None:
        raise SchemaError("render needs --tiling, --covering or --region")
    rep = Report("render")
    rep.stats["shapes"] = len(regions)
    svg = render_svg(regions, title=title, opacity=0.55 if title == "covering" else 1.0,
                     labels=cfg.options.get("labels", False), vertices=marks)
    return Outcome([rep], {f"{title}.svg": svg})


COMMANDS = {"exhaust": cmd_exhaust, "tile": cmd_tile, "cover": cmd_cover, "verify": cmd_verify,
            "cohomology": cmd_cohomology, "slicereg": cmd_slicereg, "render": cmd_render, "suite": cmd_suite}

SUITES = ("tiling", "cartan", "order", "cohomology", "slicereg", "explog", "lattice")


def run(cfg: RunConfig) -> int:
    """Run one command, write its artifacts and report, return the exit status."""
    try:
        out = COMMANDS[cfg.command](cfg)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CartanTilerError, ValueError, ArithmeticError) as exc:
        out = Outcome(error=f"{type(exc).__name__}: {exc}")
    doc = io.envelope("report", {
        "command": cfg.command,
        "options": {k: v for k, v in sorted(cfg.options.items())},
        "inputs": dict(sorted(cfg.inputs.items())),
        "seed": cfg.seed,
        "precision": cfg.precision,
        "t_samples": [io.frac_out(t) for t in cfg.t_samples],
        "passed": out.passed,
        "error": out.error,
        "reports": [r.as_dict() for r in out.reports],
        "outputs": sorted(out.files),
    })
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    target = cfg.options.get("out")
    for name, text in sorted(out.files.items()):
        path = Path(target) if target and name == out.primary else cfg.out_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    (cfg.out_dir / "report.json").write_text(io.dumps(doc), encoding="utf-8")
    for r in out.reports:
        print(r)
    if out.error:
        print(f"error: {out.error}", file=sys.stderr)
    return 0 if out.passed else 1


def _t_samples(text: str) -> tuple[Fraction, ...]:
    try:
        ts = tuple(dyadic(p.strip()) for p in text.split(",") if p.strip())
    except (ValueError, ZeroDivisionError):
        raise SchemaError(f"bad --t-samples {text!r}") from None
    if not ts or any(not 0 <= t <= 1 for t in ts):
        raise SchemaError("t samples must be dyadic numbers in [0, 1]")
    return ts


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION,
                        help="largest dyadic exponent allowed in constructions")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--t-samples", "--t", dest="t_samples", default="0,1/4,1/2,3/4,1")
    common.add_argument("--out-dir", default=".")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="cartan-tiler", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("exhaust", parents=[common])
    s.add_argument("--out", help="path for the main artifact (default: inside --out-dir)")
    s.add_argument("--domain", required=True)
    s.add_argument("--stages", type=int, default=2)

    s = sub.add_parser("tile", parents=[common])
    s.add_argument("--out", help="path for the main artifact (default: inside --out-dir)")
    s.add_argument("--domain", required=True)
    s.add_argument("--cov", "--spec", dest="cov", required=True)
    s.add_argument("--stages", type=int, default=2)

    s = sub.add_parser("cover", parents=[common])
    s.add_argument("--out", help="path for the main artifact (default: inside --out-dir)")
    s.add_argument("--tiling", required=True)
    s.add_argument("--cov", "--spec", dest="cov", required=True)
    s.add_argument("--domain")

    s = sub.add_parser("verify", parents=[common])
    s.add_argument("--cov", "--spec", dest="cov", required=True)
    s.add_argument("--domain")
    s.add_argument("--tiling")
    s.add_argument("--covering")
    s.add_argument("--target", help="region the tiling or covering must cover")

    s = sub.add_parser("cohomology", parents=[common])
    s.add_argument("--out", help="path for the solution cochain")
    s.add_argument("action", choices=["solve", "suite"])
    s.add_argument("--covering", required=True)
    s.add_argument("--cochain", "--cocycle", dest="cochain")
    s.add_argument("--samples", type=int, default=200)

    s = sub.add_parser("slicereg", parents=[common])
    s.add_argument("action", choices=["star", "eval", "exp", "check"])
    s.add_argument("--in", dest="inputs", nargs="+", default=[])
    s.add_argument("--at", help="quaternion a0,a1,a2,a3")
    s.add_argument("--n-terms", type=int, default=20)
    s.add_argument("--log", action="store_true", help="log_*(1 − f) instead of exp_*(f)")
    s.add_argument("--double", action="store_true", help="read coefficients in double mode")
    s.add_argument("--count", type=int, default=100)

    s = sub.add_parser("suite", parents=[common], help="seeded acceptance suites")
    s.add_argument("names", nargs="+", choices=SUITES + ("all",))
    s.add_argument("--domains", nargs="+", choices=suites.DOMAIN_NAMES)
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--count", type=int, default=1000)

    s = sub.add_parser("render", parents=[common])
    s.add_argument("--tiling")
    s.add_argument("--covering")
    s.add_argument("--region")
    s.add_argument("--labels", action="store_true")
    return p


def config_from_args(a: argparse.Namespace) -> RunConfig:
    inputs = {k: getattr(a, k) for k in ("domain", "cov", "tiling", "covering", "cochain", "region", "target")
              if getattr(a, k, None)}
    opts: dict = {}
    if getattr(a, "out", None):
        opts["out"] = a.out
    if a.command in ("exhaust", "tile"):
        opts["stages"] = a.stages
    if a.command == "cohomology":
        opts.update(action=a.action, samples=a.samples)
    if a.command == "slicereg":
        opts.update(action=a.action, n_terms=a.n_terms, log=a.log, count=a.count,
                    at=a.at, exact=False if a.double else None)
        opts["in"] = list(a.inputs)
    if a.command == "render":
        opts["labels"] = a.labels
    if a.command == "suite":
        opts.update(names=list(SUITES) if "all" in a.names else sorted(set(a.names), key=SUITES.index),
                    domains=a.domains, samples=a.samples, count=a.count)
    return RunConfig(a.command, inputs, a.precision, _t_samples(a.t_samples), a.seed, Path(a.out_dir), opts)


def main(argv: list[str] | None = None) -> int:
    p = build_parser()
    a = p.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = config_from_args(a)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
