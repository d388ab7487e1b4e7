"""Versioned JSON documents.

Every document is an object with ``"schema": "cartan-tiler/1"`` and a
``"kind"``.  Numbers that must stay exact (coordinates, radii, deltas) are
written as strings like ``"3/8"``; regions are written as boundary rings of
``[num, exp, num, exp]`` vertices.  Readers raise SchemaError on anything
malformed.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import geometry as geo
from .cohomology import AntisymCochain, cochain_from_json, cochain_to_json
from .covering import CartanCovering, CoveringSpec
from .dyadic import dyadic
from .errors import SchemaError
from .geometry import Region
from .slicereg import QPolynomial, poly_from_json, poly_to_json
from .tiling.types import Tile, Tiling

SCHEMA = "cartan-tiler/1"


def frac_out(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _dy(v, what: str) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise SchemaError(f"{what}: expected a dyadic number, got {v!r}")
    try:
        return dyadic(v)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"{what}: {exc}") from None


def _need(obj: dict, key: str, typ, what: str):
    if key not in obj:
        raise SchemaError(f"{what}: missing '{key}'")
    if not isinstance(obj[key], typ):
        raise SchemaError(f"{what}: '{key}' has the wrong type")
    return obj[key]


def envelope(kind: str, body: dict) -> dict:
    return {"schema": SCHEMA, "kind": kind, **body}


def check_envelope(obj: Any, kinds: tuple[str, ...]) -> dict:
    if not isinstance(obj, dict):
        raise SchemaError("document must be a JSON object")
    if obj.get("schema") != SCHEMA:
        raise SchemaError(f"unsupported schema {obj.get('schema')!r}, expected {SCHEMA!r}")
    if obj.get("kind") not in kinds:
        raise SchemaError(f"expected kind in {kinds}, got {obj.get('kind')!r}")
    return obj


# regions ------------------------------------------------------------------------------
def region_out(r: Region) -> dict:
    return geo.region_to_json(r)


def region_in(obj: Any, what: str = "region") -> Region:
    """Rings as written by region_out, or ``{"rects": [[x0, y0, x1, y1], …]}``."""
    if not isinstance(obj, dict):
        raise SchemaError(f"{what}: expected an object")
    if "rects" in obj:
        rects = obj["rects"]
        if not isinstance(rects, list):
            raise SchemaError(f"{what}: 'rects' must be a list")
        out = []
        for r in rects:
            if not (isinstance(r, list) and len(r) == 4):
                raise SchemaError(f"{what}: bad rectangle {r!r}")
            x0, y0, x1, y1 = (_dy(v, what) for v in r)
            if not (x0 < x1 and y0 < y1):
                raise SchemaError(f"{what}: degenerate rectangle {r!r}")
            out.append((x0, y0, x1, y1))
        return Region.from_rects(out) if out else Region.empty()
    try:
        return geo.region_from_json(obj)
    except ValueError as exc:
        raise SchemaError(f"{what}: {exc}") from None


def region_doc(r: Region) -> dict:
    return envelope("region", {"region": region_out(r)})


def domain_from_doc(obj: Any) -> Region:
    obj = check_envelope(obj, ("region", "domain"))
    r = region_in(_need(obj, "region", dict, "domain"), "domain")
    if r.is_empty:
        raise SchemaError("domain: empty region")
    if not r.is_symmetric():
        raise SchemaError("domain: region is not symmetric about the real axis")
    return r


# covering specs ------------------------------------------------------------------------
def spec_doc(spec: CoveringSpec) -> dict:
    return envelope("cov", {"members": [region_out(m) for m in spec.members],
                            "z": [[frac_out(x), frac_out(y)] for x, y in spec.z_orbits]})


def spec_from_doc(obj: Any, domain: Region | None = None) -> CoveringSpec:
    """``{"trivial": true}`` stands for the one-member covering by the domain."""
    obj = check_envelope(obj, ("cov",))
    z = obj.get("z", [])
    if not isinstance(z, list) or not all(isinstance(p, list) and len(p) == 2 for p in z):
        raise SchemaError("cov: 'z' must be a list of [x, y] pairs")
    pts = tuple((_dy(x, "cov z"), _dy(y, "cov z")) for x, y in z)
    if obj.get("trivial"):
        if domain is None:
            raise SchemaError("cov: a trivial covering needs a domain")
        return CoveringSpec((domain,), pts)
    mem = _need(obj, "members", list, "cov")
    members = tuple(region_in(m, f"cov member {i}") for i, m in enumerate(mem))
    for i, m in enumerate(members):
        if m.is_empty or not m.is_symmetric():
            raise SchemaError(f"cov member {i} is empty or not symmetric")
    if not members:
        raise SchemaError("cov: no members")
    return CoveringSpec(members, pts)


# tilings ------------------------------------------------------------------------------
def tiling_doc(t: Tiling) -> dict:
    return envelope("tiling", {
        "delta": frac_out(t.delta),
        "tiles": [{"index": i, "region": region_out(x.region), "cov": x.cov, "stage": x.stage, "role": x.role}
                  for i, x in enumerate(t.tiles)],
        "deltas": {str(k): frac_out(v) for k, v in sorted(t.deltas.items())},
    })


def tiling_from_doc(obj: Any) -> Tiling:
    obj = check_envelope(obj, ("tiling",))
    tiles = []
    for i, e in enumerate(_need(obj, "tiles", list, "tiling")):
        if not isinstance(e, dict):
            raise SchemaError(f"tile {i}: expected an object")
        r = region_in(_need(e, "region", dict, f"tile {i}"), f"tile {i}")
        cov, stage = e.get("cov", -1), e.get("stage", 0)
        if not isinstance(cov, int) or not isinstance(stage, int):
            raise SchemaError(f"tile {i}: 'cov' and 'stage' must be integers")
        if e.get("index", i) != i:
            raise SchemaError(f"tile {i}: index {e.get('index')!r} out of order")
        tiles.append(Tile(r, i, cov, stage, str(e.get("role", "brick"))))
    deltas = obj.get("deltas")
    if deltas is None:
        deltas = {"0": obj["delta"]} if "delta" in obj else {}
    if not isinstance(deltas, dict):
        raise SchemaError("tiling: 'deltas' must be an object")
    try:
        d = {int(k): Fraction(v) for k, v in deltas.items()}
    except (TypeError, ValueError):
        raise SchemaError("tiling: bad 'deltas'") from None
    return Tiling(tuple(tiles), d)


# coverings ----------------------------------------------------------------------------
def covering_doc(c: CartanCovering) -> dict:
    return envelope("covering", {"sets": [region_out(a) for a in c.closures],
                                 "eps": [frac_out(e) for e in c.eps]})


def covering_from_doc(obj: Any) -> CartanCovering:
    obj = check_envelope(obj, ("covering",))
    sets = tuple(region_in(s, f"set {i}") for i, s in enumerate(_need(obj, "sets", list, "covering")))
    eps = tuple(_dy(e, "eps") for e in _need(obj, "eps", list, "covering"))
    if len(eps) != len(sets):
        raise SchemaError("covering: 'sets' and 'eps' differ in length")
    if any(e < 0 for e in eps):
        raise SchemaError("covering: negative eps")
    return CartanCovering(sets, eps)


# cochains and polynomials --------------------------------------------------------------
def cochain_doc(c: AntisymCochain) -> dict:
    return envelope("cochain", cochain_to_json(c))


def cochain_from_doc(obj: Any) -> AntisymCochain:
    obj = check_envelope(obj, ("cochain",))
    if not isinstance(obj.get("degree"), int) or obj["degree"] < 0:
        raise SchemaError("cochain: 'degree' must be a nonnegative integer")
    vals = obj.get("values", [])
    if not isinstance(vals, list):
        raise SchemaError("cochain: 'values' must be a list")
    for e in vals:
        if not (isinstance(e, dict) and isinstance(e.get("tuple"), list) and isinstance(e.get("n"), int)
                and all(isinstance(i, int) for i in e["tuple"]) and len(e["tuple"]) == obj["degree"] + 1):
            raise SchemaError(f"cochain: bad entry {e!r}")
    try:
        return cochain_from_json(obj)
    except ValueError as exc:
        raise SchemaError(f"cochain: {exc}") from None


def poly_doc(f: QPolynomial) -> dict:
    return envelope("qpoly", poly_to_json(f))


def poly_from_doc(obj: Any, exact: bool | None = None) -> QPolynomial:
    obj = check_envelope(obj, ("qpoly",))
    cs = _need(obj, "coeffs", list, "qpoly")
    for c in cs:
        if not (isinstance(c, list) and len(c) == 4
                and all(isinstance(x, (int, float, str)) and not isinstance(x, bool) for x in c)):
            raise SchemaError(f"qpoly: bad coefficient {c!r}")
    try:
        return poly_from_json(obj, exact)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"qpoly: {exc}") from None


# files --------------------------------------------------------------------------------
def _default(o):
    if isinstance(o, Fraction):
        return frac_out(o)
    if isinstance(o, (set, frozenset, tuple)):
        return sorted(o) if isinstance(o, (set, frozenset)) else list(o)
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=True, default=_default) + "\n"


def load(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from None
    except OSError as exc:
        raise SchemaError(f"{path}: {exc.strerror}") from None
