import json
from fractions import Fraction as F

import pytest
from hypothesis import given

from cartan_tiler import io
from cartan_tiler.cohomology import AntisymCochain
from cartan_tiler.covering import CoveringSpec
from cartan_tiler.errors import SchemaError
from cartan_tiler.geometry import Region
from cartan_tiler.slicereg import QPolynomial

from helpers import rect_lists

SQUARE = Region.box(-1, -1, 1, 1)


def reload(doc):
    return json.loads(io.dumps(doc))


@given(rect_lists)
def test_region_document_round_trip(rects):
    r = Region.from_rects(rects)
    assert io.region_in(reload(io.region_doc(r))["region"]) == r


def test_rects_shorthand_and_string_fractions():
    doc = {"schema": io.SCHEMA, "kind": "domain", "region": {"rects": [["-1/2", -1, 0.5, "1"]]}}
    assert io.domain_from_doc(doc) == Region.box(F(-1, 2), -1, F(1, 2), 1)


def test_model_documents_round_trip(models):
    t, spec, c = models["annulus"]
    back = io.tiling_from_doc(reload(io.tiling_doc(t)))
    assert back.regions == t.regions and back.deltas == t.deltas
    assert [x.stage for x in back.tiles] == [x.stage for x in t.tiles]
    cb = io.covering_from_doc(reload(io.covering_doc(c)))
    assert cb.closures == c.closures and cb.eps == c.eps
    sb = io.spec_from_doc(reload(io.spec_doc(spec)))
    assert sb.members == spec.members


def test_cochain_and_polynomial_round_trip():
    c = AntisymCochain(2, {(0, 1, 2): 3, (0, 2, 3): -1})
    assert io.cochain_from_doc(reload(io.cochain_doc(c))) == c
    f = QPolynomial([(1, F(1, 3), 0, -2), (0, 0, F(5, 7), 0)])
    assert io.poly_from_doc(reload(io.poly_doc(f))) == f


def test_trivial_spec_needs_a_domain():
    doc = {"schema": io.SCHEMA, "kind": "cov", "trivial": True, "z": [["1/4", 0]]}
    assert io.spec_from_doc(doc, SQUARE) == CoveringSpec((SQUARE,), ((F(1, 4), 0),))
    with pytest.raises(SchemaError):
        io.spec_from_doc(doc)


def test_dumps_is_canonical():
    a = io.dumps({"b": F(3, 8), "a": (1, 2)})
    assert a == io.dumps({"a": [1, 2], "b": "3/8"})
    assert a.endswith("\n")


@pytest.mark.parametrize("doc", [
    [],
    {"schema": "cartan-tiler/0", "kind": "domain", "region": {"rects": [[-1, -1, 1, 1]]}},
    {"schema": io.SCHEMA, "kind": "tiling", "region": {"rects": [[-1, -1, 1, 1]]}},
    {"schema": io.SCHEMA, "kind": "domain"},
    {"schema": io.SCHEMA, "kind": "domain", "region": {"rects": [[-1, -1, "1/3", 1]]}},
    {"schema": io.SCHEMA, "kind": "domain", "region": {"rects": [[1, -1, -1, 1]]}},
    {"schema": io.SCHEMA, "kind": "domain", "region": {"rects": [[0, 0, 1, 1]]}},
    {"schema": io.SCHEMA, "kind": "domain", "region": {"rects": [[0, 0, True, 1]]}},
    {"schema": io.SCHEMA, "kind": "domain", "region": {"rects": []}},
])
def test_bad_domains_are_rejected(doc):
    with pytest.raises(SchemaError):
        io.domain_from_doc(doc)


def test_other_bad_documents_are_rejected():
    env = lambda kind, **kw: {"schema": io.SCHEMA, "kind": kind, **kw}  # noqa: E731
    sq = {"rects": [[-1, -1, 1, 1]]}
    bad = [
        (io.covering_from_doc, env("covering", sets=[sq], eps=[])),
        (io.covering_from_doc, env("covering", sets=[sq], eps=["-1/4"])),
        (io.tiling_from_doc, env("tiling", tiles=[{"region": sq, "index": 3}])),
        (io.tiling_from_doc, env("tiling", tiles=[{"region": sq, "stage": "0"}])),
        (io.cochain_from_doc, env("cochain", degree=2, values=[{"tuple": [0, 1], "n": 1}])),
        (io.cochain_from_doc, env("cochain", degree=-1, values=[])),
        (io.poly_from_doc, env("qpoly", coeffs=[[1, 2, 3]])),
        (io.spec_from_doc, env("cov", members=[{"rects": [[0, 0, 1, 1]]}])),
        (io.spec_from_doc, env("cov", members=[])),
    ]
    for reader, doc in bad:
        with pytest.raises(SchemaError):
            reader(doc)


def test_load_reports_bad_files(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    with pytest.raises(SchemaError, match="not valid JSON"):
        io.load(p)
    with pytest.raises(SchemaError):
        io.load(tmp_path / "missing.json")
