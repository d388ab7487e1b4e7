import json
from fractions import Fraction as F

import pytest

from cartan_tiler import io
from cartan_tiler.cli import main
from cartan_tiler.covering import CartanCovering, CoveringSpec
from cartan_tiler.geometry import Region, symmetrize
from cartan_tiler.slicereg import QPolynomial


def write(path, doc):
    path.write_text(io.dumps(doc))
    return str(path)


@pytest.fixture
def inputs(tmp_path):
    d = tmp_path / "in"
    d.mkdir()
    return {
        "domain": write(d / "square.json", {"schema": io.SCHEMA, "kind": "domain",
                                            "region": {"rects": [[-1, -1, 1, 1]]}}),
        "cov": write(d / "trivial.json", {"schema": io.SCHEMA, "kind": "cov", "trivial": True}),
        "f": write(d / "f.json", io.poly_doc(QPolynomial([(0, 0, 0, 0), (0, 1, 0, 0)]))),
        "g": write(d / "g.json", io.poly_doc(QPolynomial([(0, 0, 0, 0), (0, 0, 1, 0)]))),
    }


def report(out):
    return json.loads((out / "report.json").read_text())


def test_tile_cover_verify_render_pipeline(tmp_path, inputs):
    o = tmp_path / "o"
    base = ["--domain", inputs["domain"], "--cov", inputs["cov"], "--out-dir", str(o)]
    assert main(["tile", "--stages", "1", *base]) == 0
    assert report(o)["passed"]
    tiling = str(o / "tiling.json")
    assert main(["cover", "--tiling", tiling, *base]) == 0
    cov = str(o / "covering.json")
    assert main(["verify", "--tiling", tiling, "--covering", cov, *base]) == 0
    assert [r["name"] for r in report(o)["reports"]] == ["tiling", "cartan"]
    assert main(["render", "--tiling", tiling, "--out-dir", str(o)]) == 0
    assert (o / "tiling.svg").read_text().startswith("<svg")
    assert main(["cohomology", "suite", "--covering", cov, "--samples", "5", "--out-dir", str(o)]) == 0


def test_same_seed_gives_identical_bytes(tmp_path, inputs):
    outs = []
    for name in ("a", "b"):
        o = tmp_path / name
        argv = ["tile", "--stages", "1", "--seed", "3", "--domain", inputs["domain"], "--cov", inputs["cov"],
                "--out-dir", str(o)]
        assert main(argv) == 0
        outs.append(((o / "report.json").read_bytes(), (o / "tiling.json").read_bytes()))
    assert outs[0] == outs[1]


def test_star_and_eval(tmp_path, inputs):
    o = tmp_path / "o"
    assert main(["slicereg", "star", "--in", inputs["f"], inputs["g"], "--out-dir", str(o)]) == 0
    prod = io.poly_from_doc(io.load(o / "product.json"))
    assert prod == QPolynomial([(0, 0, 0, 0), (0, 0, 0, 0), (0, 0, 0, 1)])
    assert main(["slicereg", "eval", "--in", inputs["f"], inputs["g"], "--at", "1/2,0,1,0",
                 "--out-dir", str(o)]) == 0
    vals = json.loads((o / "values.json").read_text())
    assert vals["f"] == ["0", "1/2", "0", "-1"]
    assert main(["slicereg", "exp", "--in", inputs["f"], "--n-terms", "10", "--out-dir", str(o)]) == 0


def test_failed_verification_exits_1_and_still_reports(tmp_path, inputs):
    sets = tuple(symmetrize(Region.box(F(k, 8), 1, 2 + F(k, 8), 3)) for k in range(4))
    bad = write(tmp_path / "four.json", io.covering_doc(CartanCovering(sets, (F(1, 64),) * 4)))
    big = write(tmp_path / "big.json", io.spec_doc(CoveringSpec((Region.box(-8, -8, 8, 8),))))
    o = tmp_path / "o"
    assert main(["verify", "--covering", bad, "--cov", big, "--t", "0", "--out-dir", str(o)]) == 1
    rep = report(o)
    assert not rep["passed"]
    assert not rep["reports"][0]["checks"]["4_order"]


def test_log_outside_its_disc_exits_1(tmp_path):
    f = write(tmp_path / "f.json", io.poly_doc(QPolynomial([(0, 0, 0, 0), (F(11, 10), 0, 0, 0)])))
    o = tmp_path / "o"
    assert main(["slicereg", "exp", "--log", "--in", f, "--out-dir", str(o)]) == 1
    assert "DomainError" in report(o)["error"]


@pytest.mark.parametrize("case", ["bad_json", "wrong_kind", "non_dyadic", "precision", "quaternion"])
def test_malformed_input_exits_2_and_writes_nothing(tmp_path, inputs, capsys, case):
    o = tmp_path / "o"
    bad = tmp_path / "bad.json"
    argv = ["tile", "--domain", str(bad), "--cov", inputs["cov"], "--out-dir", str(o)]
    if case == "bad_json":
        bad.write_text("{")
    elif case == "wrong_kind":
        write(bad, {"schema": io.SCHEMA, "kind": "qpoly", "coeffs": []})
    elif case == "non_dyadic":
        write(bad, {"schema": io.SCHEMA, "kind": "domain", "region": {"rects": [[-1, -1, "1/3", 1]]}})
    elif case == "precision":
        argv = ["tile", "--domain", inputs["domain"], "--cov", inputs["cov"], "--precision", "2",
                "--out-dir", str(o)]
    else:
        argv = ["slicereg", "eval", "--in", inputs["f"], "--at", "1,2", "--out-dir", str(o)]
    assert main(argv) == 2
    assert "error:" in capsys.readouterr().err
    assert not o.exists()
