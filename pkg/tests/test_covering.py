from fractions import Fraction as F

import pytest

from cartan_tiler import geometry as geo
from cartan_tiler.covering import (CartanCovering, CoveringSpec, cartan_from_tiling, cartan_string, nerve,
                                   order_report, verify_cartan)
from cartan_tiler.geometry import Region
from cartan_tiler.tiling import Tile, Tiling
from cartan_tiler.tiling.necklace import real_intervals

T_SAMPLES = [F(0), F(1, 4), F(1, 2), F(3, 4), F(1)]
BIG = Region.box(-8, -8, 8, 8)


def test_one_tile_gives_a_one_set_covering():
    sq = Region.box(-1, -1, 1, 1)
    spec = CoveringSpec((geo.offset(sq, F(1, 4)),))
    c = cartan_from_tiling(Tiling((Tile(sq),), {0: F(4)}), spec)
    assert len(c) == 1
    assert verify_cartan(c, spec, T_SAMPLES).passed


@pytest.mark.parametrize("kind", ["square", "annulus", "square_pair"])
def test_model_coverings_pass_at_all_samples(models, kind):
    # [DERIVED] construction, then the verifier at five offsets
    t, spec, c = models[kind]
    rep = verify_cartan(c, spec, T_SAMPLES)
    assert rep.passed, rep.failed_checks()
    assert rep.stats["max_multiplicity"] <= 3


def test_real_pairs_meet_the_axis(models):
    t, spec, c = models["square"]
    real = [i for i, a in enumerate(c.closures) if a.meets_real()]
    for i in real:
        for j in real:
            if i < j:
                meet = geo.intersect(c.closures[i], c.closures[j])
                assert meet.is_empty or meet.meets_real()


@pytest.mark.parametrize("kind", ["square", "annulus", "square_pair"])
def test_sets_cover_their_tiles(models, kind):
    t, spec, c = models[kind]
    for tile, a in zip(t.regions, c.closures):
        assert a.contains_in_interior(tile)
        assert geo.is_closed_basic(a) and geo.is_open_basic(a)
    assert geo.union(*c.closures).contains(geo.union(*t.regions))


def test_each_real_set_meets_one_real_interval(models):
    for t, spec, c in models.values():
        for a in c.closures:
            if a.meets_real():
                assert len(real_intervals(a)) == 1


def test_top_neighbourhood_is_extended_over_the_lower_tiles():
    # two tiles side by side with one on top of both, all mirror pairs
    ups = [Region.box(0, 1, 1, 2), Region.box(1, 1, 2, 2), Region.box(0, 2, 2, 3)]
    t = Tiling(tuple(Tile(geo.symmetrize(u)) for u in ups), {0: F(4)})
    spec = CoveringSpec((geo.symmetrize(Region.box(-1, F(1, 2), 3, 4)),))
    c = cartan_from_tiling(t, spec, t_samples=T_SAMPLES)
    r = c.meta["radius"]
    top = t.regions[2]
    assert c.closures[2] != geo.offset(top, r / 4)
    assert geo.offset(top, r * 3 / 4).contains(c.closures[2])
    assert verify_cartan(c, spec, T_SAMPLES).passed


def test_four_fold_overlap_fails_condition_4():
    sets = tuple(geo.symmetrize(Region.box(F(k, 8), 1, 2 + F(k, 8), 3)) for k in range(4))
    rep = verify_cartan(CartanCovering(sets, (F(1, 64),) * 4), CoveringSpec((BIG,)), [0])
    assert not rep.checks["4_order"]


def test_real_sets_meeting_only_off_axis_fail_condition_3():
    # a C opening to the right, and a square in its mouth
    c_shape = Region.from_rects([(-3, -1, -1, 1), (-3, F(1, 2), 0, 1), (-3, -1, 0, F(-1, 2))])
    plug = Region.box(F(-1, 2), -1, 1, 1)
    meet = geo.intersect(c_shape, plug)
    assert not meet.is_empty and not meet.meets_real()
    rep = verify_cartan(CartanCovering((c_shape, plug), (F(1, 64),) * 2), CoveringSpec((BIG,)), [0])
    assert not rep.checks["3_real"]


def test_unsubordinated_set_is_reported():
    a = Region.box(-1, -1, 1, 1)
    rep = verify_cartan(CartanCovering((a,), (F(1, 64),)), CoveringSpec((Region.box(-1, -1, 0, 1),)), [0])
    assert not rep.checks["subordination"]


def test_point_of_z_in_a_pairwise_intersection_is_reported():
    a, b = Region.box(-2, -1, F(1, 2), 1), Region.box(F(-1, 2), -1, 2, 1)
    spec = CoveringSpec((BIG,), ((0, 0),))
    rep = verify_cartan(CartanCovering((a, b), (F(1, 64),) * 2), spec, [0])
    assert not rep.checks["z_avoidance"]


def test_lattice_change_between_samples_is_caught():
    a, b = Region.box(-2, -1, 0, 1), Region.box(F(1, 16), -1, 2, 1)
    c = CartanCovering((a, b), (F(1, 16), F(1, 16)))
    assert not verify_cartan(c, CoveringSpec((BIG,)), T_SAMPLES).checks["lattice_stable"]
    assert verify_cartan(c, CoveringSpec((BIG,)), [0, F(1, 4)]).checks["lattice_stable"]


def test_string_routes_agree():
    # dual route: the region-level recursion and the mask-level check inside the verifier
    crossing = (Region.box(-2, -1, 0, 1), Region.box(-1, -2, 1, 2))
    msg = cartan_string(crossing)
    assert msg is not None and "separated" in msg
    rep = verify_cartan(CartanCovering(crossing, (F(1, 64),) * 2), CoveringSpec((BIG,)), [0])
    assert not rep.checks["5_string"]


@pytest.mark.parametrize("kind", ["square", "annulus", "square_pair"])
def test_string_routes_agree_on_model_prefixes(models, kind):
    t, spec, c = models[kind]
    for m in range(1, len(c) + 1, 4):
        prefix = CartanCovering(c.closures[:m], c.eps[:m])
        assert verify_cartan(prefix, spec, [0]).checks["5_string"]
        assert cartan_string(prefix.closures) is None


def test_nerve_of_one_set_and_of_disjoint_sets():
    one = nerve([Region.box(-1, -1, 1, 1)])
    assert one.simplices == [(0,)]
    two = nerve([Region.box(-3, -1, -2, 1), Region.box(2, -1, 3, 1)])
    assert two.simplices == [(0,), (1,)]


def test_corner_contact_is_not_an_edge_of_the_nerve():
    nv = nerve([Region.box(-1, -1, 0, 1), Region.box(0, 1, 1, 2)])
    assert nv.of_dim(1) == []


@pytest.mark.parametrize("kind", ["square", "annulus", "square_pair"])
def test_model_nerves_are_planar_two_complexes(models, kind):
    t, spec, c = models[kind]
    nv = nerve(c)
    o = order_report(nv)
    assert nv.dim == 2
    assert o["order_ok"] and o["real_paths"] and o["planar_edge_bound"]
    # [DERIVED] upper halves of all intersections are discs, so the nerve has the
    # Euler characteristic of the upper half of the covered set
    k = geo.union(*c.closures)
    assert o["euler"] == geo.euler_characteristic(k.upper())


def test_nerve_records_mirror_components():
    pair = geo.symmetrize(Region.box(0, 1, 1, 2))
    nv = nerve([pair, Region.box(-2, -2, 2, 2)])
    assert len(nv.parts[(0, 1)]) == 2
    assert nv.mirror[(0, 1)] == (1, 0)
    assert nv.real[(0, 1)] == (False, False)
    assert not nv.meets_real((0, 1)) and nv.meets_real((1,))
