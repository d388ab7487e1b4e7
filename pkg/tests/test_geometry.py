from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cartan_tiler import geometry as geo
from cartan_tiler.geometry import Region

from helpers import cells_of_rects, cells_of_region, dilate, rect_lists, reflect_cells


def test_reflect_unit_square():
    # [TRIVIAL]
    assert geo.reflect(Region.box(0, 0, 1, 1)) == Region.box(0, -1, 1, 0)


def test_symmetrize_adds_mirror_image():
    r = Region.box(0, 1, 1, 2)
    s = geo.symmetrize(r)
    assert s == Region.from_rects([(0, 1, 1, 2), (0, -2, 1, -1)])
    assert s.is_symmetric() and not s.meets_real()


@given(rect_lists)
def test_reflect_is_an_involution(rects):
    r = Region.from_rects(rects)
    assert geo.reflect(geo.reflect(r)) == r
    assert geo.reflect(r).area == r.area


@given(rect_lists)
def test_symmetrize_is_idempotent_and_symmetric(rects):
    s = geo.symmetrize(Region.from_rects(rects))
    assert s.is_symmetric()
    assert geo.symmetrize(s) == s


@given(rect_lists)
def test_reflection_matches_cell_oracle(rects):
    # [DERIVED] mirror of the cell set
    r = geo.reflect(Region.from_rects(rects))
    assert cells_of_region(r, 3) == reflect_cells(cells_of_rects(rects, 3))


@given(rect_lists, rect_lists)
def test_booleans_match_cell_oracle(ra, rb):
    # [DERIVED] regularized booleans agree with set operations on grid cells
    a, b = Region.from_rects(ra), Region.from_rects(rb)
    ca, cb = cells_of_rects(ra, 3), cells_of_rects(rb, 3)
    assert cells_of_region(geo.union(a, b), 3) == ca | cb
    assert cells_of_region(geo.intersect(a, b), 3) == ca & cb
    assert cells_of_region(geo.difference(a, b), 3) == ca - cb


@given(rect_lists, rect_lists)
def test_area_is_additive(ra, rb):
    a, b = Region.from_rects(ra), Region.from_rects(rb)
    assert geo.union(a, b).area + geo.intersect(a, b).area == a.area + b.area
    assert geo.difference(a, b).area == a.area - geo.intersect(a, b).area


def test_area_identity_on_1000_seeded_pairs():
    rng = np.random.default_rng(11)

    def rand():
        out = []
        for _ in range(int(rng.integers(1, 4))):
            x0, y0 = (F(int(v), 8) for v in rng.integers(-16, 16, size=2))
            w, h = (F(int(v), 8) for v in rng.integers(1, 12, size=2))
            out.append((x0, y0, x0 + w, y0 + h))
        return Region.from_rects(out)

    for _ in range(1000):
        a, b = rand(), rand()
        assert geo.union(a, b).area + geo.intersect(a, b).area == a.area + b.area


def test_intersection_overlapping_squares():
    assert geo.intersect(Region.box(0, 0, 2, 2), Region.box(1, 1, 3, 3)) == Region.box(1, 1, 2, 2)


def test_intersection_along_an_edge_is_degenerate():
    area, ps = geo.intersection_parts(Region.box(0, 0, 1, 1), Region.box(1, 0, 2, 1))
    assert area.is_empty
    assert not ps.has_area()
    assert ps.vedges.any() and not ps.hedges.any()
    assert ps.points() == [(1, 0), (1, 1)]


def test_intersection_at_a_corner_is_one_point():
    area, ps = geo.intersection_parts(Region.box(0, 0, 1, 1), Region.box(1, 1, 2, 2))
    assert area.is_empty and ps.points() == [(1, 1)]


def test_disjoint_intersection_is_empty():
    area, ps = geo.intersection_parts(Region.box(0, 0, 1, 1), Region.box(3, 0, 4, 1))
    assert area.is_empty and ps.is_empty()
    assert geo.distance(Region.box(0, 0, 1, 1), Region.box(3, 0, 4, 1)) == 2


def test_components_are_ordered_and_counted():
    r = Region.from_rects([(2, 0, 3, 1), (0, 0, 1, 1)])
    comps = geo.components(r)
    assert comps == [Region.box(0, 0, 1, 1), Region.box(2, 0, 3, 1)]
    assert geo.components(Region.empty()) == []


def test_corner_touching_squares_form_one_closed_component():
    r = Region.from_rects([(0, 0, 1, 1), (1, 1, 2, 2)])
    assert len(geo.components(r)) == 1


def test_fill_of_frame_is_the_solid_square():
    frame = geo.difference(Region.box(-2, -2, 2, 2), Region.box(-1, -1, 1, 1))
    assert len(geo.holes(frame)) == 1
    assert geo.euler_characteristic(frame) == 0
    assert geo.fill(frame) == Region.box(-2, -2, 2, 2)


@given(rect_lists)
def test_fill_is_idempotent_and_extensive(rects):
    r = Region.from_rects(rects)
    f = geo.fill(r)
    assert f.contains(r)
    assert geo.fill(f) == f
    assert geo.holes(f) == []
    assert all(geo.euler_characteristic(c) == 1 for c in geo.components(f))


def test_classify_examples():
    sq = geo.classify(Region.box(-1, -1, 1, 1))
    assert (sq.meets_real, sq.kind, sq.closed_basic, sq.open_basic) == (True, "slice", True, True)
    pair = geo.classify(geo.symmetrize(Region.box(0, 1, 1, 2)))
    assert (pair.meets_real, pair.kind, pair.closed_basic) == (False, "product", True)
    frame = geo.classify(geo.difference(Region.box(-2, -2, 2, 2), Region.box(-1, -1, 1, 1)))
    assert not frame.closed_basic and not frame.open_basic
    lop = geo.classify(Region.box(0, 0, 1, 1))
    assert not lop.symmetric and not lop.closed_basic


def test_closed_basic_rejects_pinched_mirror_discs():
    # two squares touching at a corner: connected, but the interior is not
    pinched = geo.symmetrize(Region.from_rects([(0, 1, 1, 2), (1, 2, 2, 3)]))
    assert not geo.is_closed_basic(pinched)


def test_offset_of_square():
    # [TRIVIAL]
    assert geo.offset(Region.box(0, 0, 1, 1), F(1, 4)) == Region.box(F(-1, 4), F(-1, 4), F(5, 4), F(5, 4))


def test_offset_of_symmetric_l_pair():
    # [DERIVED] brute-force cell dilation at scale 1/8
    rects = [(0, 1, 2, F(3, 2)), (0, 1, F(1, 2), 3)]
    mirror = [(a, -d, c, -b) for a, b, c, d in rects]
    shape = Region.from_rects(rects + mirror)
    thick = geo.offset(shape, F(1, 8))
    assert cells_of_region(thick, 3) == dilate(cells_of_rects(rects + mirror, 3), 1)
    assert sum(len(ring) for ring in geo.to_rings(thick)) == 12
    assert thick.is_symmetric()
    assert thick.contains_in_interior(shape)


@given(rect_lists, st.integers(1, 4))
def test_offset_matches_dilation(rects, k):
    # [DERIVED]
    r = Region.from_rects(rects)
    assert cells_of_region(geo.offset(r, F(k, 8)), 3) == dilate(cells_of_rects(rects, 3), k)


@given(rect_lists, st.integers(1, 4), st.integers(1, 4))
def test_offset_is_monotone(rects, a, b):
    r = Region.from_rects(rects)
    e1, e2 = sorted((F(a, 16), F(b, 16)))
    assert geo.offset(r, e2).contains(geo.offset(r, e1))


def test_offset_needs_positive_radius():
    with pytest.raises(ValueError):
        geo.offset(Region.box(0, 0, 1, 1), 0)


def test_erode_square():
    assert geo.erode(Region.box(-1, -1, 1, 1), F(1, 4)) == Region.box(F(-3, 4), F(-3, 4), F(3, 4), F(3, 4))


@given(rect_lists)
def test_json_round_trip(rects):
    r = Region.from_rects(rects)
    assert geo.region_from_json(geo.region_to_json(r)) == r
    assert geo.from_rings(geo.to_rings(r)) == r


def test_non_dyadic_coordinates_are_rejected():
    with pytest.raises(ValueError):
        Region.box(0, 0, F(1, 3), 1)
