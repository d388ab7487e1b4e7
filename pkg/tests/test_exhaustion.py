from fractions import Fraction as F

import pytest

from cartan_tiler import geometry as geo
from cartan_tiler.exhaustion import ExhaustionError, build_exhaustion, is_runge_in
from cartan_tiler.geometry import Region
from cartan_tiler.suites import canonical_domains

from helpers import relatively_compact_gaps

FRAME = geo.difference(Region.box(-3, -3, 3, 3), Region.box(-1, -1, 1, 1))


def _check_stages(ex, domain):
    for n, k in enumerate(ex.stages):
        assert k.is_symmetric()
        assert domain.contains_in_interior(k)
        assert is_runge_in(k, domain)
        # [DERIVED] flood fill of the complement on the cell grid
        assert relatively_compact_gaps(k, domain, max(k.level, domain.level, 2)) == []
        if n:
            assert k.contains_in_interior(ex[n - 1])
        for c in geo.components(k):
            assert c.meets_real() or geo.reflect(c) in geo.components(k)


def test_unit_square_gives_nested_simply_connected_squares():
    d = Region.box(-1, -1, 1, 1)
    ex = build_exhaustion(d, stages=3)
    _check_stages(ex, d)
    for k in ex.stages[1:]:
        assert len(geo.components(k)) == 1 and geo.holes(k) == []
    assert [k.bounds[2] for k in ex.stages[1:]] == [F(1, 2), F(3, 4), F(7, 8)]


def test_annulus_stages_are_frames_around_the_hole():
    d = FRAME
    ex = build_exhaustion(d, stages=3)
    _check_stages(ex, d)
    for k in ex.stages[1:]:
        (h,) = geo.holes(k)
        assert h.contains(Region.box(-1, -1, 1, 1))


def test_mirror_pair_domain_starts_with_mirror_squares():
    # [PAPER] the product case starts from a disc and its mirror image
    d = geo.symmetrize(Region.box(-1, 1, 1, 3))
    ex = build_exhaustion(d, stages=2)
    k0 = ex[0]
    comps = geo.components(k0)
    assert len(comps) == 2 and not k0.meets_real()
    assert geo.reflect(comps[0]) == comps[1]
    assert all(len(c.fraction_rects()) == 1 for c in comps)
    _check_stages(ex, d)


@pytest.mark.parametrize("name", sorted(canonical_domains()))
def test_canonical_domains(name):
    d = canonical_domains()[name]
    _check_stages(build_exhaustion(d, stages=2), d)


def test_given_seed_is_kept():
    d = Region.box(-1, -1, 1, 1)
    k0 = Region.box(F(-1, 4), F(-1, 4), F(1, 4), F(1, 4))
    assert build_exhaustion(d, k0=k0, stages=2)[0] == k0


def _straddles(k, z):
    # [DERIVED] the four small cells at z are neither all inside nor all outside
    h = F(1, 256)
    return len({k.contains_point(z[0] + a, z[1] + b) for a in (-h, h) for b in (-h, h)}) == 2


@pytest.mark.parametrize("z", [(F(1, 4), F(1, 2)), (F(1, 2), 0), (F(3, 4), F(3, 4))])
def test_stage_boundaries_miss_forbidden_points(z):
    d = Region.box(-1, -1, 1, 1)
    assert any(_straddles(k, z) for k in build_exhaustion(d, stages=2).stages)
    ex = build_exhaustion(d, stages=2, avoid=[z, (z[0], -z[1])])
    _check_stages(ex, d)
    assert not any(_straddles(k, z) for k in ex.stages)


def test_coverage_of_a_compact_subset():
    d = Region.box(-1, -1, 1, 1)
    c = Region.box(F(-15, 16), F(-15, 16), F(15, 16), F(15, 16))
    ex = build_exhaustion(d, stages=5)
    assert any(k.contains(c) for k in ex.stages)


def test_is_runge_in_examples():
    big = Region.box(-4, -4, 4, 4)
    assert is_runge_in(Region.box(-1, -1, 1, 1), big)
    assert not is_runge_in(FRAME, big)
    assert len(relatively_compact_gaps(FRAME, big, 2)) == 1
    annulus = geo.difference(Region.box(-4, -4, 4, 4), Region.box(-2, -2, 2, 2))
    frame = geo.difference(Region.box(-3, -3, 3, 3), Region.box(F(-5, 2), F(-5, 2), F(5, 2), F(5, 2)))
    assert is_runge_in(frame, annulus)


def test_errors():
    with pytest.raises(ExhaustionError):
        build_exhaustion(Region.empty())
    with pytest.raises(ExhaustionError):
        build_exhaustion(Region.box(0, 1, 1, 2))
    with pytest.raises(ExhaustionError):
        is_runge_in(Region.box(0, 0, 2, 2), Region.box(-1, -1, 1, 1))
    with pytest.raises(ExhaustionError):
        build_exhaustion(Region.box(-4, -4, 4, 4), k0=FRAME)
