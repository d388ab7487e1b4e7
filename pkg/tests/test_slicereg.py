import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cartan_tiler.geometry import Region
from cartan_tiler.slicereg import (AxSymCompact, DomainError, NumericDegradation, PowerSeries, QPolynomial,
                                   Quaternion, _component_route, _conv_route, eval_formula_a, evaluate,
                                   exp_log_bound, exp_series, exp_star, imaginary_unit, log_star_one_minus,
                                   poly_from_json, poly_to_json, qmul, runge_truncate, sphere_max, star_product,
                                   sup_norm)

fractions = st.builds(F, st.integers(-9, 9), st.integers(1, 8))
quats = st.tuples(fractions, fractions, fractions, fractions)


def polys(max_degree):
    return st.lists(quats, max_size=max_degree + 1).map(QPolynomial)


def q(*parts, exact=True):
    return Quaternion(*parts, exact=exact)


def naive_eval(f, x):
    """Σ x^n a_n with the powers built by repeated multiplication."""
    acc = (0,) * 4
    power = (1, 0, 0, 0)
    for c in f.coeffs:
        acc = tuple(a + b for a, b in zip(acc, qmul(power, c)))
        power = qmul(power, x)
    return acc


def test_quaternion_units():
    i, j, k = q(0, 1), q(0, 0, 1), q(0, 0, 0, 1)
    assert i * j == k and j * k == i and k * i == j
    assert j * i == -k
    assert i * i == q(-1)


def test_one_is_the_identity():
    g = QPolynomial([(1, 2, 3, 4), (F(1, 2), 0, -1, 0)])
    assert star_product(QPolynomial.constant((1, 0, 0, 0)), g) == g


def test_i_times_j_is_k():
    i, j = QPolynomial.constant((0, 1, 0, 0)), QPolynomial.constant((0, 0, 1, 0))
    assert star_product(i, j) == QPolynomial.constant((0, 0, 0, 1))


def test_qi_times_qj_is_q_squared_k():
    # [DERIVED] both routes, computed independently
    f = QPolynomial([(0, 0, 0, 0), (0, 1, 0, 0)])
    g = QPolynomial([(0, 0, 0, 0), (0, 0, 1, 0)])
    want = QPolynomial([(0, 0, 0, 0), (0, 0, 0, 0), (0, 0, 0, 1)])
    assert _conv_route(f, g) == want
    assert _component_route(f, g) == want


@given(polys(12), polys(12))
def test_routes_agree_exactly(f, g):
    assert _conv_route(f, g) == _component_route(f, g)


@given(polys(4), polys(4), polys(4))
def test_associative(f, g, h):
    assert star_product(star_product(f, g), h) == star_product(f, star_product(g, h))


@given(polys(6), st.lists(fractions, max_size=5))
def test_real_coefficients_commute(f, reals):
    g = QPolynomial([(r, 0, 0, 0) for r in reals])
    assert star_product(f, g) == star_product(g, f)


@given(polys(6), quats)
def test_horner_matches_naive_powers(f, x):
    assert evaluate(f, q(*x)).parts == naive_eval(f, x)


@given(st.lists(fractions, min_size=1, max_size=1), polys(5), quats)
def test_slice_preserving_factor(p, g, x):
    # [PAPER] f(q) = q − p with p real: the product is pointwise
    f = QPolynomial([(-p[0], 0, 0, 0), (1, 0, 0, 0)])
    x = q(*x)
    assert evaluate(star_product(f, g), x) == evaluate(f, x) * evaluate(g, x)
    assert star_product(f, g) == star_product(g, f)


def test_product_vanishes_where_the_left_factor_does():
    # [PAPER] q^2 + 1 vanishes on the unit sphere of imaginary quaternions
    f = QPolynomial([(1, 0, 0, 0), (0, 0, 0, 0), (1, 0, 0, 0)])
    g = QPolynomial([(2, 1, 0, 3), (0, 5, -1, 0)])
    x = q(0, F(3, 5), F(4, 5), 0)
    assert evaluate(f, x).is_zero()
    assert evaluate(star_product(f, g), x).is_zero()
    assert eval_formula_a(f, g, x).is_zero()


@given(polys(8), polys(8), quats)
def test_formula_a_exact(f, g, x):
    x = q(*x)
    assert eval_formula_a(f, g, x) == evaluate(star_product(f, g), x)


def test_formula_a_double_on_500_seeded_cases():
    # [DERIVED] dual path in floating point
    rng = np.random.default_rng(2)
    for _ in range(500):
        f = QPolynomial(rng.normal(size=(int(rng.integers(1, 10)), 4)), exact=False)
        g = QPolynomial(rng.normal(size=(int(rng.integers(1, 10)), 4)), exact=False)
        x = q(*rng.uniform(-1, 1, size=4), exact=False)
        a, b = eval_formula_a(f, g, x), evaluate(star_product(f, g), x)
        assert abs(a - b) <= 1e-10 * max(1.0, abs(b))


def test_modes_do_not_mix():
    with pytest.raises(TypeError):
        star_product(QPolynomial([(1, 0, 0, 0)]), QPolynomial([(1.0, 0, 0, 0)], exact=False))
    with pytest.raises(TypeError):
        q(1) * q(1, exact=False)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_overflow_is_signalled():
    f = QPolynomial([(1e200, 1e200, 0, 0)], exact=False)
    with pytest.raises(NumericDegradation):
        star_product(f, f)


# imaginary unit ------------------------------------------------------------------------
def test_imaginary_unit_examples():
    assert imaginary_unit(q(3, 4)) == q(0, 1)
    with pytest.raises(DomainError):
        imaginary_unit(q(5))


@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6), fractions)
def test_imaginary_unit_properties_exact(m, n, p, r, re):
    # Pythagorean quadruples give rational |Im q|
    v = (m * m + n * n - p * p - r * r, 2 * (m * r + n * p), 2 * (n * r - m * p))
    if v == (0, 0, 0):
        return
    x = q(re, *v)
    u = imaginary_unit(x)
    assert u.norm2() == 1
    assert u * u == q(-1)
    assert imaginary_unit(x.conj()) == -u


def test_imaginary_unit_double_mode():
    u = imaginary_unit(q(0.5, 1.0, 1.0, 1.0, exact=False))
    assert abs(abs(u) - 1) < 1e-15


# norms ---------------------------------------------------------------------------------
BALL = AxSymCompact.ball(0, 1)


def test_sup_norm_of_a_constant():
    assert sup_norm(QPolynomial.constant((3, 4, 0, 0), exact=False), BALL, 3) == 5.0


def test_sup_norm_of_q_on_the_unit_ball():
    f = QPolynomial([(0, 0, 0, 0), (1, 0, 0, 0)], exact=False)
    vals = [sup_norm(f, BALL, d) for d in range(1, 6)]
    assert all(abs(v - 1) < 1e-12 for v in vals)


@given(st.integers(0, 2**32 - 1))
def test_sup_norm_grows_with_density(seed):
    rng = np.random.default_rng(seed)
    f = QPolynomial(rng.normal(size=(4, 4)), exact=False)
    for k in (BALL, AxSymCompact(Region.box(-1, -1, 1, 1))):
        vals = [sup_norm(f, k, d) for d in range(1, 5)]
        assert vals == sorted(vals)


def test_sphere_maximum_against_random_units():
    # [DERIVED] |f(x + Iy)| over many random I never exceeds the closed form
    # and gets close to it
    rng = np.random.default_rng(4)
    f = QPolynomial(rng.normal(size=(5, 4)), exact=False)
    x, y = 0.3, 0.7
    best = 0.0
    for _ in range(4000):
        u = rng.normal(size=3)
        u /= np.linalg.norm(u)
        best = max(best, abs(evaluate(f, q(x, *(y * u), exact=False))))
    m = float(sphere_max(f, np.array([x]), np.array([y]))[0])
    assert best <= m * (1 + 1e-12)
    assert best >= m * 0.99


@given(st.integers(0, 2**32 - 1))
def test_submultiplicative(seed):
    rng = np.random.default_rng(seed)
    f = QPolynomial(rng.normal(size=(int(rng.integers(1, 6)), 4)), exact=False)
    g = QPolynomial(rng.normal(size=(int(rng.integers(1, 6)), 4)), exact=False)
    for k in (BALL, AxSymCompact.ball(0.5, 0.75), AxSymCompact(Region.box(-1, -1, 1, 1))):
        assert sup_norm(star_product(f, g), k, 4) <= sup_norm(f, k, 4) * sup_norm(g, k, 4) * (1 + 1e-12)


def test_compact_validation():
    with pytest.raises(ValueError):
        AxSymCompact(Region.box(0, 0, 1, 1))
    with pytest.raises(ValueError):
        AxSymCompact.ball(0, 0)


# series --------------------------------------------------------------------------------
def test_exp_of_zero_is_one():
    assert exp_star(QPolynomial(()), 10) == QPolynomial.constant((1, 0, 0, 0))


@pytest.mark.parametrize("c", [-1.5, 0.25, 2.0])
def test_exp_of_a_real_constant(c):
    n = 20
    got = exp_star(QPolynomial.constant((c, 0, 0, 0), exact=False), n).coeffs[0][0]
    tail = abs(c) ** (n + 1) / math.factorial(n + 1) * math.exp(abs(c))
    assert abs(got - math.exp(c)) <= tail + 1e-15 * math.exp(c)


def test_exp_of_an_imaginary_constant_is_on_the_unit_sphere():
    got = exp_star(QPolynomial.constant((0, 0, F(1, 2), 0)), 30).coeffs[0]
    assert abs(float(got[0]) - math.cos(0.5)) < 1e-15 and abs(float(got[2]) - math.sin(0.5)) < 1e-15


def test_exp_log_round_trip():
    rng = np.random.default_rng(8)
    x, y = BALL.samples(5)
    one = QPolynomial.constant((1, 0, 0, 0), exact=False)
    bound = exp_log_bound(0.5, 40)
    for _ in range(5):
        f = QPolynomial(rng.normal(size=(3, 4)), exact=False)
        f = f.scale(0.5 / sup_norm(f, BALL, 5))
        g = exp_star(log_star_one_minus(f, 40, BALL, r=0.5, sampling=5), 40)
        assert float(sphere_max(g - (one - f), x, y).max()) <= bound


def test_exp_log_bound_value():
    # log tail plus exp tail, both scaled by 1/(1 − r)
    m = math.log(2)
    want = (0.5 ** 41 / (41 * 0.5) + m ** 41 / math.factorial(41)) / 0.5
    assert exp_log_bound(0.5, 40) == pytest.approx(want, rel=1e-12)


def test_log_precondition_is_checked():
    f = QPolynomial([(0, 0, 0, 0), (0.9, 0, 0, 0)], exact=False)
    with pytest.raises(DomainError, match="measured"):
        log_star_one_minus(f, 10, BALL, r=0.5)
    with pytest.raises(DomainError):
        log_star_one_minus(f.scale(1 / 0.9), 10, BALL)


def test_runge_truncation_of_exp():
    # [DERIVED] the true tail e − Σ_{m≤N} 1/m! crosses 1e-6 between N = 8 and 9
    p = runge_truncate(exp_series(), [BALL], 1e-6)
    assert p.degree == 9
    tail = lambda n: math.e - sum(1 / math.factorial(m) for m in range(n + 1))  # noqa: E731
    assert tail(8) > 1e-6 > tail(9)


def test_runge_truncation_edge_cases():
    poly = QPolynomial([(1, 2, 0, 0), (0, 0, 3, 0)])
    assert runge_truncate(poly, [BALL], 1e-9) is poly
    assert runge_truncate(exp_series(), [BALL], 10.0).degree == 0
    never = PowerSeries(lambda n: (1.0, 0, 0, 0), lambda n: 1.0)
    with pytest.raises(DomainError):
        runge_truncate(never, [AxSymCompact.ball(0, 2)], 1e-3, cap=50)


@given(polys(5))
def test_json_round_trip(f):
    assert poly_from_json(poly_to_json(f)) == f
    d = f.to_double()
    assert poly_from_json(poly_to_json(d)) == d
