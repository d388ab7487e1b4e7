"""Slice-regular polynomials with quaternionic right coefficients.

``f(q) = Σ q^n a_n``.  Exact mode keeps every number a Fraction; double mode
uses floats.  The two never mix: combining polynomials of different modes
raises TypeError.

On a sphere ``x + 𝕊y`` such a polynomial is ``f(x + Iy) = α + Iβ`` with
quaternions α, β that do not depend on I (α = Σ Re(z^n) a_n and
β = Σ Im(z^n) a_n for z = x + iy).  Norms use this to take the exact
maximum of |f| over each sampled sphere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .geometry import Region


class DomainError(ValueError):
    """Argument outside the domain of the operation."""


class NumericDegradation(ArithmeticError):
    """The two product routes disagree beyond rounding in double mode."""


# quaternions ---------------------------------------------------------------------------
def qmul(a, b):
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return (a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0)


def qadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def qsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def qscale(a, s):
    return tuple(x * s for x in a)


def qconj(a):
    return (a[0], -a[1], -a[2], -a[3])


def qnorm2(a):
    return sum(x * x for x in a)


def qabs(a) -> float:
    return math.sqrt(float(qnorm2(a)))


def qinv(a):
    n = qnorm2(a)
    if n == 0:
        raise ZeroDivisionError("quaternion 0 has no inverse")
    return tuple(x / n for x in qconj(a))


def _coerce(q, exact: bool):
    if len(q) != 4:
        raise ValueError("a quaternion has four components")
    return tuple(Fraction(x) for x in q) if exact else tuple(float(x) for x in q)


@dataclass(frozen=True)
class Quaternion:
    parts: tuple

    def __init__(self, a0=0, a1=0, a2=0, a3=0, exact: bool = True):
        object.__setattr__(self, "parts", _coerce((a0, a1, a2, a3), exact))

    @property
    def exact(self) -> bool:
        return isinstance(self.parts[0], Fraction)

    def __iter__(self):
        return iter(self.parts)

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        _same(self.exact, other.exact)
        return Quaternion(*qmul(self.parts, other.parts), exact=self.exact)

    def __add__(self, other: "Quaternion") -> "Quaternion":
        _same(self.exact, other.exact)
        return Quaternion(*qadd(self.parts, other.parts), exact=self.exact)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        _same(self.exact, other.exact)
        return Quaternion(*qsub(self.parts, other.parts), exact=self.exact)

    def __neg__(self) -> "Quaternion":
        return Quaternion(*(-x for x in self.parts), exact=self.exact)

    def conj(self) -> "Quaternion":
        return Quaternion(*qconj(self.parts), exact=self.exact)

    def inverse(self) -> "Quaternion":
        return Quaternion(*qinv(self.parts), exact=self.exact)

    def norm2(self):
        return qnorm2(self.parts)

    def __abs__(self) -> float:
        return qabs(self.parts)

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.parts)


def _same(a: bool, b: bool) -> None:
    if a != b:
        raise TypeError("exact and double values cannot be mixed")


# polynomials ---------------------------------------------------------------------------
@dataclass(frozen=True)
class QPolynomial:
    """Right coefficients ``coeffs[n]`` of q^n, trailing zeros stripped."""

    coeffs: tuple
    exact: bool = True

    def __init__(self, coeffs: Iterable = (), exact: bool = True):
        cs = [_coerce(tuple(c), exact) for c in coeffs]
        while cs and all(x == 0 for x in cs[-1]):
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "exact", exact)

    @classmethod
    def constant(cls, q, exact: bool = True) -> "QPolynomial":
        return cls([q], exact)

    @classmethod
    def from_components(cls, comps: Sequence[Sequence], exact: bool = True) -> "QPolynomial":
        """From four real polynomials (f0, f1, f2, f3): f = f0 + f1 i + f2 j + f3 k."""
        n = max((len(c) for c in comps), default=0)
        pad = [list(c) + [0] * (n - len(c)) for c in comps]
        return cls([tuple(pad[a][m] for a in range(4)) for m in range(n)], exact)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "QPolynomial":
        return cls([tuple(r) for r in np.asarray(arr, dtype=float)], exact=False)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def components(self) -> list[list]:
        """The four slice-preserving components as real coefficient lists."""
        return [[c[a] for c in self.coeffs] for a in range(4)]

    def array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=float).reshape(-1, 4)

    def to_double(self) -> "QPolynomial":
        return QPolynomial(self.coeffs, exact=False)

    def __add__(self, other: "QPolynomial") -> "QPolynomial":
        _same(self.exact, other.exact)
        z = (0, 0, 0, 0)
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [z] * (n - len(self.coeffs))
        b = list(other.coeffs) + [z] * (n - len(other.coeffs))
        return QPolynomial([qadd(x, y) for x, y in zip(a, b)], self.exact)

    def __sub__(self, other: "QPolynomial") -> "QPolynomial":
        return self + other.scale(-1)

    def scale(self, s) -> "QPolynomial":
        s = Fraction(s) if self.exact else float(s)
        return QPolynomial([qscale(c, s) for c in self.coeffs], self.exact)

    def is_real(self) -> bool:
        """Slice-preserving: all coefficients real."""
        return all(c[1] == c[2] == c[3] == 0 for c in self.coeffs)

    def __mul__(self, other: "QPolynomial") -> "QPolynomial":
        return star_product(self, other)


def _conv_route(f: QPolynomial, g: QPolynomial) -> QPolynomial:
    """Coefficient convolution Σ_{m+n=p} a_m b_n with quaternion products."""
    if not f.coeffs or not g.coeffs:
        return QPolynomial((), f.exact)
    if f.exact:
        out = [(0, 0, 0, 0)] * (len(f.coeffs) + len(g.coeffs) - 1)
        for m, a in enumerate(f.coeffs):
            for n, b in enumerate(g.coeffs):
                out[m + n] = qadd(out[m + n], qmul(a, b))
        return QPolynomial(out, True)
    A, B = f.array(), g.array()
    out = np.zeros((len(A) + len(B) - 1, 4))
    for m in range(len(A)):
        a0, a1, a2, a3 = A[m]
        b0, b1, b2, b3 = B.T
        out[m:m + len(B)] += np.stack([a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
                                       a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
                                       a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
                                       a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0], axis=1)
    return QPolynomial.from_array(out)


def _rmul(p: Sequence, q: Sequence) -> list:
    """Product of real coefficient lists."""
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _radd(*ps: tuple[int, Sequence]) -> list:
    n = max((len(p) for _, p in ps), default=0)
    out = [0] * n
    for s, p in ps:
        for i, a in enumerate(p):
            out[i] += s * a
    return out


def _component_route(f: QPolynomial, g: QPolynomial) -> QPolynomial:
    """The four component formulas on slice-preserving parts."""
    if not f.coeffs or not g.coeffs:
        return QPolynomial((), f.exact)
    if f.exact:
        F, G = f.components(), g.components()
        m = _rmul
    else:
        F, G = f.array().T, g.array().T
        m = np.convolve
    f0, f1, f2, f3 = F
    g0, g1, g2, g3 = G
    if f.exact:
        c0 = _radd((1, m(f0, g0)), (-1, m(f1, g1)), (-1, m(f2, g2)), (-1, m(f3, g3)))
        c1 = _radd((1, m(f0, g1)), (1, m(f1, g0)), (1, m(f2, g3)), (-1, m(f3, g2)))
        c2 = _radd((1, m(f0, g2)), (-1, m(f1, g3)), (1, m(f2, g0)), (1, m(f3, g1)))
        c3 = _radd((1, m(f0, g3)), (1, m(f1, g2)), (-1, m(f2, g1)), (1, m(f3, g0)))
        return QPolynomial.from_components([c0, c1, c2, c3], True)
    c0 = m(f0, g0) - m(f1, g1) - m(f2, g2) - m(f3, g3)
    c1 = m(f0, g1) + m(f1, g0) + m(f2, g3) - m(f3, g2)
    c2 = m(f0, g2) - m(f1, g3) + m(f2, g0) + m(f3, g1)
    c3 = m(f0, g3) + m(f1, g2) - m(f2, g1) + m(f3, g0)
    return QPolynomial.from_array(np.stack([c0, c1, c2, c3], axis=1))


def star_product(f: QPolynomial, g: QPolynomial, check: bool = True, rtol: float = 1e-9) -> QPolynomial:
    """f*g by coefficient convolution, cross-checked against the component
    formulas (exactly in exact mode, to ``rtol`` of the coefficient scale in
    double mode)."""
    _same(f.exact, g.exact)
    fast = _component_route(f, g)
    if not check:
        return fast
    conv = _conv_route(f, g)
    if f.exact:
        if conv != fast:
            raise AssertionError("component and convolution products differ in exact mode")
        return conv
    a, b = conv.array(), fast.array()
    if a.shape != b.shape:
        n = max(len(a), len(b))
        a = np.vstack([a, np.zeros((n - len(a), 4))])
        b = np.vstack([b, np.zeros((n - len(b), 4))])
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise NumericDegradation("product overflowed")
    with np.errstate(over="ignore"):
        scale = (np.abs(f.array()).sum() * np.abs(g.array()).sum()) if f.coeffs and g.coeffs else 0.0
    if a.size and np.abs(a - b).max() > rtol * max(scale, 1e-300):
        raise NumericDegradation("component and convolution products disagree")
    return conv


def star_power(f: QPolynomial, n: int, check: bool = False) -> QPolynomial:
    out = QPolynomial.constant((1, 0, 0, 0), f.exact)
    for _ in range(n):
        out = star_product(out, f, check=check)
    return out


# evaluation ----------------------------------------------------------------------------
def evaluate(f: QPolynomial, q) -> Quaternion:
    """Σ q^n a_n by Horner's rule: a_0 + q(a_1 + q(a_2 + …))."""
    qq = q.parts if isinstance(q, Quaternion) else _coerce(tuple(q), f.exact)
    _same(f.exact, isinstance(qq[0], Fraction))
    zero = _coerce((0, 0, 0, 0), f.exact)
    acc = zero
    for c in reversed(f.coeffs):
        acc = qadd(qmul(qq, acc), c)
    return Quaternion(*acc, exact=f.exact)


def eval_formula_a(f: QPolynomial, g: QPolynomial, q) -> Quaternion:
    """(f*g)(q) as 0 when f(q) = 0 and otherwise f(q)·g(f(q)^{-1} q f(q))."""
    fq = evaluate(f, q)
    if fq.is_zero():
        return Quaternion(exact=f.exact)
    qq = q if isinstance(q, Quaternion) else Quaternion(*q, exact=f.exact)
    moved = fq.inverse() * qq * fq
    return fq * evaluate(g, moved)


def imaginary_unit(q) -> Quaternion:
    """Im(q)/|Im(q)|.  In exact mode |Im(q)| must be rational."""
    qq = q if isinstance(q, Quaternion) else Quaternion(*q, exact=isinstance(q[0], (int, Fraction)))
    v = qq.parts[1:]
    n2 = sum(x * x for x in v)
    if n2 == 0:
        raise DomainError("𝓘 is undefined on real quaternions")
    if qq.exact:
        num, den = Fraction(n2).numerator, Fraction(n2).denominator
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn != num or rd * rd != den:
            raise DomainError("|Im q| is irrational; use double mode")
        s = Fraction(rn, rd)
    else:
        s = math.sqrt(n2)
    return Quaternion(0, *(x / s for x in v), exact=qq.exact)


def sphere_parts(f: QPolynomial, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """α and β with f(x + Iy) = α + Iβ, as (npts, 4) float arrays."""
    z = np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float)
    A = f.array()
    if not len(A):
        return np.zeros((len(z), 4)), np.zeros((len(z), 4))
    vals = np.stack([np.polyval(A[::-1, a], z) for a in range(4)], axis=1)
    return vals.real, vals.imag


def sphere_max(f: QPolynomial, x, y) -> np.ndarray:
    """max over unit I of |f(x + Iy)|, pointwise.

    |α + Iβ|² = |α|² + |β|² − 2 I·Im(βᾱ), so the maximum adds 2|Im(βᾱ)|.
    """
    al, be = sphere_parts(f, x, y)
    w = np.stack([
        be[:, 1] * al[:, 0] - be[:, 0] * al[:, 1] - be[:, 2] * al[:, 3] + be[:, 3] * al[:, 2],
        be[:, 2] * al[:, 0] - be[:, 0] * al[:, 2] - be[:, 3] * al[:, 1] + be[:, 1] * al[:, 3],
        be[:, 3] * al[:, 0] - be[:, 0] * al[:, 3] - be[:, 1] * al[:, 2] + be[:, 2] * al[:, 1]], axis=1)
    s = (al ** 2).sum(1) + (be ** 2).sum(1) + 2 * np.sqrt((w ** 2).sum(1))
    return np.sqrt(np.maximum(s, 0))


_S3 = 1 / math.sqrt(3)
SAMPLE_UNITS = tuple(tuple(s * c for c in u) for u in ((0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (0, _S3, _S3, _S3))
                     for s in (1, -1))


def unit_values(f: QPolynomial, x, y, unit) -> np.ndarray:
    """|f(x + Iy)| for one fixed imaginary unit I."""
    al, be = sphere_parts(f, x, y)
    prod = np.stack(qmul(tuple(float(u) for u in unit), tuple(be.T)), axis=1)
    return np.sqrt(((al + prod) ** 2).sum(1))


# compacts and norms --------------------------------------------------------------------
@dataclass(frozen=True)
class AxSymCompact:
    """An axially symmetric compact set given by its slice trace: either a
    symmetric region or the closed ball of radius ``radius`` about a real centre."""

    trace: Region | None = None
    center: float = 0.0
    radius: float | None = None

    @classmethod
    def ball(cls, center: float = 0.0, radius: float = 1.0) -> "AxSymCompact":
        if radius <= 0:
            raise ValueError("radius must be positive")
        return cls(None, float(center), float(radius))

    def __post_init__(self):
        if (self.trace is None) == (self.radius is None):
            raise ValueError("give either a trace region or a ball")
        if self.trace is not None and (self.trace.is_empty or not self.trace.is_symmetric()):
            raise ValueError("trace must be a nonempty symmetric region")

    @property
    def max_abs(self) -> float:
        if self.radius is not None:
            return abs(self.center) + self.radius
        x0, y0, x1, y1 = (float(v) for v in self.trace.bounds)
        return math.hypot(max(abs(x0), abs(x1)), max(abs(y0), abs(y1)))

    def samples(self, density: int) -> tuple[np.ndarray, np.ndarray]:
        """Points (x, y ≥ 0) of the upper trace.  Density d uses the grid of
        spacing 2^-d (plus 2^(d+3) boundary angles for a ball); the point sets
        are nested, so sampled maxima grow with d."""
        h = 2.0 ** -density
        if self.radius is not None:
            c, r = self.center, self.radius
            k = int(math.floor(r / h))
            gx = c + h * np.arange(-k, k + 1)
            gy = h * np.arange(0, k + 1)
            X, Y = np.meshgrid(gx, gy, indexing="ij")
            keep = (X - c) ** 2 + Y ** 2 <= r * r
            t = np.pi * np.arange(0, 2 ** (density + 3) + 1) / 2 ** (density + 3)
            xs = np.concatenate([X[keep], c + r * np.cos(t)])
            ys = np.concatenate([Y[keep], r * np.sin(t)])
            return xs, ys
        x0, y0, x1, y1 = (float(v) for v in self.trace.bounds)
        gx = h * np.arange(math.ceil(x0 / h), math.floor(x1 / h) + 1)
        gy = h * np.arange(0, math.floor(y1 / h) + 1)
        X, Y = np.meshgrid(gx, gy, indexing="ij")
        d = float(1 << self.trace.level)
        R = self.trace.rects() / d
        inside = np.zeros(X.shape, dtype=bool)
        for x_0, y_0, x_1, y_1 in R:
            inside |= (X >= x_0) & (X <= x_1) & (Y >= y_0) & (Y <= y_1)
        verts = [(float(a), float(b)) for a, b in self.trace.vertices() if b >= 0]
        xs = np.concatenate([X[inside], [v[0] for v in verts]])
        ys = np.concatenate([Y[inside], [v[1] for v in verts]])
        return xs, ys


def sup_norm(f: QPolynomial, k: AxSymCompact, sampling: int = 6) -> float:
    """Sampled max of |f| over the axial symmetrization of ``k``: exact over
    every sphere through a sample point, so a lower bound for the true max."""
    if not f.coeffs:
        return 0.0
    x, y = k.samples(sampling)
    m = float(sphere_max(f, x, y).max())
    for u in SAMPLE_UNITS:
        m = max(m, float(unit_values(f, x, y, u).max()))
    return m


# series --------------------------------------------------------------------------------
def exp_star(f: QPolynomial, n_terms: int = 20) -> QPolynomial:
    """Σ_{n=0}^{n_terms} f^{*n}/n!."""
    if n_terms < 0:
        raise ValueError("n_terms must be nonnegative")
    one = QPolynomial.constant((1, 0, 0, 0), f.exact)
    out, power = one, one
    for n in range(1, n_terms + 1):
        power = star_product(power, f, check=False).scale(Fraction(1, n) if f.exact else 1.0 / n)
        out = out + power
    return out


def log_star_one_minus(f: QPolynomial, n_terms: int = 20, k: AxSymCompact | None = None,
                       r: float | None = None, sampling: int = 6) -> QPolynomial:
    """−Σ_{n=1}^{n_terms} f^{*n}/n.  With a compact ``k`` the precondition
    |f|_k ≤ r < 1 is measured first (r defaults to the measured value)."""
    if k is not None:
        m = sup_norm(f, k, sampling)
        bound = m if r is None else r
        if m > bound or bound >= 1:
            raise DomainError(f"log precondition fails: measured |f|_K = {m:.6g}, r = {bound}")
    out = QPolynomial((), f.exact)
    power = QPolynomial.constant((1, 0, 0, 0), f.exact)
    for n in range(1, n_terms + 1):
        power = star_product(power, f, check=False)
        out = out - power.scale(Fraction(1, n) if f.exact else 1.0 / n)
    return out


def exp_log_bound(r: float, n_terms: int) -> float:
    """Bound on |exp_*(log_*(1−f)) − (1−f)|_K for |f|_K ≤ r < 1 with both
    series cut after ``n_terms`` terms.

    The log tail is at most r^{N+1}/((N+1)(1−r)); both logarithms have norm at
    most M = −ln(1−r), so exp changes by at most e^M = 1/(1−r) times that; the
    exp tail adds M^{N+1}/(N+1)! · e^M.
    """
    if not 0 <= r < 1:
        raise ValueError("need 0 <= r < 1")
    n = n_terms
    m = -math.log1p(-r)
    log_tail = r ** (n + 1) / ((n + 1) * (1 - r))
    exp_tail = m ** (n + 1) / math.factorial(n + 1)
    return (log_tail + exp_tail) / (1 - r)


@dataclass(frozen=True)
class PowerSeries:
    """Coefficients on demand plus a caller-supplied bound |a_n| ≤ bound(n)."""

    coeff: Callable[[int], tuple]
    bound: Callable[[int], float]
    exact: bool = False

    @classmethod
    def of_polynomial(cls, p: QPolynomial) -> "PowerSeries":
        cs = p.coeffs
        zero = _coerce((0, 0, 0, 0), p.exact)
        return cls(lambda n: cs[n] if n < len(cs) else zero,
                   lambda n: qabs(cs[n]) if n < len(cs) else 0.0, p.exact)


def exp_series() -> PowerSeries:
    return PowerSeries(lambda n: (1.0 / math.factorial(n), 0.0, 0.0, 0.0), lambda n: 1.0 / math.factorial(n))


def tail_bound(s: PowerSeries, big_r: float, n: int, window: int = 64) -> float:
    """Σ_{m>n} bound(m) R^m by a geometric majorant: the first term divided by
    1 − ρ, ρ the largest ratio of successive terms over the next ``window``
    terms (infinite when ρ ≥ 1).  Exactly zero when the bounds vanish there."""
    terms = [s.bound(m) * big_r ** m for m in range(n + 1, n + window + 2)]
    if all(t == 0 for t in terms):
        return 0.0
    ratios = [terms[i + 1] / terms[i] for i in range(len(terms) - 1) if terms[i] > 0]
    rho = max(ratios, default=0.0)
    if rho >= 1:
        return math.inf
    return terms[0] / (1 - rho)


def runge_truncate(series: PowerSeries | QPolynomial, v: Sequence[AxSymCompact], eps: float,
                   cap: int = 400, sampling: int = 5) -> QPolynomial:
    """Shortest truncation Σ_{n≤N} q^n a_n with tail bound below ``eps`` on the balls ``v``.
    A polynomial is already its own approximation and comes back unchanged."""
    if isinstance(series, QPolynomial):
        return series
    if not v:
        raise ValueError("need at least one ball")
    big_r = max(b.max_abs for b in v)
    for n in range(cap + 1):
        if tail_bound(series, big_r, n) < eps:
            break
    else:
        raise DomainError(f"tail bound not below {eps} within {cap} terms")
    out = QPolynomial([series.coeff(m) for m in range(n + 1)], series.exact)
    ref_n = n + 20
    ref = QPolynomial([series.coeff(m) for m in range(ref_n + 1)], series.exact)
    err = max(sup_norm((ref - out).to_double() if out.exact else ref - out, b, sampling) for b in v)
    if err + tail_bound(series, big_r, ref_n) >= eps:
        raise DomainError(f"sampled truncation error {err:.3g} is not below {eps}")
    return out


# JSON ----------------------------------------------------------------------------------
def _num_out(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return float(x)


def poly_to_json(f: QPolynomial) -> dict:
    return {"coeffs": [[_num_out(x) for x in c] for c in f.coeffs], "exact": f.exact}


def poly_from_json(obj: dict, exact: bool | None = None) -> QPolynomial:
    cs = obj["coeffs"]
    if exact is None:
        exact = obj.get("exact", all(not isinstance(x, float) for c in cs for x in c))
    if exact:
        return QPolynomial([[Fraction(x) for x in c] for c in cs], True)
    return QPolynomial([[float(Fraction(x)) if isinstance(x, str) else float(x) for x in c] for c in cs], False)
