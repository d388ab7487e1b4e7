"""Antisymmetric integer Čech cochains on symmetric coverings.

A degree-m cochain assigns an integer ``n_L`` to each sorted (m+1)-tuple L
with nonempty ``U_L``; it stands for the locally constant function that is
``+n_L`` on the upper half of ``U_L`` and ``-n_L`` on the lower half, so it
changes sign under conjugation and must vanish when ``U_L`` meets the axis.
Values on permuted tuples follow the alternating convention.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .covering import CartanCovering, CoveringSpec, Nerve, nerve as build_nerve
from .errors import InfeasibleError
from .geometry import Region
from .intsolve import solve_integer

log = logging.getLogger(__name__)


def perm_sign(tup: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the sorting permutation (0 for repeated indices) and the sorted tuple."""
    s = list(tup)
    if len(set(s)) != len(s):
        return 0, tuple(sorted(s))
    sign = 1
    for i in range(len(s)):
        for j in range(len(s) - 1 - i):
            if s[j] > s[j + 1]:
                s[j], s[j + 1] = s[j + 1], s[j]
                sign = -sign
    return sign, tuple(s)


@dataclass(frozen=True)
class SymmetricCovering:
    members: tuple[Region, ...]
    nerve: Nerve
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def refined(self) -> "ComponentCovering":
        if "refined" not in self._cache:
            self._cache["refined"] = refine(self)
        return self._cache["refined"]

    @classmethod
    def of(cls, c: CartanCovering | CoveringSpec | Sequence[Region]) -> "SymmetricCovering":
        if isinstance(c, CartanCovering):
            members = c.closures
        elif isinstance(c, CoveringSpec):
            members = c.members
        else:
            members = tuple(c)
        return cls(tuple(members), build_nerve(list(members)))

    def simplices(self, m: int) -> list[tuple[int, ...]]:
        return self.nerve.of_dim(m)

    def meets_real(self, key) -> bool:
        return self.nerve.meets_real(tuple(key))


@dataclass
class AntisymCochain:
    degree: int
    values: dict[tuple[int, ...], int] = field(default_factory=dict)

    def __post_init__(self):
        vals = {}
        for key, v in dict(self.values).items():
            sign, k = perm_sign(key)
            if len(k) != self.degree + 1:
                raise ValueError(f"tuple {key} has the wrong length for degree {self.degree}")
            if sign == 0:
                continue
            v = int(v) * sign
            if v:
                vals[k] = vals.get(k, 0) + v
        self.values = {k: v for k, v in sorted(vals.items()) if v}

    def __getitem__(self, key) -> int:
        sign, k = perm_sign(key)
        return sign * self.values.get(k, 0)

    def __eq__(self, other) -> bool:
        return isinstance(other, AntisymCochain) and self.degree == other.degree and self.values == other.values

    def __sub__(self, other: "AntisymCochain") -> "AntisymCochain":
        keys = set(self.values) | set(other.values)
        return AntisymCochain(self.degree, {k: self.values.get(k, 0) - other.values.get(k, 0) for k in keys})

    def is_zero(self) -> bool:
        return not self.values


@dataclass
class ComponentCochain:
    """Cochain on the component refinement; vertices are ``(set, component)`` pairs."""

    degree: int
    values: dict[tuple, int] = field(default_factory=dict)

    def __getitem__(self, key) -> int:
        sign, k = perm_sign(key)
        return sign * self.values.get(k, 0)


def coboundary(c, cov: SymmetricCovering | "ComponentCovering") -> AntisymCochain | ComponentCochain:
    """(δc)_{k_0…k_{m+1}} = Σ_i (−1)^i c_{k_0…k̂_i…k_{m+1}} on every simplex of the nerve."""
    if c.degree < 0:
        raise ValueError("degree must be nonnegative")
    out = {}
    for key in cov.simplices(c.degree + 1):
        v = 0
        for i in range(len(key)):
            v += (-1) ** i * c[key[:i] + key[i + 1:]]
        if v:
            out[key] = v
    if isinstance(c, ComponentCochain):
        return ComponentCochain(c.degree + 1, out)
    return AntisymCochain(c.degree + 1, out)


def is_antisymmetric(c: AntisymCochain, cov: SymmetricCovering) -> bool:
    """Supported on the nerve and zero wherever U_L meets the axis."""
    simp = set(cov.simplices(c.degree))
    return all(k in simp and not cov.meets_real(k) for k in c.values)


# component refinement ------------------------------------------------------------------
@dataclass
class ComponentCovering:
    """Connected components of the members with the conjugation involution σ.

    ``half[key]`` is "upper", "lower", "real" or "mixed" for the intersection
    of the components in ``key``; ``base[key]`` is the simplex of the
    original covering it lies over.
    """

    vertices: list[tuple[int, int]]
    sigma: dict[tuple[int, int], tuple[int, int]]
    half: dict[tuple, str]
    _by_dim: dict[int, list[tuple]]

    def simplices(self, m: int) -> list[tuple]:
        return self._by_dim.get(m + 1, [])

    def flip(self, key: tuple) -> tuple:
        return tuple(self.sigma[v] for v in key)


def _piece_half(p: Region) -> str:
    y0, y1 = p.bounds[1], p.bounds[3]
    if y0 >= 0:
        return "upper"
    if y1 <= 0:
        return "lower"
    return "real"


def refine(cov: SymmetricCovering) -> ComponentCovering:
    nv = cov.nerve
    verts = []
    sigma = {}
    for (k,), parts in sorted((key, p) for key, p in nv.parts.items() if len(key) == 1):
        for a in range(len(parts)):
            verts.append((k, a))
            m = nv.mirror[(k,)][a]
            if m < 0:
                raise ValueError(f"member {k} is not symmetric")
            sigma[(k, a)] = (k, m)
    half: dict[tuple, str] = {}
    by_dim: dict[int, list[tuple]] = {}
    for key in nv.simplices:
        pieces = nv.parts[key]
        groups: dict[tuple, list[Region]] = {}
        for p in pieces:
            x, y = _inner_point(p)
            sig = []
            for k in key:
                sig.append((k, _owner(nv.parts[(k,)], x, y)))
            groups.setdefault(tuple(sig), []).append(p)
        for sig, ps in groups.items():
            halves = {_piece_half(p) for p in ps}
            h = "real" if "real" in halves else halves.pop() if len(halves) == 1 else "mixed"
            half[sig] = h
            by_dim.setdefault(len(sig), []).append(sig)
    for d in by_dim:
        by_dim[d].sort()
    return ComponentCovering(verts, sigma, half, by_dim)


def _owner(comps: Sequence[Region], x, y) -> int:
    if len(comps) == 1:
        return 0
    inbox = [a for a, c in enumerate(comps) if c.bounds[0] <= x <= c.bounds[2] and c.bounds[1] <= y <= c.bounds[3]]
    if len(inbox) == 1:
        return inbox[0]
    return next(a for a in inbox if comps[a].contains_point(x, y))


def _inner_point(p: Region):
    """Centre of one cell of the region (an interior point)."""
    from fractions import Fraction
    ii, jj = p.mask.nonzero()
    i, j = int(ii[0]), int(jj[0])
    d = 1 << p.level
    return (Fraction(int(p.xs[i] + p.xs[i + 1]), 2 * d), Fraction(int(p.ys[j] + p.ys[j + 1]), 2 * d))


# the solver ---------------------------------------------------------------------------
def lift(c: AntisymCochain, vc: ComponentCovering) -> ComponentCochain:
    """ν_κ = ±n_L by the half-plane containing V_κ, and 0 on real-meeting pieces."""
    out = {}
    for key in vc.simplices(c.degree):
        n = c[tuple(k for k, _ in key)]
        h = vc.half[key]
        if h == "real" or n == 0:
            continue
        if h == "mixed":
            raise ValueError(f"component intersection {key} lies in both half-planes")
        out[key] = n if h == "upper" else -n
    return ComponentCochain(c.degree, out)


def _solve_delta(vc: ComponentCovering, target: ComponentCochain, antisym: bool,
                 equivariant: bool = True) -> dict[tuple, int]:
    """Integer x on component edges with δx = target.  With ``antisym`` the
    unknowns are tied by x_{σe} = −x_e, which forces x = 0 on σ-fixed edges."""
    edges = vc.simplices(1)
    var_of: dict[tuple, tuple[int, int]] = {}
    nvars = 0
    for e in edges:
        if e in var_of:
            continue
        f = vc.flip(e)
        if not antisym:
            var_of[e] = (nvars, 1)
            nvars += 1
        elif f == e:
            var_of[e] = (-1, 0)
        else:
            var_of[e] = (nvars, 1)
            var_of[f] = (nvars, -1)
            nvars += 1
    rows, rhs, tri = [], [], []
    seen = set()
    for t in vc.simplices(2):
        if antisym:
            if vc.flip(t) in seen:
                continue
            seen.add(t)
        tri.append(t)
        row: dict[int, int] = {}
        for i in range(3):
            e = t[:i] + t[i + 1:]
            v, s = var_of[e]
            if v >= 0:
                row[v] = row.get(v, 0) + (-1) ** i * s
        rows.append({k: v for k, v in row.items() if v})
        rhs.append(target.values.get(t, 0))
    if antisym:
        sol = solve_integer(rows, rhs, nvars)
    else:
        # peel conjugate triangles together so the gauge is conjugation-symmetric
        row_of = {t: i for i, t in enumerate(tri)}
        var_edge = {v: e for e, (v, _) in var_of.items()}
        twin_rows = [row_of.get(vc.flip(t), i) for i, t in enumerate(tri)]
        twin_vars = [var_of[vc.flip(var_edge[v])][0] for v in range(nvars)]
        sol = solve_integer(rows, rhs, nvars, twin_rows, twin_vars) if equivariant else solve_integer(rows, rhs, nvars)
    out = {}
    for e in edges:
        v, s = var_of[e]
        if v >= 0 and sol[v]:
            out[e] = s * sol[v]
    return out


def solve_antisym_h2(cov: SymmetricCovering, c2: AntisymCochain, stats: dict | None = None,
                     equivariant: bool = True) -> AntisymCochain:
    """An antisymmetric integer 1-cochain c1 with δc1 = c2.

    The cocycle is lifted to the component refinement, solved there over the
    integers, averaged with its conjugate ``μ_{κλ} = −x_{σκ σλ}`` and pushed
    back down.  When the average is not integral a single solve with the
    antisymmetry built into the unknowns is used instead; ``stats["fallback"]``
    records which route produced the answer.
    """
    if c2.degree != 2:
        raise ValueError("expected a degree-2 cochain")
    if not coboundary(c2, cov).is_zero():
        raise ValueError("input is not a cocycle")
    if not is_antisymmetric(c2, cov):
        raise ValueError("input is not antisymmetric")
    vc = cov.refined()
    nu = lift(c2, vc)
    fallback = False
    x = _solve_delta(vc, nu, antisym=False, equivariant=equivariant)
    big_n = {}
    for e in vc.simplices(1):
        s = x.get(e, 0) - x.get(vc.flip(e), 0)
        if s % 2:
            fallback = True
            break
        if s:
            big_n[e] = s // 2
    if fallback:
        log.info("averaged solution is not integral; using the constrained solve")
        big_n = _solve_delta(vc, nu, antisym=True)
    c1 = push_down(big_n, vc, cov)
    if stats is not None:
        stats["fallback"] = fallback
        stats["components"] = len(vc.vertices)
    if coboundary(c1, cov) != c2 or not is_antisymmetric(c1, cov):
        raise InfeasibleError("push-down did not reproduce the cocycle", fallback=fallback)
    return c1


def push_down(big_n: Mapping[tuple, int], vc: ComponentCovering, cov: SymmetricCovering) -> AntisymCochain:
    """U-indexed cochain: n_{kl} is the value on the upper piece of U_{kl}."""
    out: dict[tuple[int, int], int] = {}
    for e in vc.simplices(1):
        h = vc.half[e]
        if h not in ("upper", "lower"):
            continue
        v = big_n.get(e, 0) * (1 if h == "upper" else -1)
        key = tuple(k for k, _ in e)
        if key in out and out[key] != v:
            raise InfeasibleError(f"pieces of U_{key} carry different values")
        out[key] = v
    return AntisymCochain(1, out)


def check_higher_vanishing(cov: SymmetricCovering, n: int) -> bool:
    """True when no n+1 members meet, so antisymmetric n-cochains vanish."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return not any(len(k) >= n + 1 for k in cov.nerve.parts)


def random_antisym(cov: SymmetricCovering, degree: int, rng, low: int = -5, high: int = 5) -> AntisymCochain:
    """Uniform integer values on the off-axis simplices of the given degree."""
    keys = [k for k in cov.simplices(degree) if not cov.meets_real(k)]
    return AntisymCochain(degree, {k: int(rng.integers(low, high + 1)) for k in keys})


def cochain_to_json(c: AntisymCochain) -> dict:
    return {"degree": c.degree, "values": [{"tuple": list(k), "n": v} for k, v in c.values.items()]}


def cochain_from_json(obj: dict) -> AntisymCochain:
    return AntisymCochain(int(obj["degree"]), {tuple(int(i) for i in e["tuple"]): int(e["n"])
                                               for e in obj.get("values", [])})


__all__ = ["AntisymCochain", "ComponentCochain", "ComponentCovering", "SymmetricCovering",
           "check_higher_vanishing", "coboundary", "is_antisymmetric", "lift",
           "perm_sign", "push_down", "random_antisym", "refine", "solve_antisym_h2"]
