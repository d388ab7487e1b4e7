"""Exact integer solutions of sparse linear systems ``A x = b``.

Rows whose unknown appears nowhere else with coefficient ±1 are peeled off
first (on a 2-complex this is collapsing a triangle through a free edge).
Whatever remains goes through column-Hermite elimination with unimodular
column operations, which decides solvability over the integers exactly.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from .errors import InfeasibleError


def solve_integer(rows: Sequence[Mapping[int, int]], rhs: Sequence[int], nvars: int,
                  twin_rows: Sequence[int] | None = None, twin_vars: Sequence[int] | None = None) -> list[int]:
    """Some integer x with Σ_j rows[i][j]·x_j = rhs[i] for every i.

    Unknowns left undetermined are set to 0.  Raises InfeasibleError with a
    ``certificate`` naming the offending row when no integer solution exists.

    With ``twin_rows``/``twin_vars`` (an involution on rows and unknowns) rows
    are peeled together with their twins and self-twinned unknowns are never
    peeled, so the peeled part of the solution is as symmetric as the data.
    """
    rows = [dict((int(k), int(v)) for k, v in r.items() if v) for r in rows]
    rhs = [int(b) for b in rhs]
    where: dict[int, set[int]] = {}
    for i, r in enumerate(rows):
        for v in r:
            where.setdefault(v, set()).add(i)
    alive = set(range(len(rows)))
    stack: list[tuple[int, int]] = []
    queue = [v for v, s in where.items() if len(s) == 1]

    def peelable(i, v):
        return i in alive and where.get(v) == {i} and abs(rows[i][v]) == 1

    def peel(i, v):
        stack.append((i, v))
        alive.discard(i)
        for u in rows[i]:
            where[u].discard(i)
            if len(where[u]) == 1:
                queue.append(u)

    paired = twin_rows is not None and twin_vars is not None
    while queue:
        v = queue.pop()
        s = where.get(v)
        if not s or len(s) != 1:
            continue
        (i,) = tuple(s)
        if not peelable(i, v):
            continue
        if paired:
            ti, tv = twin_rows[i], twin_vars[v]
            if ti == i or tv == v or tv < 0:
                continue
            peel(i, v)
            if peelable(ti, tv):
                peel(ti, tv)
        else:
            peel(i, v)

    x = [0] * nvars
    rest = sorted(alive)
    if rest:
        cols = sorted({v for i in rest for v in rows[i]})
        sol = hermite_solve([[rows[i].get(v, 0) for v in cols] for i in rest], [rhs[i] for i in rest],
                            row_ids=rest)
        for v, val in zip(cols, sol):
            x[v] = val
    for i, v in reversed(stack):
        acc = sum(c * x[u] for u, c in rows[i].items() if u != v)
        x[v] = (rhs[i] - acc) * rows[i][v]     # coefficient is ±1
    return x


def hermite_solve(a: list[list[int]], b: list[int], row_ids: Sequence[int] | None = None) -> list[int]:
    """Dense exact solve by reducing ``a`` to lower echelon form with unimodular
    column operations ``a·U``; then ``x = U·z`` for the triangular solution z."""
    m = len(a)
    n = len(a[0]) if m else 0
    ids = list(row_ids) if row_ids is not None else list(range(m))
    a = [list(r) for r in a]
    u = [[int(i == j) for j in range(n)] for i in range(n)]

    def col_axpy(dst, src, q):
        if q == 0:
            return
        for r in a:
            r[dst] -= q * r[src]
        for r in u:
            r[dst] -= q * r[src]

    def col_swap(p, q):
        if p == q:
            return
        for r in a:
            r[p], r[q] = r[q], r[p]
        for r in u:
            r[p], r[q] = r[q], r[p]

    pivot_of: list[int | None] = []
    piv = 0
    for i in range(m):
        if piv >= n:
            pivot_of.append(None)
            continue
        while True:
            nz = [c for c in range(piv, n) if a[i][c]]
            if len(nz) <= 1:
                break
            p = min(nz, key=lambda c: abs(a[i][c]))
            for c in nz:
                if c != p:
                    col_axpy(c, p, a[i][c] // a[i][p])
        if not nz:
            pivot_of.append(None)
            continue
        col_swap(piv, nz[0])
        if a[i][piv] < 0:
            for r in a:
                r[piv] = -r[piv]
            for r in u:
                r[piv] = -r[piv]
        pivot_of.append(piv)
        piv += 1

    z = [0] * n
    for i in range(m):
        p = pivot_of[i]
        s = sum(a[i][c] * z[c] for c in range(piv if p is None else p))
        if p is None:
            if s != b[i]:
                raise InfeasibleError("integer system is inconsistent", certificate={"row": ids[i]})
            continue
        q, r = divmod(b[i] - s, a[i][p])
        if r:
            raise InfeasibleError("no integer solution", certificate={"row": ids[i], "pivot": a[i][p],
                                                                      "residual": b[i] - s})
        z[p] = q
    return [sum(u[r][c] * z[c] for c in range(n)) for r in range(n)]
