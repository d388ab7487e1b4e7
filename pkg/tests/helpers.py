"""Brute-force oracles shared by the tests; none of them uses the face machinery."""

from fractions import Fraction

from hypothesis import strategies as st


def cells_of_rects(rects, level):
    """Cells (i, j) of side 2^-level covered by a union of dyadic rectangles."""
    s = 1 << level
    out = set()
    for x0, y0, x1, y1 in rects:
        for i in range(int(Fraction(x0) * s), int(Fraction(x1) * s)):
            for j in range(int(Fraction(y0) * s), int(Fraction(y1) * s)):
                out.add((i, j))
    return out


def cells_of_region(r, level):
    """Cells whose centre lies in ``r``, probed point by point over its bounding box."""
    if r.is_empty:
        return set()
    s = 1 << level
    x0, y0, x1, y1 = r.bounds
    out = set()
    for i in range(int(x0 * s) - 1, int(x1 * s) + 1):
        for j in range(int(y0 * s) - 1, int(y1 * s) + 1):
            if r.contains_point(Fraction(2 * i + 1, 2 * s), Fraction(2 * j + 1, 2 * s)):
                out.add((i, j))
    return out


def dilate(cells, k):
    """Cell dilation by the square of k cells, i.e. a Minkowski sum at grid scale."""
    return {(i + a, j + b) for i, j in cells for a in range(-k, k + 1) for b in range(-k, k + 1)}


def reflect_cells(cells):
    return {(i, -1 - j) for i, j in cells}


eighths = st.integers(-16, 16).map(lambda n: Fraction(n, 8))


@st.composite
def rect(draw):
    x0, y0 = draw(eighths), draw(eighths)
    w = draw(st.integers(1, 12))
    h = draw(st.integers(1, 12))
    return (x0, y0, x0 + Fraction(w, 8), y0 + Fraction(h, 8))


rect_lists = st.lists(rect(), min_size=1, max_size=3)


def relatively_compact_gaps(k, domain, level):
    """Components of the complement of ``k`` (4-connected cells) that contain no
    cell outside ``domain``; empty exactly when ``k`` is Runge in ``domain``."""
    from collections import deque

    s = 1 << level
    x0, y0, x1, y1 = domain.bounds
    box = (int(x0 * s) - 2, int(y0 * s) - 2, int(x1 * s) + 2, int(y1 * s) + 2)
    kc = cells_of_region(k, level)
    dc = cells_of_region(domain, level)
    seen, bad = set(), []
    for i in range(box[0], box[2]):
        for j in range(box[1], box[3]):
            if (i, j) in kc or (i, j) in seen:
                continue
            comp, escapes = [], False
            todo = deque([(i, j)])
            seen.add((i, j))
            while todo:
                c = todo.popleft()
                comp.append(c)
                escapes |= c not in dc
                for n in ((c[0] + 1, c[1]), (c[0] - 1, c[1]), (c[0], c[1] + 1), (c[0], c[1] - 1)):
                    if n in seen or n in kc or not (box[0] <= n[0] < box[2] and box[1] <= n[1] < box[3]):
                        continue
                    seen.add(n)
                    todo.append(n)
            if not escapes:
                bad.append(comp)
    return bad
