"""Exact linear algebra and linear programming over rationals.

Everything in this module works on ``fractions.Fraction`` so that
feasibility, rank and optimality decisions are exact.  Problem sizes are
tiny (a handful of variables and constraints), so a dense tableau simplex
with Bland's rule is entirely adequate.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

Vec = tuple[Fraction, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def frac(x) -> Fraction:
    """Coerce an int, Fraction or 'p/q' / decimal string to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rational scalars")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def vec(xs: Iterable) -> Vec:
    return tuple(frac(x) for x in xs)


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    if len(a) != len(b):
        raise ValueError("dimension mismatch in dot product")
    return sum((x * y for x, y in zip(a, b)), ZERO)


def vadd(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def vneg(a: Vec) -> Vec:
    return tuple(-x for x in a)


def vscale(c: Fraction, a: Vec) -> Vec:
    return tuple(c * x for x in a)


# ---------------------------------------------------------------------------
# Gaussian elimination


def rref(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (matrix, pivot column indices)."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def mat_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(rref(rows)[1])


def solve_linear(
    a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]
) -> Optional[Vec]:
    """One solution of A x = b, or None if the system is inconsistent.

    Free variables are set to zero, so the result is deterministic.
    """
    if not a:
        return ()
    n = len(a[0])
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    red, pivots = rref(aug)
    if n in pivots:  # pivot in the rhs column: inconsistent
        return None
    x = [ZERO] * n
    for i, c in enumerate(pivots):
        x[c] = red[i][n]
    return tuple(x)


def nullspace_basis(a: Sequence[Sequence[Fraction]], n: int) -> list[Vec]:
    """Basis of the null space of A (A has n columns)."""
    if not a:
        return [tuple(ONE if j == i else ZERO for j in range(n)) for i in range(n)]
    red, pivots = rref(a)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for i, c in enumerate(pivots):
            v[c] = -red[i][f]
        basis.append(tuple(v))
    return basis


# ---------------------------------------------------------------------------
# Simplex


class LPResult:
    __slots__ = ("status", "x", "value")

    def __init__(self, status: str, x: Optional[Vec] = None, value=None):
        self.status = status  # "optimal" | "infeasible" | "unbounded"
        self.x = x
        self.value = value

    def __repr__(self):  # pragma: no cover
        return f"LPResult({self.status}, x={self.x}, value={self.value})"


def _pivot(tab, basis, r, c):
    pv = tab[r][c]
    tab[r] = [x / pv for x in tab[r]]
    for i in range(len(tab)):
        if i != r and tab[i][c] != 0:
            f = tab[i][c]
            tab[i] = [x - f * y for x, y in zip(tab[i], tab[r])]
    basis[r] = c


def _run_simplex(tab, basis, m, ncols, allowed) -> str:
    """Minimise the cost row (last row) with Bland's rule."""
    while True:
        cost = tab[m]
        enter = next(
            (j for j in range(ncols) if allowed[j] and cost[j] < 0), None
        )
        if enter is None:
            return "optimal"
        ratios = [
            (tab[i][ncols] / tab[i][enter], basis[i], i)
            for i in range(m)
            if tab[i][enter] > 0
        ]
        if not ratios:
            return "unbounded"
        _, _, leave = min(ratios)
        _pivot(tab, basis, leave, enter)


def lp_standard(
    a: Sequence[Sequence[Fraction]],
    b: Sequence[Fraction],
    c: Sequence[Fraction],
) -> LPResult:
    """min c.x subject to A x = b, x >= 0 (two-phase simplex, exact)."""
    m = len(a)
    n = len(c)
    rows = [list(r) for r in a]
    rhs = list(b)
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-x for x in rows[i]]
            rhs[i] = -rhs[i]

    total = n + m  # artificials appended
    tab = [
        rows[i] + [ONE if j == i else ZERO for j in range(m)] + [rhs[i]]
        for i in range(m)
    ]
    basis = [n + i for i in range(m)]
    # phase-1 cost row: minimise sum of artificials
    cost = [ZERO] * (total + 1)
    for i in range(m):
        for j in range(total + 1):
            cost[j] -= tab[i][j]
    for j in range(n, total):
        cost[j] += ONE
    tab.append(cost)
    allowed = [True] * total
    status = _run_simplex(tab, basis, m, total, allowed)
    assert status == "optimal"  # phase 1 is bounded below by 0
    if tab[m][total] != 0:  # -objective stored; nonzero => infeasible
        return LPResult("infeasible")

    # drive artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n:
            col = next((j for j in range(n) if tab[i][j] != 0), None)
            if col is not None:
                _pivot(tab, basis, i, col)

    # phase 2
    allowed = [j < n for j in range(total)]
    cost = list(c) + [ZERO] * (m + 1)
    for i in range(m):
        bj = basis[i]
        if bj < n and cost[bj] != 0:
            f = cost[bj]
            cost = [x - f * y for x, y in zip(cost, tab[i])]
    tab[m] = cost
    status = _run_simplex(tab, basis, m, total, allowed)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [ZERO] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tab[i][total]
    val = dot(c, x)
    return LPResult("optimal", tuple(x), val)


def lp(
    c: Sequence[Fraction],
    a_ge: Sequence[Sequence[Fraction]] = (),
    b_ge: Sequence[Fraction] = (),
    a_eq: Sequence[Sequence[Fraction]] = (),
    b_eq: Sequence[Fraction] = (),
) -> LPResult:
    """min c.x over free x subject to A_ge x >= b_ge and A_eq x = b_eq."""
    n = len(c)
    mg = len(a_ge)
    # variables: u(n), v(n), slack(mg); x = u - v
    def widen(row, slack_idx=None):
        out = list(row) + [-x for x in row] + [ZERO] * mg
        if slack_idx is not None:
            out[2 * n + slack_idx] = -ONE
        return out

    rows = [widen(r, i) for i, r in enumerate(a_ge)]
    rhs = list(b_ge)
    rows += [widen(r) for r in a_eq]
    rhs += list(b_eq)
    cc = list(c) + [-x for x in c] + [ZERO] * mg
    res = lp_standard(rows, rhs, cc)
    if res.status != "optimal":
        return res
    x = tuple(res.x[j] - res.x[n + j] for j in range(n))
    return LPResult("optimal", x, res.value)


def feasible_point(
    a_ge: Sequence[Sequence[Fraction]] = (),
    b_ge: Sequence[Fraction] = (),
    a_eq: Sequence[Sequence[Fraction]] = (),
    b_eq: Sequence[Fraction] = (),
) -> Optional[Vec]:
    n = len(a_ge[0]) if a_ge else (len(a_eq[0]) if a_eq else 0)
    res = lp([ZERO] * n, a_ge, b_ge, a_eq, b_eq)
    return res.x if res.status == "optimal" else None


# ---------------------------------------------------------------------------
# Polyhedra of the form {y : B y >= alpha}


def polyhedron_vertices(
    b_rows: Sequence[Vec], alpha: Sequence[Fraction]
) -> list[Vec]:
    """All vertices of {y : B y >= alpha}, by enumerating basic solutions.

    Intended for desk-scale systems only (few rows, dimension <= 4).
    """
    if not b_rows:
        return []
    d = len(b_rows[0])
    seen: list[Vec] = []
    for idx in combinations(range(len(b_rows)), d):
        sub = [b_rows[i] for i in idx]
        if mat_rank(sub) < d:
            continue
        y = solve_linear(sub, [alpha[i] for i in idx])
        if y is None:
            continue
        if all(dot(b_rows[i], y) >= alpha[i] for i in range(len(b_rows))):
            if y not in seen:
                seen.append(y)
    return seen
