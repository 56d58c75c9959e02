"""Small dense two-phase simplex with dual extraction.

Built for the desk-scale LPs in this package (tens of rows, up to a few
thousand columns): no sparsity, no scaling, Bland's rule throughout so the
method terminates even on the heavily degenerate instances the column
generation produces. Arithmetic is generic: feed Fractions and every pivot
stays exact (tolerance 0); feed floats and a 1e-9 tolerance applies.

Problem form (all variables nonnegative):

    min / max   c . x
    subject to  A_eq x  = b_eq
                A_ub x <= b_ub

Duals are returned per constraint row with the usual shadow-price signs:
objective == dual_eq . b_eq + dual_ub . b_ub at the optimum, dual_ub <= 0
for minimization and >= 0 for maximization.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

FLOAT_TOL = 1e-9


class LpInfeasible(RuntimeError):
    pass


class LpUnbounded(RuntimeError):
    pass


@dataclass
class LpResult:
    x: list
    objective: object
    dual_eq: list
    dual_ub: list
    iterations: int


def _is_exact(*arrays) -> bool:
    for arr in arrays:
        for row in arr:
            for v in row if isinstance(row, (list, tuple)) else [row]:
                if not isinstance(v, (int, Fraction)):
                    return False
    return True


def solve_lp(
    c: Sequence,
    A_ub: Optional[Sequence[Sequence]] = None,
    b_ub: Optional[Sequence] = None,
    A_eq: Optional[Sequence[Sequence]] = None,
    b_eq: Optional[Sequence] = None,
    maximize: bool = False,
    tol=None,
) -> LpResult:
    A_ub = [list(r) for r in (A_ub or [])]
    b_ub = list(b_ub or [])
    A_eq = [list(r) for r in (A_eq or [])]
    b_eq = list(b_eq or [])
    nv = len(c)
    if tol is None:
        tol = 0 if _is_exact([c], A_ub, [b_ub], A_eq, [b_eq]) else FLOAT_TOL
    zero = Fraction(0) if tol == 0 else 0.0
    one = Fraction(1) if tol == 0 else 1.0

    cmin = [(-ci if maximize else ci) for ci in c]

    # Row layout: equalities first, then inequalities (each with one slack).
    rows = [(list(r), b) for r, b in zip(A_eq, b_eq)]
    rows += [(list(r), b) for r, b in zip(A_ub, b_ub)]
    m = len(rows)
    n_eq = len(A_eq)
    ns = len(A_ub)
    width = nv + ns + m  # vars | slacks | artificials
    art0 = nv + ns

    tab = []
    flip = [one] * m
    for r, (coeffs, b) in enumerate(rows):
        row = [zero] * (width + 1)
        for j, v in enumerate(coeffs):
            row[j] = v + zero
        if r >= n_eq:
            row[nv + (r - n_eq)] = one
        if b < 0:
            flip[r] = -one
            row = [-v for v in row]
            b = -b
        row[art0 + r] = one
        row[width] = b + zero
        tab.append(row)

    basis = [art0 + r for r in range(m)]

    def pivot(r, j):
        piv = tab[r][j]
        inv = one / piv
        tab[r] = [v * inv for v in tab[r]]
        prow = tab[r]
        for i in range(len(tab)):
            if i != r:
                f = tab[i][j]
                if f != 0:
                    tab[i] = [a - f * b for a, b in zip(tab[i], prow)]
        basis[r] = j

    def run(cost, banned) -> int:
        """Bland's-rule iterations for min cost; returns iteration count."""
        iters = 0
        while True:
            # y = cost_B B^-1, via reduced costs computed column-by-column
            y = [cost[basis[i]] for i in range(len(tab))]
            entering = -1
            for j in range(width):
                if j in banned or j in basis:
                    continue
                red = cost[j]
                for i in range(len(tab)):
                    if y[i] != 0:
                        red -= y[i] * tab[i][j]
                if red < -tol:
                    entering = j
                    break
            if entering < 0:
                return iters
            leaving = -1
            best = None
            for i in range(len(tab)):
                a = tab[i][entering]
                if a > tol:
                    ratio = tab[i][width] / a
                    if best is None or ratio < best or (
                        ratio == best and basis[i] < basis[leaving]
                    ):
                        best = ratio
                        leaving = i
            if leaving < 0:
                raise LpUnbounded(f"column {entering} unbounded")
            pivot(leaving, entering)
            iters += 1

    # Phase 1: drive artificials to zero.
    cost1 = [zero] * width
    for j in range(art0, width):
        cost1[j] = one
    iters = run(cost1, banned=frozenset())
    infeas = sum(tab[i][width] for i in range(len(tab)) if basis[i] >= art0)
    if infeas > (tol if tol else 0):
        raise LpInfeasible(f"phase-1 residual {infeas}")

    # Pivot out any artificial still basic (at value 0); drop redundant rows.
    dropped = set()
    for i in range(len(tab)):
        if basis[i] >= art0:
            target = -1
            for j in range(art0):
                if abs(tab[i][j]) > tol:
                    target = j
                    break
            if target >= 0:
                pivot(i, target)
            else:
                dropped.add(i)

    # Phase 2.
    cost2 = [zero] * width
    for j in range(nv):
        cost2[j] = cmin[j] + zero
    banned = frozenset(range(art0, width)) | frozenset(basis[i] for i in dropped)
    iters += run(cost2, banned=banned)

    x = [zero] * nv
    for i, bj in enumerate(basis):
        if bj < nv and i not in dropped:
            x[bj] = tab[i][width]
    objective = sum(ci * xi for ci, xi in zip(c, x))

    # Duals: artificial columns of the final tableau hold B^-1.
    y = []
    for r in range(m):
        if r in dropped:
            y.append(zero)
            continue
        val = zero
        col = art0 + r
        for i in range(len(tab)):
            cb = cost2[basis[i]]
            if cb != 0:
                val += cb * tab[i][col]
        y.append(val * flip[r])
    if maximize:
        y = [-v for v in y]
    return LpResult(
        x=x,
        objective=objective,
        dual_eq=y[:n_eq],
        dual_ub=y[n_eq:],
        iterations=iters,
    )
