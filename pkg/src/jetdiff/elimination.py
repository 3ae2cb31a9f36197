"""Elimination of d^l x_1 on the jet space of a hypersurface {f = 0}.

From d^l f = 0 one isolates f_{x1} d^l x_1 and substitutes lower-order rows,
yielding for each order l a power kappa_l and a polynomial P_l free of every
d^j x_1 such that (f_{x1})^kappa_l d^l x_1 = P_l holds on l-jets of {f = 0}.
Each row carries explicit cofactors C_{l,j} witnessing the exact polynomial
identity

    (f_{x1})^kappa_l d^l x_1 - P_l = sum_j C_{l,j} d^j f,

so the ideal membership can be rechecked without re-running the elimination.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple

from .poly import DIFF, DiffPoly, Variable, iterated_derivative, x_var


class DegenerateFError(ValueError):
    """f_{x1} is identically zero."""


@dataclass(frozen=True)
class EliminationRow:
    order: int
    kappa: int
    p: DiffPoly
    cofactors: Tuple[Tuple[int, DiffPoly], ...]   # (j, C_j), sorted by j

    def cofactor_map(self) -> Dict[int, DiffPoly]:
        return dict(self.cofactors)


@dataclass(frozen=True)
class EliminationTable:
    f: DiffPoly
    fx1: DiffPoly
    k: int
    rows: Tuple[EliminationRow, ...]   # orders 1..k

    def row(self, order: int) -> EliminationRow:
        return self.rows[order - 1]

    def kappa(self, order: int) -> int:
        return self.rows[order - 1].kappa


def _is_dx1(v: Variable, max_order: int | None = None) -> bool:
    if v.kind != DIFF or v.family != "x" or v.coord != 1:
        return False
    return max_order is None or v.order <= max_order


def eliminate_dx1(f: DiffPoly, k: int) -> EliminationTable:
    """Build the elimination table for orders 1..k."""
    fx1 = f.partial(x_var(1))
    if fx1.is_zero():
        raise DegenerateFError("degenerate-f: f_x1 is identically zero")
    rows = []
    d_f = f
    for order in range(1, k + 1):
        d_f = iterated_derivative(d_f, 1)
        rows.append(_build_row(order, d_f, fx1, rows))
    return EliminationTable(f=f, fx1=fx1, k=k, rows=tuple(rows))


def _build_row(order: int, d_f: DiffPoly, fx1: DiffPoly, rows) -> EliminationRow:
    top = DiffPoly.var(x_var(1, order))
    # d^l f = f_x1 * d^l x_1 + R  (linear in the top-order differentials)
    r_part = d_f - fx1 * top
    q = -r_part
    # substitute the lower rows for every d^j x_1, j < l, tracking cofactors
    kappas = {row.order: row.kappa for row in rows}
    p_by = {row.order: row.p for row in rows}
    t_by = {row.order: _membership_defect(row, fx1) for row in rows}
    cof_by = {row.order: row.cofactor_map() for row in rows}

    budgets = []
    for mono, _ in q.terms.items():
        budgets.append(sum(kappas[v.order] * e for v, e in mono
                           if _is_dx1(v, order - 1)))
    m_power = max(budgets, default=0)

    p_total = DiffPoly.zero()
    cofactors: Dict[int, DiffPoly] = {}

    for mono, coeff in q.terms.items():
        lowers = [(v, e) for v, e in mono if _is_dx1(v, order - 1)]
        rest = [(v, e) for v, e in mono if not _is_dx1(v, order - 1)]
        used = sum(kappas[v.order] * e for v, e in lowers)
        base = DiffPoly.monomial(rest, coeff) * fx1 ** (m_power - used)
        main, cross = _expand_substitution(lowers, p_by, t_by)
        p_total = p_total + base * main
        for j_order, factor in cross:
            for j, c in cof_by[j_order].items():
                add = base * factor * c
                cofactors[j] = cofactors.get(j, DiffPoly.zero()) + add

    # (f_x1)^(M+1) d^l x_1 = (f_x1)^M d^l f + (f_x1)^M q
    cofactors[order] = cofactors.get(order, DiffPoly.zero()) + fx1 ** m_power
    cofactors = {j: c for j, c in cofactors.items() if not c.is_zero()}
    return EliminationRow(order=order, kappa=m_power + 1, p=p_total,
                          cofactors=tuple(sorted(cofactors.items())))


def _membership_defect(row: EliminationRow, fx1: DiffPoly) -> DiffPoly:
    """T_l = (f_x1)^kappa_l d^l x_1 - P_l as an explicit polynomial."""
    return fx1 ** row.kappa * DiffPoly.var(x_var(1, row.order)) - row.p


def _expand_substitution(lowers, p_by, t_by):
    """Expand prod_j (P_j + T_j)^(e_j).

    Returns (main, cross): main is the product of P_j^(e_j); cross is a list
    of (j, factor) with factor * T_j summing to the remainder, each cross
    term assigned to the order j of one factored-out defect T_j.
    """
    main = DiffPoly.const(1)
    cross = []
    for v, e in lowers:
        j = v.order
        p_j, t_j = p_by[j], t_by[j]
        # (P + T)^e = P^e + T * sum_{i<e} P^i (P+T)^(e-1-i)
        full = p_j + t_j
        remainder = DiffPoly.zero()
        for i in range(e):
            remainder = remainder + p_j ** i * full ** (e - 1 - i)
        # accumulated cross terms multiply everything expanded so far
        if not remainder.is_zero():
            cross = [(jj, factor * (full ** e)) for jj, factor in cross]
            cross.append((j, main * remainder))
        else:
            cross = [(jj, factor * (full ** e)) for jj, factor in cross]
        main = main * p_j ** e
    return main, cross


def verify_row_membership(table: EliminationTable, order: int) -> bool:
    """Recheck (f_x1)^kappa d^l x_1 - P_l = sum C_j d^j f exactly."""
    row = table.row(order)
    lhs = table.fx1 ** row.kappa * DiffPoly.var(x_var(1, order)) - row.p
    rhs = DiffPoly.zero()
    for j, c in row.cofactors:
        rhs = rhs + c * iterated_derivative(table.f, j)
    return lhs == rhs


def contains_dx1(p: DiffPoly) -> bool:
    return any(_is_dx1(v) for v in p.variables())
