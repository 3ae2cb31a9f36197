"""Exact sparse linear algebra over the rationals.

Rows are sparse dicts column-index -> Fraction.  Elimination is plain
Gaussian elimination over Fraction (every entry stays a normalized rational,
which keeps intermediate growth in check), with pivot rows chosen by minimal
fill (fewest nonzeros, ties by row order) so runs are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Sequence, Tuple

Row = Dict[int, Fraction]


@dataclass
class SparseLinearSystem:
    """A sparse homogeneous system: rows of coefficients over labeled columns.

    ``col_labels`` names the unknowns (used for certificates and reports);
    ``row_labels`` records the provenance of each constraint.
    """

    ncols: int
    col_labels: List = field(default_factory=list)
    rows: List[Row] = field(default_factory=list)
    row_labels: List = field(default_factory=list)

    def add_row(self, row: Row, label=None) -> None:
        clean = {c: Fraction(v) for c, v in row.items() if v}
        if clean:
            self.rows.append(clean)
            self.row_labels.append(label)

    @property
    def nrows(self) -> int:
        return len(self.rows)


def _eliminate(rows: List[Row], ncols: int) -> Tuple[List[Tuple[int, Row]], List[int]]:
    """Forward elimination.  Returns (pivot list [(col, row)], free columns)."""
    remaining = [dict(r) for r in rows]
    pivots: List[Tuple[int, Row]] = []
    pivot_cols = set()
    for col in range(ncols):
        best = None
        for idx, row in enumerate(remaining):
            if row.get(col):
                if best is None or len(row) < len(remaining[best]):
                    best = idx
        if best is None:
            continue
        pivot = remaining.pop(best)
        inv = 1 / pivot[col]
        pivot = {c: v * inv for c, v in pivot.items()}
        kept = []
        for row in remaining:
            coeff = row.get(col)
            if coeff:
                for c, v in pivot.items():
                    acc = row.get(c, Fraction(0)) - coeff * v
                    if acc:
                        row[c] = acc
                    else:
                        row.pop(c, None)
            if row:
                kept.append(row)
        remaining = kept
        pivots.append((col, pivot))
        pivot_cols.add(col)
    free = [c for c in range(ncols) if c not in pivot_cols]
    return pivots, free


def solve_nullspace(system: SparseLinearSystem) -> List[List[Fraction]]:
    """Exact nullspace basis, deterministic given the column order.

    Each basis vector sets one free column to 1 and back-substitutes; vectors
    are scaled to primitive integer form with positive leading entry.
    """
    pivots, free = _eliminate(system.rows, system.ncols)
    pivots_desc = sorted(pivots, key=lambda pr: -pr[0])
    basis = []
    for f_col in free:
        vec = [Fraction(0)] * system.ncols
        vec[f_col] = Fraction(1)
        for col, row in pivots_desc:
            acc = Fraction(0)
            for c, v in row.items():
                if c != col and vec[c]:
                    acc += v * vec[c]
            if acc:
                vec[col] = -acc
        basis.append(_primitive(vec))
    return basis


def solve_particular(system: SparseLinearSystem, rhs: Sequence[Fraction]) -> List[Fraction] | None:
    """One exact solution of rows * x = rhs, or None if inconsistent.

    Free variables are set to zero; deterministic.
    """
    ncols = system.ncols
    augmented = []
    for row, b in zip(system.rows, rhs, strict=True):
        r = dict(row)
        if b:
            r[ncols] = Fraction(b)
        augmented.append(r)
    pivots, _ = _eliminate(augmented, ncols)
    # any surviving row with only the augmented column is inconsistent; such
    # rows would have been picked as pivots on column ncols if we included it,
    # so instead check by substitution afterwards
    vec = [Fraction(0)] * ncols
    for col, row in sorted(pivots, key=lambda pr: -pr[0]):
        acc = row.get(ncols, Fraction(0))
        for c, v in row.items():
            if c not in (col, ncols) and vec[c]:
                acc -= v * vec[c]
        vec[col] = acc
    for row, b in zip(system.rows, rhs, strict=True):
        total = sum((v * vec[c] for c, v in row.items()), Fraction(0))
        if total != Fraction(b):
            return None
    return vec


def _primitive(vec: List[Fraction]) -> List[Fraction]:
    den = 1
    for v in vec:
        if v:
            den = den * v.denominator // gcd(den, v.denominator)
    ints = [int(v * den) for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    for v in ints:
        if v:
            if v < 0:
                ints = [-w for w in ints]
            break
    return [Fraction(v) for v in ints]


def rank(system: SparseLinearSystem) -> int:
    pivots, _ = _eliminate(system.rows, system.ncols)
    return len(pivots)
