"""Log-pole jet differentials: Wronskians, hyperplane forms, direct images.

A log-pole jet differential carries symbols L{i}_{l} standing for d^l log F_i
with a registry mapping each index i to a concrete polynomial F_i, plus an
explicit plain-denominator power per registry entry.  The log-pole divisor
bound of a monomial counts nu * l per factor (L{i}_{l})^nu plus the plain
power; the accounting stays combinatorial while the symbols can be expanded
exactly over the fraction field for identity checks.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

from .poly import (
    BASE,
    DIFF,
    DiffPoly,
    LOGSYM,
    MultiIndex,
    log_sym,
    total_derivative,
    x_var,
)
from .ratfunc import RatFunc


class DegenerateInputError(ValueError):
    """A hyperplane form is constant."""


class DependentSubsetError(ValueError):
    """The chosen forms are linearly dependent."""


class ResidualPoleError(ValueError):
    """The normalizing power leaves a pole in the last coordinate."""


class VanishingImageError(ValueError):
    """The direct image is identically zero."""


@dataclass(frozen=True)
class LogPoleJetDiff:
    """body over x-variables and log symbols; registry F_i with plain powers."""

    body: DiffPoly
    registry: Tuple[DiffPoly, ...]
    den_powers: Tuple[int, ...]
    n: int
    k: int

    def __post_init__(self):
        if len(self.registry) != len(self.den_powers):
            raise ValueError("registry and denominator powers disagree")


# ---------------------------------------------------------------------------
# Wronskians
# ---------------------------------------------------------------------------

def wronskian(entries: Sequence[DiffPoly]) -> DiffPoly:
    """det(d^(lambda-1) eta_j) expanded as a signed permutation sum."""
    size = len(entries)
    if size < 1:
        raise ValueError("need at least one entry")
    rows = [list(entries)]
    for _ in range(size - 1):
        rows.append([total_derivative(e) for e in rows[-1]])
    out = DiffPoly.zero()
    for perm in itertools.permutations(range(size)):
        sign = _perm_sign(perm)
        term = DiffPoly.const(sign)
        for level, j in enumerate(perm):
            term = term * rows[level][j]
        out = out + term
    return out


def wronskian_rat(entries: Sequence[RatFunc]) -> RatFunc:
    size = len(entries)
    rows = [list(entries)]
    for _ in range(size - 1):
        rows.append([rat_total_derivative(e) for e in rows[-1]])
    out = RatFunc(0)
    for perm in itertools.permutations(range(size)):
        sign = _perm_sign(perm)
        term = RatFunc(DiffPoly.const(sign))
        for level, j in enumerate(perm):
            term = term * rows[level][j]
        out = out + term
    return out


def _perm_sign(perm) -> int:
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def rat_total_derivative(r: RatFunc) -> RatFunc:
    """Quotient rule on a rational function of jet variables."""
    if r.is_polynomial():
        return RatFunc(total_derivative(r.num))
    den = r.den
    num = total_derivative(r.num) * den - r.num * total_derivative(den)
    return RatFunc(num, {den: 2})


# ---------------------------------------------------------------------------
# the hyperplane (Cartan) form
# ---------------------------------------------------------------------------

def _linear_parts(forms: Sequence[DiffPoly], n: int) -> List[List[Fraction]]:
    rows = []
    for f in forms:
        row = [Fraction(0)] * n
        for mono, coeff in f.terms.items():
            if not mono:
                continue
            if len(mono) != 1 or mono[0][1] != 1 or mono[0][0].kind != BASE:
                raise DegenerateInputError(f"not a degree-one form: {f}")
            row[mono[0][0].coord - 1] = coeff
        rows.append(row)
    return rows


def _det(matrix: List[List[Fraction]]) -> Fraction:
    size = len(matrix)
    m = [row[:] for row in matrix]
    det = Fraction(1)
    for col in range(size):
        piv = next((r for r in range(col, size) if m[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, size):
            factor = m[r][col] * inv
            if factor:
                for c in range(col, size):
                    m[r][c] -= factor * m[col][c]
    return det


def cartan_form(forms: Sequence[DiffPoly], n: int) -> LogPoleJetDiff:
    """Wron(dx_1, ..., dx_n) / (F_1 ... F_q) for degree-one forms F_j."""
    q = len(forms)
    if q < n:
        raise ValueError(f"need at least n = {n} forms")
    rows = _linear_parts(forms, n)
    for f, row in zip(forms, rows):
        if not any(row):
            raise DegenerateInputError(f"degenerate-input: constant form {f}")
    body = wronskian([total_derivative(DiffPoly.var(x_var(j)))
                      for j in range(1, n + 1)])
    return LogPoleJetDiff(body=body, registry=tuple(forms),
                          den_powers=(1,) * q, n=n, k=n)


def verify_cartan_rewrite(forms: Sequence[DiffPoly], subset: Sequence[int], n: int) -> bool:
    """The local rewrite of the hyperplane form, as an exact identity:

        Wron(dF_{v1}, ..., dF_{vn}) / (F_1 ... F_q)
            = Wron(dlog F_{v1}, ..., dlog F_{vn}) / (prod of the other F's)

    and Wron(dF's) equals det(coefficients) * Wron(dx's).
    """
    q = len(forms)
    subset = list(subset)
    if len(subset) != n:
        raise ValueError(f"subset must pick n = {n} forms")
    rows = _linear_parts([forms[i] for i in subset], n)
    det = _det(rows)
    if det == 0:
        raise DependentSubsetError("dependent-subset: chosen forms are dependent")

    w_df = wronskian([total_derivative(forms[i]) for i in subset])
    w_dx = wronskian([total_derivative(DiffPoly.var(x_var(j)))
                      for j in range(1, n + 1)])
    if w_df != w_dx.scale(det):
        return False

    dlogs = [RatFunc(total_derivative(forms[i]), {forms[i]: 1}) for i in subset]
    w_dlog = wronskian_rat(dlogs)
    all_den = RatFunc(1, {forms[i]: 1 for i in range(q)})
    rest = [i for i in range(q) if i not in subset]
    rest_den = RatFunc(1, {forms[i]: 1 for i in rest}) if rest else RatFunc(1)
    lhs = RatFunc(w_df) * all_den
    rhs = w_dlog * rest_den
    return lhs == rhs


# ---------------------------------------------------------------------------
# d^j x in terms of x and d^i log x
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def log_jet_polynomial(j: int, registry_index: int = 0) -> DiffPoly:
    """B_j with d^j x = x * B_j(d log x, ..., d^j log x).

    Recursion B_0 = 1, B_{j+1} = L1 * B_j + d(B_j), where the log symbols
    L{i}_{l} differentiate to L{i}_{l+1}.
    """
    if j == 0:
        return DiffPoly.const(1)
    prev = log_jet_polynomial(j - 1, registry_index)
    return DiffPoly.var(log_sym(registry_index, 1)) * prev + total_derivative(prev)


def find_normalizing_power(qhat: DiffPoly, coord: int) -> int:
    """The minimal x_coord-exponent after rewriting, i.e. the integer whose
    division leaves at least one term free of x_coord."""
    best = None
    for mono in qhat.terms:
        # each base factor contributes its exponent; each d^l x factor turns
        # into x * B_l, contributing its exponent as well
        power = sum(e for v, e in mono if v.coord == coord and v.family == "x")
        best = power if best is None else min(best, power)
    if best is None:
        raise VanishingImageError("vanishing-image: zero input")
    return best


def direct_image_logpole(f: DiffPoly, qhat: DiffPoly, ell: int, n: int) -> LogPoleJetDiff:
    """Push Qhat / x_{n+1}^ell down the cyclic cover, replacing logs of
    x_{n+1} by logs of f and setting x_{n+1} = 0.

    Every d^j x_{n+1} is first rewritten as x_{n+1} B_j(d log x_{n+1}, ...);
    terms keeping a positive power of x_{n+1} die, a negative power is a
    residual pole (error).
    """
    coord = n + 1
    k = qhat.max_order()
    out = DiffPoly.zero()
    for mono, coeff in qhat.terms.items():
        piece = DiffPoly.const(coeff)
        power = -ell
        for v, e in mono:
            if v.family == "x" and v.coord == coord:
                if v.kind == BASE:
                    power += e
                else:
                    power += e
                    piece = piece * log_jet_polynomial(v.order) ** e
            else:
                piece = piece * DiffPoly.var(v, e)
        if power < 0:
            raise ResidualPoleError(
                f"residual-pole: x_{coord}^{power} after dividing by x_{coord}^{ell}")
        if power > 0:
            continue   # dies at x_{n+1} = 0
        out = out + piece
    if out.is_zero():
        raise VanishingImageError("vanishing-image: direct image is zero")
    return LogPoleJetDiff(body=out, registry=(f,), den_powers=(0,), n=n, k=max(k, 1))


def relabel_coordinates(p: DiffPoly, perm: Dict[int, int]) -> DiffPoly:
    """Permute x-coordinates according to perm (old -> new)."""
    mapping = {}
    for v in p.variables():
        if v.family == "x" and v.coord in perm:
            mapping[v] = DiffPoly.var(x_var(perm[v.coord], v.order))
    return p.substitute(mapping)


# ---------------------------------------------------------------------------
# divisor accounting and expansion
# ---------------------------------------------------------------------------

def logpole_divisor_bound(omega: LogPoleJetDiff) -> Dict[int, int]:
    """Per registry entry: plain power plus max over monomials of sum nu*l."""
    out = {}
    for i in range(len(omega.registry)):
        best = 0
        for mono in omega.body.terms:
            contribution = sum(v.order * e for v, e in mono
                               if v.kind == LOGSYM and v.coord == i)
            best = max(best, contribution)
        out[i] = best + omega.den_powers[i]
    return out


def logpole_weight(omega: LogPoleJetDiff) -> int:
    """Max weight over monomials (log symbols of order l weigh l)."""
    best = 0
    for mono in omega.body.terms:
        best = max(best, sum(v.weight * e for v, e in mono))
    return best


def expand_log_symbols(omega: LogPoleJetDiff) -> RatFunc:
    """Replace each L{i}_{l} by the expansion of d^l log F_i, exactly.

    The result is a rational function of the x-variables and differentials,
    including 1/F_i^den_power plain factors.
    """
    substitutions: Dict = {}
    for mono in omega.body.terms:
        for v, _ in mono:
            if v.kind == LOGSYM and v not in substitutions:
                substitutions[v] = None
    out = RatFunc(0)
    dlog_cache: Dict[Tuple[int, int], RatFunc] = {}

    def dlog(i: int, order: int) -> RatFunc:
        key = (i, order)
        if key not in dlog_cache:
            if order == 1:
                fi = omega.registry[i]
                dlog_cache[key] = RatFunc(total_derivative(fi), {fi: 1})
            else:
                dlog_cache[key] = rat_total_derivative(dlog(i, order - 1))
        return dlog_cache[key]

    plain = RatFunc(1, {f: p for f, p in zip(omega.registry, omega.den_powers) if p})
    for mono, coeff in omega.body.terms.items():
        piece = RatFunc(DiffPoly.const(coeff))
        for v, e in mono:
            if v.kind == LOGSYM:
                piece = piece * _rat_pow(dlog(v.coord, v.order), e)
            else:
                piece = piece * RatFunc(DiffPoly.var(v, e))
        out = out + piece
    return out * plain


def _rat_pow(r: RatFunc, e: int) -> RatFunc:
    out = RatFunc(1)
    for _ in range(e):
        out = out * r
    return out
