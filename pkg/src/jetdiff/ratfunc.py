"""Rational functions of jet variables with factored denominators.

A RatFunc is a DiffPoly numerator over a product of DiffPoly denominator
factors with multiplicities.  Factors are kept unreduced (no polynomial gcd);
the only simplifications are exact and syntactic: constant factors fold into
the numerator, monomial factors cancel against the numerator's monomial
content, and sums over equal denominators add numerators directly.  Equality
is decided by cross-multiplication, which is valid because DiffPoly is an
integral domain.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from typing import Dict, Iterable, Mapping, Tuple

from .poly import DiffPoly, Monomial, format_poly


class RatFunc:
    """num / prod(factor^mult), exact."""

    __slots__ = ("num", "factors", "_den")

    def __init__(self, num, factors: Mapping[DiffPoly, int] | Iterable[Tuple[DiffPoly, int]] = ()):
        if not isinstance(num, DiffPoly):
            num = DiffPoly.const(num)
        fdict: Dict[DiffPoly, int] = {}
        items = factors.items() if isinstance(factors, Mapping) else factors
        for f, mult in items:
            if mult == 0:
                continue
            if mult < 0:
                raise ValueError("denominator multiplicities must be positive")
            if f.is_zero():
                raise ZeroDivisionError("zero denominator factor")
            fdict[f] = fdict.get(f, 0) + mult
        self.num, self.factors = _normalize(num, fdict)
        self._den = None

    # -- structure ----------------------------------------------------------

    @property
    def den(self) -> DiffPoly:
        if self._den is None:
            den = DiffPoly.const(1)
            for f, mult in self._sorted_factors():
                den = den * (f ** mult)
            self._den = den
        return self._den

    def _sorted_factors(self):
        return sorted(self.factors.items(), key=lambda kv: format_poly(kv[0]))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return not self.factors

    def as_poly(self) -> DiffPoly:
        if self.factors:
            raise ValueError(f"not a polynomial: {self}")
        return self.num

    # -- arithmetic ----------------------------------------------------------

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.factors)

    def __add__(self, other) -> "RatFunc":
        other = _coerce(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.factors == other.factors:
            return RatFunc(self.num + other.num, self.factors)
        lcm = _factor_lcm(self.factors, other.factors)
        n1 = self.num * _factor_quotient(lcm, self.factors)
        n2 = other.num * _factor_quotient(lcm, other.factors)
        return RatFunc(n1 + n2, lcm)

    __radd__ = __add__

    def __sub__(self, other) -> "RatFunc":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "RatFunc":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "RatFunc":
        other = _coerce(other)
        merged = dict(self.factors)
        for f, mult in other.factors.items():
            merged[f] = merged.get(f, 0) + mult
        return RatFunc(self.num * other.num, merged)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFunc":
        other = _coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero RatFunc")
        merged = dict(self.factors)
        merged[other.num] = merged.get(other.num, 0) + 1
        return RatFunc(self.num * other.den, merged)

    def clear_against(self, lcm: Mapping[DiffPoly, int]) -> DiffPoly:
        """num times the factors of lcm missing from this denominator.

        Requires this denominator to divide lcm factor-wise; the result is
        the polynomial (prod lcm) * self.
        """
        for f, mult in self.factors.items():
            if lcm.get(f, 0) < mult:
                raise ValueError("denominator does not divide the clearing factor")
        return self.num * _factor_quotient(dict(lcm), self.factors)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, DiffPoly)):
            other = _coerce(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    __hash__ = None

    def __str__(self) -> str:
        if not self.factors:
            return format_poly(self.num)
        dens = "*".join(
            f"({format_poly(f)})" + (f"^{m}" if m > 1 else "")
            for f, m in self._sorted_factors())
        return f"({format_poly(self.num)}) / {dens}"

    __repr__ = __str__


def _coerce(value) -> RatFunc:
    if isinstance(value, RatFunc):
        return value
    return RatFunc(value)


def _normalize(num: DiffPoly, factors: Dict[DiffPoly, int]):
    if num.is_zero():
        return num, {}
    out: Dict[DiffPoly, int] = {}
    for f, mult in factors.items():
        if len(f.terms) == 1:
            mono, coeff = next(iter(f.terms.items()))
            num = num.scale(Fraction(1) / coeff ** mult)
            if mono:
                num, residual = _cancel_monomial(num, mono, mult)
                if residual:
                    bare = DiffPoly.monomial(sorted(residual.items(),
                                                    key=lambda p: p[0].sort_key()))
                    out[bare] = out.get(bare, 0) + 1
        else:
            out[f] = out.get(f, 0) + mult
    return num, out


def _cancel_monomial(num: DiffPoly, mono: Monomial, mult: int):
    """Cancel mono^mult against the numerator's monomial content.

    Returns (reduced numerator, residual exponent dict of the uncancelled
    part of the monomial).
    """
    need = {v: e * mult for v, e in mono}
    content = dict(need)
    for m in num.terms:
        exps = dict(m)
        for v in list(content):
            content[v] = min(content[v], exps.get(v, 0))
            if content[v] == 0:
                del content[v]
        if not content:
            break
    if content:
        new_terms = {}
        for m, c in num.terms.items():
            exps = dict(m)
            for v, e in content.items():
                exps[v] -= e
            key = tuple(sorted(((v, e) for v, e in exps.items() if e),
                               key=lambda p: p[0].sort_key()))
            new_terms[key] = c
        num = DiffPoly(new_terms)
    residual = {v: need[v] - content.get(v, 0) for v in need}
    return num, {v: e for v, e in residual.items() if e}


def _factor_lcm(a: Dict[DiffPoly, int], b: Dict[DiffPoly, int]) -> Dict[DiffPoly, int]:
    out = dict(a)
    for f, mult in b.items():
        out[f] = max(out.get(f, 0), mult)
    return out


def _factor_quotient(lcm: Dict[DiffPoly, int], den: Dict[DiffPoly, int]) -> DiffPoly:
    q = DiffPoly.const(1)
    for f, mult in lcm.items():
        extra = mult - den.get(f, 0)
        if extra:
            q = q * (f ** extra)
    return q


def rat_sum(items: Iterable[RatFunc]) -> RatFunc:
    """Sum of RatFuncs, grouping equal denominators first."""
    groups: Dict[Tuple, RatFunc] = {}
    for r in items:
        if r.is_zero():
            continue
        key = tuple(sorted((format_poly(f), m) for f, m in r.factors.items()))
        if key in groups:
            prev = groups[key]
            groups[key] = RatFunc(prev.num + r.num, prev.factors)
        else:
            groups[key] = r
    return reduce(lambda a, b: a + b,
                  (groups[k] for k in sorted(groups)), RatFunc(0))
