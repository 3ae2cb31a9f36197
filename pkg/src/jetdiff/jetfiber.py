"""The universal hypersurface and the iterated-derivative polynomial families.

The universal hypersurface is f = sum over |nu| = delta of alpha_nu z^nu.
Working in the (z, xi) chart where d z_j = z_j xi^(1)_j, the k-th total
derivative is d^k f = sum alpha_nu Phi_nu^(k)(xi) z^nu, with the Phi family
built by one recursion:

    Phi^(0) = 1
    Phi^(k+1) = (sum_l nu_l xi^(1)_l) Phi^(k)
                + sum_l sum_{i<=k} xi^(i+1)_l dPhi^(k)/dxi^(i)_l

Phi families are stored with symbolic nu components, so the finite-difference
calculus Delta_{r,s} F(nu) = F(nu + e_r) - F(nu + e_s) is literally polynomial
algebra in the nu variables and the degree-drop facts are directly testable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from random import Random
from typing import Callable, Dict, Iterator, Mapping, Tuple

from .poly import (
    DiffPoly,
    MultiIndex,
    NU,
    alpha_var,
    iterated_derivative,
    is_weight_homogeneous,
    multi_indices,
    nu_var,
    unit_index,
    xi_var,
    z_var,
)

DEFAULT_ORDER_CAP = 5


# ---------------------------------------------------------------------------
# the universal hypersurface
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UniversalPoly:
    """f = sum alpha_nu z^nu over |nu| = delta, concrete or symbolic.

    Concrete mode stores exact rational coefficients (at least one nonzero);
    symbolic mode leaves every alpha_nu as a first-class variable.
    """

    n: int
    delta: int
    coefficients: Tuple[Tuple[MultiIndex, Fraction], ...] | None

    def __post_init__(self):
        if self.coefficients is not None:
            if not self.coefficients:
                raise ValueError("concrete universal polynomial must be nonzero")
            for nu, _ in self.coefficients:
                if nu.degree != self.delta or len(nu) != self.n + 1:
                    raise ValueError(f"bad multi-index {nu} for delta={self.delta}")

    @staticmethod
    def concrete(n: int, delta: int, coeffs: Mapping[MultiIndex, Fraction]) -> "UniversalPoly":
        items = tuple(sorted(((MultiIndex(k), Fraction(v)) for k, v in coeffs.items() if v),
                             key=lambda kv: tuple(kv[0])))
        return UniversalPoly(n, delta, items)

    @staticmethod
    def symbolic(n: int, delta: int) -> "UniversalPoly":
        return UniversalPoly(n, delta, None)

    @staticmethod
    def random(n: int, delta: int, rng: Random, max_terms: int = 5) -> "UniversalPoly":
        all_nu = list(multi_indices(n + 1, delta))
        count = rng.randint(1, min(max_terms, len(all_nu)))
        chosen = rng.sample(all_nu, count)
        coeffs = {}
        for nu in chosen:
            c = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
            if not c:
                c = Fraction(1)
            coeffs[nu] = c
        return UniversalPoly.concrete(n, delta, coeffs)

    @property
    def is_symbolic(self) -> bool:
        return self.coefficients is None

    def indices(self) -> Iterator[MultiIndex]:
        if self.coefficients is None:
            yield from multi_indices(self.n + 1, self.delta)
        else:
            for nu, _ in self.coefficients:
                yield nu

    def coefficient_poly(self, nu: MultiIndex) -> DiffPoly:
        """alpha_nu as a DiffPoly: a variable (symbolic) or a constant."""
        if self.coefficients is None:
            return DiffPoly.var(alpha_var(nu))
        for key, c in self.coefficients:
            if key == nu:
                return DiffPoly.const(c)
        return DiffPoly.zero()

    def poly(self) -> DiffPoly:
        out = DiffPoly.zero()
        for nu in self.indices():
            out = out + self.coefficient_poly(nu) * z_monomial(nu)
        return out


def z_monomial(nu: MultiIndex) -> DiffPoly:
    return DiffPoly.monomial([(z_var(j), e) for j, e in enumerate(nu)])


# ---------------------------------------------------------------------------
# Phi families
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def phi_family(k: int, n: int) -> DiffPoly:
    """Phi^(k) with symbolic nu_0..nu_n, a polynomial in nu and xi variables."""
    if k < 0:
        raise ValueError("jet order must be >= 0")
    if k == 0:
        return DiffPoly.const(1)
    prev = phi_family(k - 1, n)
    euler = DiffPoly.zero()
    for l in range(n + 1):
        euler = euler + DiffPoly.monomial([(nu_var(l), 1), (xi_var(l, 1), 1)])
    out = euler * prev
    for l in range(n + 1):
        for i in range(1, k):
            part = prev.partial(xi_var(l, i))
            if not part.is_zero():
                out = out + DiffPoly.var(xi_var(l, i + 1)) * part
    return out


def phi_at(k: int, nu: MultiIndex) -> DiffPoly:
    """Phi^(k)_nu for a concrete multi-index: polynomial in xi only."""
    n = len(nu) - 1
    values = {nu_var(j): Fraction(nu[j]) for j in range(n + 1)}
    return phi_family(k, n).substitute_values(values)


def nu_degree(p: DiffPoly) -> int:
    """Total degree in the symbolic nu variables."""
    best = 0
    for mono in p.terms:
        best = max(best, sum(e for v, e in mono if v.kind == NU))
    return best


def verify_dkf(f: UniversalPoly, k: int, cap: int = DEFAULT_ORDER_CAP) -> bool:
    """Check d^k f = sum alpha_nu Phi^(k)_nu z^nu exactly (concrete f)."""
    if f.is_symbolic:
        raise ValueError("verify_dkf needs a concrete universal polynomial")
    if k > cap:
        raise ValueError(f"jet order {k} exceeds cap {cap}")
    lhs = iterated_derivative(f.poly(), k, z_rule="log")
    rhs = DiffPoly.zero()
    for nu in f.indices():
        rhs = rhs + f.coefficient_poly(nu) * phi_at(k, nu) * z_monomial(nu)
    return lhs == rhs


# ---------------------------------------------------------------------------
# Delta finite-difference calculus
# ---------------------------------------------------------------------------

class IndexRangeError(ValueError):
    """A Delta index falls outside 0..n or r = s."""


def nu_shift(p: DiffPoly, r: int) -> DiffPoly:
    """Substitute nu_r -> nu_r + 1."""
    v = nu_var(r)
    if v not in p.variables():
        return p
    return p.substitute({v: DiffPoly.var(v) + DiffPoly.const(1)})


def delta_shift(p: DiffPoly, r: int, s: int) -> DiffPoly:
    """Delta_{r,s} on a nu-symbolic polynomial: p(nu+e_r) - p(nu+e_s)."""
    if r == s:
        raise IndexRangeError("Delta indices must differ")
    return nu_shift(p, r) - nu_shift(p, s)


def delta_apply(
    family: Callable[[MultiIndex], DiffPoly], r: int, s: int, n: int,
) -> Callable[[MultiIndex], DiffPoly]:
    """Pointwise finite difference of a concrete nu-indexed family."""
    if r == s:
        raise IndexRangeError("Delta indices must differ")
    if not (0 <= r <= n and 0 <= s <= n):
        raise IndexRangeError(f"indices {r},{s} out of range 0..{n}")

    def shifted(nu: MultiIndex) -> DiffPoly:
        return family(nu.add(unit_index(n + 1, r))) - family(nu.add(unit_index(n + 1, s)))

    return shifted


def delta_product_phi(k: int, pairs, n: int | None = None) -> DiffPoly:
    """Delta_{r_1,s_1} ... Delta_{r_k,s_k} Phi^(k), nu-independent.

    Equals k! * prod (xi^(1)_{r_l} - xi^(1)_{s_l}); one more Delta kills it.
    """
    pairs = list(pairs)
    if len(pairs) != k:
        raise ValueError(f"need exactly {k} index pairs")
    if n is None:
        n = max((max(r, s) for r, s in pairs), default=0)
    p = phi_family(k, n)
    for r, s in pairs:
        if not (0 <= r <= n and 0 <= s <= n):
            raise IndexRangeError(f"indices {r},{s} out of range 0..{n}")
        p = delta_shift(p, r, s)
    if nu_degree(p) != 0:
        raise AssertionError("Delta product failed to remove nu dependence")
    return p


def xi_difference_product(pairs) -> DiffPoly:
    """prod over pairs of (xi^(1)_r - xi^(1)_s)."""
    out = DiffPoly.const(1)
    for r, s in pairs:
        out = out * (DiffPoly.var(xi_var(r, 1)) - DiffPoly.var(xi_var(s, 1)))
    return out


def factorial_xi_product(k: int, pairs) -> DiffPoly:
    return xi_difference_product(pairs).scale(math.factorial(k))
