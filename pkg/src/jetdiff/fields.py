"""Slanted vector fields on the vertical jet space of the universal hypersurface.

A ParamVectorField is a formal vector field with rational-function
coefficients in the d/dalpha_nu, d/dz_j and d/dxi^(l)_j directions.  The
constructions here are the tangent field pairs, the lifted linear fields, the
Theta/Psi tree induction, the plain Delta-product fields, and the corrected
vertical generators, together with Lie derivatives of jet differentials and
the vanishing/pole-order arithmetic of differentiating a family.

Sign conventions (fixed once here): the normalized order-k field for a target
index nu satisfies

    Theta_k[nu](d^j f) = 0          for j < k,
    Theta_k[nu](d^k f) = z^nu,
    Theta_k[nu](d^j f) = -Psi_{k,j} z^nu   for j > k,

and each correction stage of a vertical generator cancels the current
residual against these fields.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Sequence, Tuple

from .jetfiber import UniversalPoly, phi_at, phi_family, z_monomial
from .poly import (
    ALPHA,
    BASE,
    DIFF,
    DiffPoly,
    LOGDIFF,
    MultiIndex,
    Variable,
    alpha_var,
    format_poly,
    iterated_derivative,
    multi_indices,
    total_derivative,
    unit_index,
    x_var,
    xi_var,
    z_var,
)
from .ratfunc import RatFunc, rat_sum


class IndexMismatchError(ValueError):
    """Multi-indices fail the pairing relation nu + e_q = mu + e_p."""


class DegenerateTreeError(ValueError):
    """A binary-tree level has r = s."""


class AlphabetMismatchError(ValueError):
    """A jet differential uses variables the field does not act on."""


class OrderUnderflowError(ValueError):
    """Lie differentiation would drop the vanishing order below zero."""


# ---------------------------------------------------------------------------
# binary trees with level-wise homogeneous branches
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BinaryTreeSpec:
    """Level data (r_j, s_j), j = 1..k, of a level-wise homogeneous tree."""

    levels: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        for r, s in self.levels:
            if r == s:
                raise DegenerateTreeError(f"tree level with r = s = {r}")

    @property
    def order(self) -> int:
        return len(self.levels)

    def validate(self, n: int) -> None:
        for r, s in self.levels:
            if not (0 <= r <= n and 0 <= s <= n):
                raise ValueError(f"tree indices {r},{s} out of range 0..{n}")

    def truncated(self) -> "BinaryTreeSpec":
        return BinaryTreeSpec(self.levels[1:])

    @staticmethod
    def default(k: int) -> "BinaryTreeSpec":
        # the slanted-fields construction sets r_j = 1, s_j = 2 throughout
        return BinaryTreeSpec(((1, 2),) * k)

    @staticmethod
    def random(k: int, n: int, rng) -> "BinaryTreeSpec":
        levels = []
        for _ in range(k):
            r = rng.randint(0, n)
            s = rng.randint(0, n)
            while s == r:
                s = rng.randint(0, n)
            levels.append((r, s))
        return BinaryTreeSpec(tuple(levels))


# ---------------------------------------------------------------------------
# parametrized vector fields
# ---------------------------------------------------------------------------

@dataclass
class ParamVectorField:
    """Formal field  sum a_nu d/dalpha_nu + sum b_j d/dz_j + sum c_lj d/dxi^(l)_j."""

    alpha: Dict[MultiIndex, RatFunc] = field(default_factory=dict)
    z: Dict[int, RatFunc] = field(default_factory=dict)
    xi: Dict[Tuple[int, int], RatFunc] = field(default_factory=dict)

    def apply(self, g: DiffPoly) -> RatFunc:
        """The field applied to g as a function of (z, xi, alpha)."""
        parts: List[RatFunc] = []
        for nu, coeff in self.alpha.items():
            partial = g.partial(alpha_var(nu))
            if not partial.is_zero():
                parts.append(coeff * RatFunc(partial))
        for j, coeff in self.z.items():
            partial = g.partial(z_var(j))
            if not partial.is_zero():
                parts.append(coeff * RatFunc(partial))
        for (order, j), coeff in self.xi.items():
            partial = g.partial(xi_var(j, order))
            if not partial.is_zero():
                parts.append(coeff * RatFunc(partial))
        return rat_sum(parts)

    def plus(self, other: "ParamVectorField") -> "ParamVectorField":
        out = ParamVectorField(dict(self.alpha), dict(self.z), dict(self.xi))
        for key, coeff in other.alpha.items():
            out.alpha[key] = out.alpha[key] + coeff if key in out.alpha else coeff
        for key, coeff in other.z.items():
            out.z[key] = out.z[key] + coeff if key in out.z else coeff
        for key, coeff in other.xi.items():
            out.xi[key] = out.xi[key] + coeff if key in out.xi else coeff
        out._drop_zeros()
        return out

    def scaled(self, r: RatFunc) -> "ParamVectorField":
        return ParamVectorField(
            {k: r * v for k, v in self.alpha.items()},
            {k: r * v for k, v in self.z.items()},
            {k: r * v for k, v in self.xi.items()},
        )

    def _drop_zeros(self) -> None:
        self.alpha = {k: v for k, v in self.alpha.items() if not v.is_zero()}
        self.z = {k: v for k, v in self.z.items() if not v.is_zero()}
        self.xi = {k: v for k, v in self.xi.items() if not v.is_zero()}

    def coefficients(self):
        yield from self.alpha.values()
        yield from self.z.values()
        yield from self.xi.values()

    def clear_denominators(self) -> Tuple["ParamVectorField", DiffPoly]:
        """Multiply by the least common factored denominator.

        Returns (field with polynomial coefficients, the clearing factor).
        """
        lcm: Dict[DiffPoly, int] = {}
        for coeff in self.coefficients():
            for f, mult in coeff.factors.items():
                lcm[f] = max(lcm.get(f, 0), mult)
        factor = DiffPoly.const(1)
        for f, mult in sorted(lcm.items(), key=lambda kv: format_poly(kv[0])):
            factor = factor * (f ** mult)

        def clear(c: RatFunc) -> RatFunc:
            return RatFunc(c.clear_against(lcm))

        cleared = ParamVectorField(
            {k: clear(v) for k, v in self.alpha.items()},
            {k: clear(v) for k, v in self.z.items()},
            {k: clear(v) for k, v in self.xi.items()},
        )
        return cleared, factor

    def evaluate_z(self, point: Sequence) -> "ParamVectorField":
        """Substitute exact values for the base z-coordinates."""
        values = {z_var(j): Fraction(c) for j, c in enumerate(point)}

        def ev(c: RatFunc) -> RatFunc:
            num = c.num.substitute_values(values)
            factors = []
            for f, mult in c.factors.items():
                fv = f.substitute_values(values)
                factors.append((fv, mult))
            return RatFunc(num, factors)

        out = ParamVectorField(
            {k: ev(v) for k, v in self.alpha.items()},
            {k: ev(v) for k, v in self.z.items()},
            {k: ev(v) for k, v in self.xi.items()},
        )
        out._drop_zeros()
        return out

    def __str__(self) -> str:
        parts = []
        for nu in sorted(self.alpha):
            parts.append(f"({self.alpha[nu]}) * d/dalpha[{','.join(map(str, nu))}]")
        for j in sorted(self.z):
            parts.append(f"({self.z[j]}) * d/dz[{j}]")
        for (order, j) in sorted(self.xi):
            parts.append(f"({self.xi[(order, j)]}) * d/dxi[{order},{j}]")
        return " + ".join(parts) if parts else "0"

    __repr__ = __str__


def format_field(f: ParamVectorField) -> str:
    return str(f)


# ---------------------------------------------------------------------------
# d^k f with symbolic coefficients
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _dkf_symbolic(n: int, delta: int, k: int) -> DiffPoly:
    out = DiffPoly.zero()
    for nu in multi_indices(n + 1, delta):
        out = out + DiffPoly.var(alpha_var(nu)) * phi_at(k, nu) * z_monomial(nu)
    return out


def dkf(f: UniversalPoly, k: int) -> DiffPoly:
    """d^k f in the (z, xi, alpha) chart, alpha treated as constants."""
    if f.is_symbolic:
        return _dkf_symbolic(f.n, f.delta, k)
    out = DiffPoly.zero()
    for nu in f.indices():
        out = out + f.coefficient_poly(nu) * phi_at(k, nu) * z_monomial(nu)
    return out


# ---------------------------------------------------------------------------
# tangent field pairs (order zero in the jet directions)
# ---------------------------------------------------------------------------

def tangent_field_pair(p: int, q: int, nu: MultiIndex, mu: MultiIndex) -> ParamVectorField:
    """z_q d/dalpha_nu - z_p d/dalpha_mu, tangential when nu + e_q = mu + e_p."""
    if p == q:
        raise IndexMismatchError("need p != q")
    n = len(nu) - 1
    if nu.add(unit_index(n + 1, q)) != mu.add(unit_index(n + 1, p)):
        raise IndexMismatchError(f"nu + e_{q} != mu + e_{p}")
    return ParamVectorField(alpha={
        nu: RatFunc(DiffPoly.var(z_var(q))),
        mu: RatFunc(-DiffPoly.var(z_var(p))),
    })


# ---------------------------------------------------------------------------
# lifted linear fields
# ---------------------------------------------------------------------------

def lift_linear_field(a: Sequence[Sequence], f: UniversalPoly) -> ParamVectorField:
    """Lift sum a_jk z_j d/dz_k to a field annihilating f identically.

    The alpha-part coefficient for index nu is
        beta_nu = - sum_{j != k, nu_j >= 1} a_jk (nu_k + 1) alpha_{nu - e_j + e_k}
                  - sum_j a_jj nu_j alpha_nu.
    """
    if not f.is_symbolic:
        raise ValueError("lift_linear_field expects the symbolic universal polynomial")
    n, delta = f.n, f.delta
    mat = [[Fraction(c) for c in row] for row in a]
    if len(mat) != n + 1 or any(len(row) != n + 1 for row in mat):
        raise ValueError(f"matrix must be {(n + 1)}x{(n + 1)}")

    out = ParamVectorField()
    for k in range(n + 1):
        coeff = DiffPoly.zero()
        for j in range(n + 1):
            if mat[j][k]:
                coeff = coeff + DiffPoly.var(z_var(j)).scale(mat[j][k])
        if not coeff.is_zero():
            out.z[k] = RatFunc(coeff)

    for nu in multi_indices(n + 1, delta):
        beta = DiffPoly.zero()
        for j in range(n + 1):
            if mat[j][j] and nu[j]:
                beta = beta - DiffPoly.var(alpha_var(nu)).scale(mat[j][j] * nu[j])
            for k in range(n + 1):
                if k == j or not mat[j][k] or nu[j] < 1:
                    continue
                shifted = nu.sub(unit_index(n + 1, j)).add(unit_index(n + 1, k))
                beta = beta - DiffPoly.var(alpha_var(shifted)).scale(mat[j][k] * (nu[k] + 1))
        if not beta.is_zero():
            out.alpha[nu] = RatFunc(beta)
    return out


# ---------------------------------------------------------------------------
# Theta/Psi tree induction
# ---------------------------------------------------------------------------

def theta_psi(
    k: int, lam: MultiIndex, tree: BinaryTreeSpec, n: int, delta: int,
) -> Tuple[ParamVectorField, Dict[int, RatFunc]]:
    """The order-k field and its Psi^(j) multipliers, by the tree induction.

    Satisfies Theta(d^j f) = 0 for j < k and Theta(d^j f) = z^lam Psi^(j) for
    k <= j <= n-1; Psi^(k) = k (xi^(1)_{p0} - xi^(1)_{p1}) for the root pair.
    """
    if tree.order != k:
        raise ValueError(f"tree order {tree.order} != {k}")
    tree.validate(n)
    if lam.degree != delta - k:
        raise ValueError(f"|lam| must be delta - k = {delta - k}")
    theta, psi = _theta_psi_rec(k, tuple(lam), tree.levels, n, delta)
    return theta, dict(psi)


@lru_cache(maxsize=None)
def _theta_psi_rec(k: int, lam_t: Tuple[int, ...], levels, n: int, delta: int):
    lam = MultiIndex(lam_t)
    if k == 0:
        theta = ParamVectorField(alpha={lam: RatFunc(1)})
        psi = {j: RatFunc(phi_at(j, lam)) for j in range(0, max(n, 1))}
        return theta, psi
    r, s = levels[0]
    lam0 = lam.add(unit_index(n + 1, r))
    lam1 = lam.add(unit_index(n + 1, s))
    th0, ps0 = _theta_psi_rec(k - 1, tuple(lam0), levels[1:], n, delta)
    th1, ps1 = _theta_psi_rec(k - 1, tuple(lam1), levels[1:], n, delta)
    div0 = RatFunc(DiffPoly.var(z_var(r))) * ps0[k - 1]
    div1 = RatFunc(DiffPoly.var(z_var(s))) * ps1[k - 1]
    theta = th0.scaled(RatFunc(1) / div0).plus(
        th1.scaled(RatFunc(-1) / div1))
    psi = {j: ps0[j] / ps0[k - 1] - ps1[j] / ps1[k - 1]
           for j in ps0 if j >= k}
    return theta, psi


def psi_closed_form(k: int, tree: BinaryTreeSpec) -> RatFunc:
    """k (xi^(1)_{p0} - xi^(1)_{p1}) for the root pair of the tree."""
    if k == 0:
        return RatFunc(1)
    r, s = tree.levels[0]
    return RatFunc((DiffPoly.var(xi_var(r, 1)) - DiffPoly.var(xi_var(s, 1))).scale(k))


# ---------------------------------------------------------------------------
# plain Delta-product fields
# ---------------------------------------------------------------------------

def theta_simple(mu: MultiIndex, pairs: Sequence[Tuple[int, int]]) -> ParamVectorField:
    """z^mu [Delta_{r1,s1} ... Delta_{rk,sk} (z^-nu d/dalpha_nu)]_{nu=mu}.

    Annihilates d^j f for 0 <= j <= k-1; applied to d^k f it yields
    z^mu k! prod (xi^(1)_r - xi^(1)_s).
    """
    n = len(mu) - 1
    for r, s in pairs:
        if r == s:
            raise DegenerateTreeError("pair with r = s")
        if not (0 <= r <= n and 0 <= s <= n):
            raise ValueError(f"pair index out of range 0..{n}")
    out = ParamVectorField()
    for gamma in itertools.product((0, 1), repeat=len(pairs)):
        choices = [pairs[i][g] for i, g in enumerate(gamma)]
        target = mu
        for c in choices:
            target = target.add(unit_index(n + 1, c))
        sign = (-1) ** sum(gamma)
        den = {}
        for c in choices:
            key = DiffPoly.var(z_var(c))
            den[key] = den.get(key, 0) + 1
        coeff = RatFunc(DiffPoly.const(sign), den)
        out.alpha[target] = out.alpha[target] + coeff if target in out.alpha else coeff
    out._drop_zeros()
    return out


def theta_normalized(nu: MultiIndex, pairs: Sequence[Tuple[int, int]]) -> ParamVectorField:
    """The order-k field with Theta(d^k f) = z^nu exactly (k = len(pairs)).

    Realized as z^(nu-mu) theta_simple(mu, pairs) / (k! prod(xi_r - xi_s))
    with mu <= nu of degree |nu| - k.
    """
    k = len(pairs)
    if k == 0:
        return ParamVectorField(alpha={nu: RatFunc(1)})
    mu = sub_index(nu, k)
    base = theta_simple(mu, pairs)
    num = z_monomial(nu.sub(mu)).scale(Fraction(1, math.factorial(k)))
    den = {}
    for r, s in pairs:
        key = DiffPoly.var(xi_var(r, 1)) - DiffPoly.var(xi_var(s, 1))
        den[key] = den.get(key, 0) + 1
    return base.scaled(RatFunc(num, den))


def sub_index(nu: MultiIndex, k: int) -> MultiIndex:
    """A deterministic multi-index mu <= nu with |mu| = |nu| - k."""
    if nu.degree < k:
        raise ValueError(f"|nu| = {nu.degree} < {k}")
    comps = list(nu)
    remaining = k
    for j in range(len(comps) - 1, -1, -1):
        take = min(comps[j], remaining)
        comps[j] -= take
        remaining -= take
        if not remaining:
            break
    return MultiIndex(comps)


# ---------------------------------------------------------------------------
# vertical generators (corrected T fields)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VerticalGenerator:
    """A slanted field T + corrections annihilating d^j f for j <= n-1."""

    tee: Tuple
    tree: BinaryTreeSpec
    n: int
    delta: int
    fld: ParamVectorField
    cleared: ParamVectorField
    clearing_factor: DiffPoly

    def weight_after_clearing(self) -> int:
        return max((_xi_weight(coeff.num)
                    for coeff in self.cleared.coefficients()), default=0)

    def base_degree_after_clearing(self) -> int:
        return max((coeff.num.degree_in(lambda v: v.kind == BASE and v.family == "z")
                    for coeff in self.cleared.coefficients()), default=0)

    def pole_order_estimate(self) -> int:
        # degree inspection: z-degree plus xi-weight bounds the pole order of
        # the homogeneous coefficients along z_0 = 0
        return self.weight_after_clearing() + self.base_degree_after_clearing()


def _xi_weight(p: DiffPoly) -> int:
    best = 0
    for mono in p.terms:
        w = sum(v.order * e for v, e in mono if v.kind in (LOGDIFF, DIFF))
        best = max(best, w)
    return best


class SingularLocusError(ValueError):
    """A Psi denominator vanishes identically for the chosen tree."""


def tee_field(tee: Tuple) -> ParamVectorField:
    """The starting field T: ("z", j) for z_j d/dz_j, ("xi", l, j) for d/dxi^(l)_j."""
    if tee[0] == "z":
        _, j = tee
        return ParamVectorField(z={j: RatFunc(DiffPoly.var(z_var(j)))})
    if tee[0] == "xi":
        _, order, j = tee
        return ParamVectorField(xi={(order, j): RatFunc(1)})
    raise ValueError(f"unknown T spec {tee!r}")


def vertical_generator(
    tee: Tuple, f: UniversalPoly, tree: BinaryTreeSpec | None = None,
) -> VerticalGenerator:
    """Correct T by Theta fields so the result annihilates d^j f, j <= n-1.

    Stage k cancels the residual of the previous stages against d^k f using
    the normalized order-k fields; the corrections never disturb lower
    stages.  Everything is exact; denominators are powers of the level
    xi-differences and coordinate monomials.
    """
    if not f.is_symbolic:
        raise ValueError("vertical_generator expects the symbolic universal polynomial")
    n, delta = f.n, f.delta
    if n < 2:
        raise ValueError("need n >= 2 for distinct tree indices")
    if delta < n - 1:
        raise ValueError("need delta >= n - 1")
    if tree is None:
        tree = BinaryTreeSpec.default(n - 1)
    if tree.order != n - 1:
        raise ValueError(f"tree order must be n - 1 = {n - 1}")
    tree.validate(n)
    for r, s in tree.levels:
        if DiffPoly.var(xi_var(r, 1)) == DiffPoly.var(xi_var(s, 1)):
            raise SingularLocusError("tree pair with identical xi directions")

    v = tee_field(tee)
    for k in range(0, n):
        residual = v.apply(dkf(f, k))
        if residual.is_zero():
            continue
        for f_den in residual.factors:
            if _has_z(f_den):
                raise AssertionError("residual kept a z denominator")
        correction = ParamVectorField()
        groups = residual.num.coefficients_by(
            lambda var: var.kind == BASE and var.family == "z")
        for z_mono, rest in groups.items():
            exps = {var.coord: e for var, e in z_mono}
            nu = MultiIndex(tuple(exps.get(j, 0) for j in range(n + 1)))
            if nu.degree != delta:
                raise AssertionError("residual z-part is not of degree delta")
            coeff = RatFunc(-rest, residual.factors)
            theta = theta_normalized(nu, tree.levels[:k])
            correction = correction.plus(theta.scaled(coeff))
        v = v.plus(correction)

    cleared, factor = v.clear_denominators()
    return VerticalGenerator(tee=tuple(tee), tree=tree, n=n, delta=delta,
                             fld=v, cleared=cleared, clearing_factor=factor)


def _has_z(p: DiffPoly) -> bool:
    return any(v.kind == BASE and v.family == "z" for v in p.variables())


def annihilates(gen: VerticalGenerator, f: UniversalPoly, j: int) -> bool:
    """Exact check that the cleared generator kills d^j f."""
    return gen.cleared.apply(dkf(f, j)).is_zero()


# ---------------------------------------------------------------------------
# Lie derivatives
# ---------------------------------------------------------------------------

def lie_derivative(field_coeffs: Mapping[int, DiffPoly], omega: DiffPoly) -> DiffPoly:
    """Lie derivative of a jet differential along sum g_i d/dw_i.

    Linear, Leibniz over products, sends d^k w_i to d^k g_i, and commutes
    with the total derivative.  Coordinates are the inhomogeneous x-family.
    """
    for v in omega.variables():
        if v.family != "x" or v.kind not in (BASE, DIFF):
            raise AlphabetMismatchError(f"unsupported variable {v} in jet differential")
    for g in field_coeffs.values():
        for v in g.variables():
            if v.family != "x" or v.kind not in (BASE, DIFF):
                raise AlphabetMismatchError(f"unsupported variable {v} in field coefficient")
    top = omega.max_order()
    out = DiffPoly.zero()
    for i, g in field_coeffs.items():
        d_g = g
        for order in range(0, top + 1):
            partial = omega.partial(x_var(i, order))
            if not partial.is_zero():
                out = out + d_g * partial
            d_g = total_derivative(d_g)
    return out


# ---------------------------------------------------------------------------
# order bookkeeping under Lie differentiation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrderLedger:
    """Vanishing/pole orders at a divisor plus gradings of a jet differential."""

    vanishing_order_at_divisor: int
    pole_order_at_divisor: int
    weight: int
    base_degree: int

    def __post_init__(self):
        if self.weight < 0 or self.base_degree < 0:
            raise ValueError("gradings must be nonnegative")
        if self.pole_order_at_divisor < 0:
            raise ValueError("pole order must be nonnegative")


def order_ledger_after_lie(ledger: OrderLedger, field_pole_order: int, jet_order: int) -> OrderLedger:
    """Vanishing order p drops to p - (q + k); the weight is preserved."""
    p = ledger.vanishing_order_at_divisor
    drop = field_pole_order + jet_order
    if p < drop:
        raise OrderUnderflowError(f"order-underflow: {p} < {field_pole_order} + {jet_order}")
    return replace(ledger, vanishing_order_at_divisor=p - drop)
