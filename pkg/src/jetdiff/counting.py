"""Dimension counts and the existence inequality for the jet-differential ansatz.

All values are exact integers or rationals.  The section-dimension formula on
a complete-intersection surface piece comes with a brute-force oracle that
computes the same dimension as a corank of an explicit multiplication matrix,
certified exactly by a mod-p rank sandwiched against the Koszul-kernel bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Iterator, List, Sequence, Tuple

import numpy as np

_PRIME = 2_147_483_629   # < 2^31, so products fit in int64


class RangeViolationError(ValueError):
    """Parameters outside the validity range of a counting formula."""


def binomial(a: int, b: int) -> int:
    if b < 0 or a < b:
        return 0
    return math.comb(a, b)


# ---------------------------------------------------------------------------
# sections on S = {f = 0, g = 0}
# ---------------------------------------------------------------------------

def dim_sections_on_S(n: int, delta: int, s: int, q: int) -> Tuple[int, Fraction]:
    """dim of degree-q sections on a degree-(delta, s) complete intersection.

    Returns (the double binomial sum, the closed upper bound
    s * delta * (n+q-2)^(n-2) / (n-2)!).  Requires q >= delta + s + n and
    n >= 3 (the derivation uses vanishing of H^1 on the hypersurface, which
    needs n >= 3).
    """
    if n < 3:
        raise RangeViolationError("range-violation: n >= 3 required")
    if q < delta + s + n:
        raise RangeViolationError(f"range-violation: q >= {delta + s + n} required")
    value = sum(binomial(n + q - j - k, n - 2)
                for j in range(1, delta + 1) for k in range(1, s + 1))
    upper = Fraction(s * delta * (n + q - 2) ** (n - 2), math.factorial(n - 2))
    return value, upper


def _degree_monomials(nvars: int, degree: int) -> List[Tuple[int, ...]]:
    out: List[Tuple[int, ...]] = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for first in range(remaining, -1, -1):
            rec(prefix + (first,), remaining - first, slots - 1)

    rec((), degree, nvars)
    return out


def _random_form(nvars: int, degree: int, rng: Random) -> dict:
    coeffs = {}
    for mono in _degree_monomials(nvars, degree):
        c = rng.randint(-5, 5)
        if c:
            coeffs[mono] = c
    if not coeffs:
        coeffs[_degree_monomials(nvars, degree)[0]] = 1
    return coeffs


def _rank_mod_p(matrix: np.ndarray, p: int = _PRIME) -> int:
    m = matrix % p
    rows, cols = m.shape
    rank = 0
    for col in range(cols):
        piv = None
        for r in range(rank, rows):
            if m[r, col]:
                piv = r
                break
        if piv is None:
            continue
        m[[rank, piv]] = m[[piv, rank]]
        inv = pow(int(m[rank, col]), p - 2, p)
        m[rank] = (m[rank] * inv) % p
        mask = m[rank + 1:, col] != 0
        if mask.any():
            m[rank + 1:][mask] = (m[rank + 1:][mask]
                                  - np.outer(m[rank + 1:, col][mask], m[rank])) % p
        rank += 1
        if rank == rows:
            break
    return rank


def brute_force_dim_sections(n: int, delta: int, s: int, q: int,
                             rng: Random, attempts: int = 8) -> int:
    """dim Gamma(S, O(q)) for random forms f (deg delta), g (deg s) on P_n.

    Computed as #monomials(q) minus the rank of (a, b) |-> a f + b g.  The
    rank is certified exactly: a mod-p rank is a lower bound, the Koszul
    kernel gives the upper bound dim(domain) - #monomials(q - delta - s); a
    generic complete intersection meets the bound, and we retry with fresh
    random forms until it does.
    """
    monos_q = _degree_monomials(n + 1, q)
    index = {m: i for i, m in enumerate(monos_q)}
    monos_a = _degree_monomials(n + 1, q - delta)
    monos_b = _degree_monomials(n + 1, q - s)
    kernel_dim = len(_degree_monomials(n + 1, q - delta - s)) if q >= delta + s else 0
    expected_rank = len(monos_a) + len(monos_b) - kernel_dim

    for _ in range(attempts):
        f = _random_form(n + 1, delta, rng)
        g = _random_form(n + 1, s, rng)
        matrix = np.zeros((len(monos_q), len(monos_a) + len(monos_b)), dtype=np.int64)
        for ci, e in enumerate(monos_a):
            for fm, c in f.items():
                target = tuple(a + b for a, b in zip(e, fm))
                matrix[index[target], ci] += c
        for ci, e in enumerate(monos_b):
            for gm, c in g.items():
                target = tuple(a + b for a, b in zip(e, gm))
                matrix[index[target], len(monos_a) + ci] += c
        r = _rank_mod_p(matrix)
        if r == expected_rank:
            return len(monos_q) - r
    raise RuntimeError("no generic complete intersection found; rank below bound")


# ---------------------------------------------------------------------------
# counting monomials of a given weight
# ---------------------------------------------------------------------------

def monomial_count_bounds(m: int, weights: Sequence[int]) -> Tuple[int, int]:
    """Bracket the number of monomials y^k with sum n_j k_j = m.

    Weights must be sorted with n_1 = 1; the bounds are
    C(floor(m/n_r) + r - 1, r - 1) <= a_m <= C(m + r - 1, r - 1).
    """
    weights = list(weights)
    if not weights or weights[0] != 1:
        raise ValueError("weights must start with 1")
    if weights != sorted(weights):
        raise ValueError("weights must be nondecreasing")
    r = len(weights)
    lower = binomial(m // weights[-1] + r - 1, r - 1)
    upper = binomial(m + r - 1, r - 1)
    return lower, upper


def exact_monomial_count(m: int, weights: Sequence[int]) -> int:
    """Exhaustive count of solutions of sum n_j k_j = m, by dynamic programming."""
    table = [0] * (m + 1)
    table[0] = 1
    for w in weights:
        for v in range(w, m + 1):
            table[v] += table[v - w]
    return table[m]


# ---------------------------------------------------------------------------
# existence inequality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    unknowns: int            # ansatz dimension lower bound
    constraints: Fraction    # constraint count upper bound
    n: int
    delta: int
    m0: int
    m: int
    big_n: int


def feasibility_check(n: int, delta: int, m0: int, m: int) -> FeasibilityReport:
    """The sufficient inequality for a nontrivial ansatz member.

    unknowns  = C(m0+n, n) * C(floor(m/(n-1)) + n(n-1) - 1, n(n-1) - 1)
    constraints = (delta-1) delta (m0 + N(delta-1))^(n-2) / (n-2)!
                  * C(m + (n-1)^2 - 1, (n-1)^2 - 1),  N = (n-1)! 2m.

    Requires m0 + 2m < delta; the inequality is sufficient, not necessary,
    so solver attempts are legitimate whenever the precondition holds.
    """
    if n < 3:
        raise RangeViolationError("range-violation: the counting argument needs n >= 3")
    if m0 + 2 * m >= delta:
        raise RangeViolationError(
            f"grading-violation: m0 + 2m = {m0 + 2 * m} must be < delta = {delta}")
    big_n = math.factorial(n - 1) * 2 * m
    unknowns = binomial(m0 + n, n) * binomial(m // (n - 1) + n * (n - 1) - 1,
                                              n * (n - 1) - 1)
    constraints = (Fraction((delta - 1) * delta * (m0 + big_n * (delta - 1)) ** (n - 2),
                            math.factorial(n - 2))
                   * binomial(m + (n - 1) ** 2 - 1, (n - 1) ** 2 - 1))
    return FeasibilityReport(feasible=unknowns > constraints,
                             unknowns=unknowns, constraints=constraints,
                             n=n, delta=delta, m0=m0, m=m, big_n=big_n)
