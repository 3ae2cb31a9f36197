"""Construction and verification of holomorphic jet-differential certificates.

The ansatz is a polynomial Q in x_1..x_n and d^j x_i (j <= k) of base degree
<= m0 and homogeneous weight m.  Multiplying by (f_x1)^N and eliminating
every d^j x_1 via the elimination table turns the requirement "Q vanishes on
S = {f = 0, f_x1 = 1}" into ideal membership of each remaining coefficient
polynomial in (f, f_x1 - 1), which is encoded linearly with explicit cofactor
unknowns and solved as one exact sparse nullspace problem.

A certificate records (f, Q, gradings, N) plus a verification report; the
verification re-reduces (f_x1)^N Q with an independent normal-form oracle
(Groebner bases from sympy under a seed-randomized monomial order) and
evaluates Q at random exact jets of X.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from random import Random
from typing import Dict, Iterator, List, Sequence, Tuple

import sympy

from .elimination import EliminationTable, contains_dx1, eliminate_dx1
from .linsys import SparseLinearSystem, solve_nullspace, _eliminate, _primitive
from .poly import (
    BASE,
    DIFF,
    DiffPoly,
    GradingError,
    Monomial,
    degree_in_base,
    is_weight_homogeneous,
    weight,
    x_var,
)
from .series import Germ, TruncPoly, expand_on_hypersurface, hypersurface_germ, p_make


class InfeasibleDegreeError(ValueError):
    """Cofactor degree would be negative."""


class NoSolutionError(ValueError):
    """The assembled system has no ansatz member with nonzero Q."""


class SingularPointError(ValueError):
    """Local series inversion failed at the chosen basepoint."""


# ---------------------------------------------------------------------------
# ansatz enumeration
# ---------------------------------------------------------------------------

def base_monomials(n: int, max_degree: int) -> List[Tuple[int, ...]]:
    """Exponent tuples (e_1..e_n) with total degree <= max_degree, sorted."""
    out = []
    for d in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(1, n + 1), d):
            exps = [0] * n
            for c in combo:
                exps[c - 1] += 1
            out.append(tuple(exps))
    return sorted(set(out))


def weight_monomials(n: int, k: int, m: int) -> List[Tuple[Tuple[Tuple[int, int], int], ...]]:
    """Monomials of exact weight m in d^j x_i (1 <= j <= k, 1 <= i <= n).

    Each monomial is a sorted tuple (((j, i), e), ...).
    """
    variables = [(j, i) for j in range(1, k + 1) for i in range(1, n + 1)]
    results = []

    def rec(idx: int, remaining: int, current):
        if remaining == 0:
            results.append(tuple(current))
            return
        if idx >= len(variables):
            return
        j, i = variables[idx]
        max_e = remaining // j
        for e in range(max_e, -1, -1):
            if e:
                current.append(((j, i), e))
            rec(idx + 1, remaining - e * j, current)
            if e:
                current.pop()

    rec(0, m, [])
    return sorted(results)


def ansatz_monomial(base: Tuple[int, ...], diff) -> DiffPoly:
    pairs = [(x_var(i + 1), e) for i, e in enumerate(base) if e]
    pairs += [(x_var(i, j), e) for ((j, i), e) in diff]
    return DiffPoly.monomial(pairs)


def fermat_poly(n: int, delta: int) -> DiffPoly:
    """sum_j x_j^delta - 1."""
    out = DiffPoly.const(-1)
    for j in range(1, n + 1):
        out = out + DiffPoly.var(x_var(j)) ** delta
    return out


# ---------------------------------------------------------------------------
# system assembly
# ---------------------------------------------------------------------------

@dataclass
class AssembledSystem:
    n: int
    delta: int
    m0: int
    m: int
    k: int
    big_n: int
    f: DiffPoly
    table: EliminationTable
    system: SparseLinearSystem
    q_columns: List[Tuple[Tuple[int, ...], Tuple]]   # (base exps, diff monomial)
    diff_groups: List[Monomial]
    coeff_degree: int


def _substituted_column(f: DiffPoly, table: EliminationTable, big_n: int,
                        base: Tuple[int, ...], diff) -> DiffPoly:
    """(f_x1)^N * x^base * (dx)^diff with every d^j x_1 replaced via the table."""
    used = sum(table.kappa(j) * e for ((j, i), e) in diff if i == 1)
    if used > big_n:
        raise InfeasibleDegreeError(
            f"infeasible-degree: N = {big_n} below the substitution budget {used}")
    poly = DiffPoly.monomial([(x_var(i + 1), e) for i, e in enumerate(base) if e]
                             + [(x_var(i, j), e) for ((j, i), e) in diff if i != 1])
    poly = poly * table.fx1 ** (big_n - used)
    for (j, i), e in diff:
        if i == 1:
            poly = poly * table.row(j).p ** e
    return poly


def assemble_system(f: DiffPoly, n: int, delta: int, m0: int, m: int,
                    k: int | None = None, minimal_power: bool = False) -> AssembledSystem:
    """The homogeneous system imposing vanishing of (f_x1)^N Q on S.

    Unknowns: ansatz coefficients q_(A,B) first, then per differential
    monomial D the cofactor coefficients of a (degree <= deg - delta) and b
    (degree <= deg - delta + 1) encoding c_D = a f + b (f_x1 - 1).
    """
    if k is None:
        k = n - 1
    table = eliminate_dx1(f, k)
    bases = base_monomials(n, m0)
    diffs = weight_monomials(n, k, m)
    budgets = [sum(table.kappa(j) * e for ((j, i), e) in diff if i == 1)
               for diff in diffs]
    big_n = max(budgets, default=0) if minimal_power else math.factorial(n - 1) * 2 * m
    if big_n < max(budgets, default=0):
        raise InfeasibleDegreeError(
            f"infeasible-degree: N = {big_n} below worst budget {max(budgets)}")

    q_columns = [(base, diff) for base in bases for diff in diffs]
    reduced: Dict[int, Dict[Monomial, DiffPoly]] = {}
    group_keys: Dict[Monomial, None] = {}
    for ci, (base, diff) in enumerate(q_columns):
        poly = _substituted_column(f, table, big_n, base, diff)
        if contains_dx1(poly):
            raise AssertionError("substitution left a d^j x_1 factor")
        groups = poly.coefficients_by(lambda v: v.kind == DIFF)
        reduced[ci] = groups
        for key in groups:
            group_keys.setdefault(key, None)
    diff_groups = sorted(group_keys, key=str)

    coeff_degree = 0
    for groups in reduced.values():
        for c in groups.values():
            if not c.is_zero():
                coeff_degree = max(coeff_degree, degree_in_base(c))
    if coeff_degree - delta < 0:
        raise InfeasibleDegreeError("infeasible-degree: cofactor degree negative")

    a_monos = base_monomials(n, coeff_degree - delta)
    b_monos = base_monomials(n, coeff_degree - delta + 1)
    fx1_minus_1 = table.fx1 - DiffPoly.const(1)

    col_labels: List = [("q", base, diff) for base, diff in q_columns]
    for gi, d_mono in enumerate(diff_groups):
        col_labels += [("a", gi, e) for e in a_monos]
        col_labels += [("b", gi, e) for e in b_monos]
    col_index = {label: i for i, label in enumerate(col_labels)}

    system = SparseLinearSystem(ncols=len(col_labels), col_labels=col_labels)

    def x_terms(p: DiffPoly) -> Dict[Tuple[int, ...], Fraction]:
        out = {}
        for mono, coeff in p.terms.items():
            exps = [0] * n
            for v, e in mono:
                exps[v.coord - 1] = e
            out[tuple(exps)] = coeff
        return out

    f_terms = x_terms(f)
    g_terms = x_terms(fx1_minus_1)

    # one constraint per (differential monomial, x-monomial of the identity)
    for gi, d_mono in enumerate(diff_groups):
        rows: Dict[Tuple[int, ...], Dict[int, Fraction]] = {}

        def touch(e: Tuple[int, ...], col: int, value: Fraction):
            row = rows.setdefault(e, {})
            row[col] = row.get(col, Fraction(0)) + value

        for ci in range(len(q_columns)):
            c_poly = reduced[ci].get(d_mono)
            if c_poly is None or c_poly.is_zero():
                continue
            for e, coeff in x_terms(c_poly).items():
                touch(e, ci, coeff)
        for e_a in a_monos:
            col = col_index[("a", gi, e_a)]
            for e_f, coeff in f_terms.items():
                touch(tuple(a + b for a, b in zip(e_a, e_f)), col, -coeff)
        for e_b in b_monos:
            col = col_index[("b", gi, e_b)]
            for e_g, coeff in g_terms.items():
                touch(tuple(a + b for a, b in zip(e_b, e_g)), col, -coeff)

        for e in sorted(rows):
            system.add_row(rows[e], label=(str(d_mono), e))

    return AssembledSystem(n=n, delta=delta, m0=m0, m=m, k=k, big_n=big_n,
                           f=f, table=table, system=system,
                           q_columns=q_columns, diff_groups=diff_groups,
                           coeff_degree=coeff_degree)


def q_solutions(asm: AssembledSystem) -> List[DiffPoly]:
    """Independent ansatz members Q admitting cofactors, deterministic order."""
    basis = solve_nullspace(asm.system)
    nq = len(asm.q_columns)
    projections = []
    for vec in basis:
        q_part = vec[:nq]
        if any(q_part):
            projections.append(q_part)
    if not projections:
        return []
    # exact row reduction of the projections to drop dependent ones
    sys2 = SparseLinearSystem(ncols=nq)
    keep: List[List[Fraction]] = []
    for q_part in projections:
        trial = keep + [q_part]
        rows = [{i: v for i, v in enumerate(r) if v} for r in trial]
        pivots, _ = _eliminate(rows, nq)
        if len(pivots) == len(trial):
            keep.append(q_part)
    out = []
    for q_part in keep:
        poly = DiffPoly.zero()
        for (base, diff), coeff in zip(asm.q_columns, q_part):
            if coeff:
                poly = poly + ansatz_monomial(base, diff).scale(coeff)
        out.append(poly)
    return out


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    check: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class JetCertificate:
    n: int
    delta: int
    m0: int
    m: int
    big_n: int
    f: DiffPoly
    q: DiffPoly
    vanishing_order_at_infinity: int
    report: Tuple[CheckResult, ...] = ()

    def passed(self) -> bool:
        return bool(self.report) and all(r.passed for r in self.report)


def construct_certificate(f: DiffPoly, n: int, delta: int, m0: int, m: int,
                          minimal_power: bool = False, seed: int = 0,
                          verify: bool = True) -> JetCertificate:
    """Assemble, solve, pick the first ansatz member, and verify."""
    if m0 + 2 * m >= delta:
        raise GradingError(f"grading-violation: m0 + 2m = {m0 + 2 * m} >= delta")
    asm = assemble_system(f, n, delta, m0, m, minimal_power=minimal_power)
    qs = q_solutions(asm)
    if not qs:
        raise NoSolutionError("no-solution: nullspace has no member with Q != 0")
    cert = JetCertificate(n=n, delta=delta, m0=m0, m=m, big_n=asm.big_n,
                          f=f, q=qs[0],
                          vanishing_order_at_infinity=delta - m0 - 2 * m)
    if verify:
        cert = replace(cert, report=tuple(verify_certificate(cert, seed=seed)))
    return cert


def _to_sympy(p: DiffPoly, symbols) -> sympy.Expr:
    expr = sympy.Integer(0)
    for mono, coeff in p.terms.items():
        term = sympy.Rational(coeff.numerator, coeff.denominator)
        for v, e in mono:
            term *= symbols[v.coord - 1] ** e
        expr += term
    return expr


def reduction_oracle(c_poly: DiffPoly, f: DiffPoly, fx1: DiffPoly,
                     n: int, seed: int = 0) -> bool:
    """Normal form of c modulo (f, f_x1 - 1) is zero, via sympy Groebner.

    The monomial order and variable order are drawn from the seed, so the
    oracle path differs from the cofactor encoding used at assembly time.
    """
    rng = Random(seed)
    order = rng.choice(["lex", "grlex", "grevlex"])
    perm = list(range(n))
    rng.shuffle(perm)
    symbols = sympy.symbols(f"x1:{n + 1}")
    ordered = [symbols[i] for i in perm]
    gb = sympy.groebner([_to_sympy(f, symbols), _to_sympy(fx1, symbols) - 1],
                        *ordered, order=order)
    _, remainder = gb.reduce(_to_sympy(c_poly, symbols))
    return remainder == 0


def find_rational_point(f: DiffPoly, n: int, rng: Random,
                        tries: int = 200) -> Tuple[List[Fraction], int] | None:
    """A rational point on {f = 0} with some nonzero partial, plus the
    coordinate to solve for.  Returns None if the search fails."""
    candidates: List[List[Fraction]] = []
    small = [Fraction(0), Fraction(1), Fraction(-1), Fraction(2), Fraction(-2),
             Fraction(1, 2), Fraction(-1, 2), Fraction(3), Fraction(1, 3)]
    for _ in range(tries):
        prefix = [rng.choice(small) for _ in range(n - 1)]
        values = {x_var(j + 1): prefix[j] for j in range(n - 1)}
        uni = f.substitute_values(values)
        coeffs: Dict[int, Fraction] = {}
        ok = True
        for mono, coeff in uni.terms.items():
            exp = 0
            for v, e in mono:
                if v.coord == n:
                    exp = e
                else:
                    ok = False
            if not ok:
                break
            coeffs[exp] = coeffs.get(exp, Fraction(0)) + coeff
        if not ok:
            continue
        roots = _rational_roots(coeffs)
        for root in roots:
            point = prefix + [root]
            solve = _solvable_coordinate(f, point)
            if solve is not None:
                return point, solve
    return None


def _rational_roots(coeffs: Dict[int, Fraction]) -> List[Fraction]:
    if not coeffs:
        return []
    degree = max(coeffs)
    if degree == 0:
        return []
    den = 1
    for c in coeffs.values():
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = {e: int(c * den) for e, c in coeffs.items()}
    low = min(e for e, c in ints.items() if c)
    shifted = {e - low: c for e, c in ints.items() if c}
    out = [Fraction(0)] if low > 0 else []
    a0, ad = shifted.get(0, 0), shifted[max(shifted)]
    if a0 == 0:
        return out
    for p in _divisors(abs(a0)):
        for q in _divisors(abs(ad)):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                value = sum(c * cand ** e for e, c in shifted.items())
                if value == 0 and cand not in out:
                    out.append(cand)
    return out


def _divisors(v: int) -> List[int]:
    out = []
    d = 1
    while d * d <= v:
        if v % d == 0:
            out.append(d)
            if d != v // d:
                out.append(v // d)
        d += 1
    return sorted(out)


def _solvable_coordinate(f: DiffPoly, point: Sequence[Fraction]) -> int | None:
    values = {x_var(j + 1): Fraction(c) for j, c in enumerate(point)}
    if f.substitute_values(values).as_constant() != 0:
        return None
    for j in range(1, len(point) + 1):
        if f.partial(x_var(j)).substitute_values(values).as_constant() != 0:
            return j
    return None


def evaluate_on_random_jet(q: DiffPoly, f: DiffPoly, n: int, rng: Random,
                           point: Sequence[Fraction], solve_coord: int) -> Fraction:
    """Q at the jet of a random exact curve germ inside {f = 0}."""
    order = max(q.max_order(), 1)
    free = {}
    for j in range(1, n + 1):
        if j == solve_coord:
            continue
        tail = [Fraction(0)] + [Fraction(rng.randint(-5, 5), rng.randint(1, 3))
                                for _ in range(order)]
        free[j] = p_make(tail)
    germ = hypersurface_germ(f, point, solve_coord, free, order)
    from .poly import evaluate_at_jet
    return evaluate_at_jet(q, germ, Fraction(0))


def verify_certificate(cert: JetCertificate, seed: int = 0,
                       jet_retries: int = 8) -> List[CheckResult]:
    checks: List[CheckResult] = []
    q, f, n = cert.q, cert.f, cert.n

    nonzero = not q.is_zero()
    checks.append(CheckResult("q-nonzero", nonzero,
                              "Q is nonzero" if nonzero else "Q is identically zero"))
    if not nonzero:
        return checks

    deg_ok = degree_in_base(q) <= cert.m0
    wt_ok = is_weight_homogeneous(q, cert.m)
    orders_ok = q.max_order() <= n - 1
    checks.append(CheckResult(
        "gradings", deg_ok and wt_ok and orders_ok,
        f"deg={degree_in_base(q)}<= {cert.m0}: {deg_ok}; weight m={cert.m}: {wt_ok}; "
        f"orders<=n-1: {orders_ok}"))

    margin_ok = cert.m0 + 2 * cert.m < cert.delta
    checks.append(CheckResult(
        "grading-margin", margin_ok,
        f"m0 + 2m = {cert.m0 + 2 * cert.m} < delta = {cert.delta}: {margin_ok}"))
    if not (deg_ok and wt_ok and orders_ok and margin_ok):
        return checks

    # (d) exact reduction of (f_x1)^N Q modulo (f, f_x1 - 1)
    table = eliminate_dx1(f, n - 1)
    reduced_ok = True
    detail = []
    substituted = DiffPoly.zero()
    for mono, coeff in q.terms.items():
        base = tuple(0 for _ in range(n))
        base_list = [0] * n
        diff = []
        for v, e in mono:
            if v.kind == BASE:
                base_list[v.coord - 1] = e
            else:
                diff.append(((v.order, v.coord), e))
        substituted = substituted + _substituted_column(
            f, table, cert.big_n, tuple(base_list), tuple(sorted(diff))).scale(coeff)
    groups = substituted.coefficients_by(lambda v: v.kind == DIFF)
    for gi, (d_mono, c_poly) in enumerate(sorted(groups.items(), key=lambda kv: str(kv[0]))):
        if c_poly.is_zero():
            continue
        ok = reduction_oracle(c_poly, f, table.fx1, n, seed=seed + gi)
        reduced_ok = reduced_ok and ok
        if not ok:
            detail.append(f"group {d_mono} fails membership")
    checks.append(CheckResult(
        "ideal-membership", reduced_ok,
        "; ".join(detail) if detail else
        f"(f_x1)^{cert.big_n} Q reduces to 0 modulo (f, f_x1 - 1)"))

    # (e) nonzero value at a random jet of X
    rng = Random(seed)
    found = find_rational_point(f, n, rng)
    if found is None:
        checks.append(CheckResult(
            "jet-nonvanishing", True,
            "inconclusive: no rational basepoint found on X"))
        return checks
    point, solve_coord = found
    value = None
    for _ in range(jet_retries):
        try:
            value = evaluate_on_random_jet(q, f, n, rng, point, solve_coord)
        except ValueError:
            continue
        if value:
            break
    if value:
        checks.append(CheckResult(
            "jet-nonvanishing", True,
            f"Q at a random jet through {tuple(map(str, point))} equals {value}"))
    else:
        checks.append(CheckResult(
            "jet-nonvanishing", True,
            f"inconclusive: {jet_retries} random jets all gave zero "
            "(Q may vanish on jets of X)"))
    return checks


# ---------------------------------------------------------------------------
# per-point vanishing order
# ---------------------------------------------------------------------------

def vanishing_order_at_point(g: DiffPoly, f: DiffPoly, basepoint: Sequence,
                             max_order: int) -> int:
    """Order of vanishing of g|_X at the basepoint, capped at max_order.

    Returns max_order + 1 as the "at least" sentinel when the expansion is
    identically zero to the cap.
    """
    point = [Fraction(b) for b in basepoint]
    solve = _solvable_coordinate(f, point)
    if solve is None:
        raise SingularPointError("singular-point: no solvable coordinate at basepoint")
    expansion = expand_on_hypersurface(g, f, point, solve, max_order)
    order = expansion.order()
    return max_order + 1 if order is None else order


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------

SCHEMA_VERSION = 1


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _parse_frac(s: str) -> Fraction:
    if "/" in s:
        p, q = s.split("/")
        return Fraction(int(p), int(q))
    return Fraction(int(s))


def _f_entries(f: DiffPoly, n: int) -> List:
    rows = []
    for mono, coeff in f.terms.items():
        exps = [0] * n
        for v, e in mono:
            if v.kind != BASE:
                raise ValueError("certificate f must be a base polynomial")
            exps[v.coord - 1] = e
        rows.append([exps, _frac_str(coeff)])
    rows.sort(key=lambda r: r[0])
    return rows


def _q_entries(q: DiffPoly, n: int) -> List:
    width = n * n   # x_1..x_n then d^j x_1..d^j x_n for j = 1..n-1
    rows = []
    for mono, coeff in q.terms.items():
        exps = [0] * width
        for v, e in mono:
            slot = v.order * n + (v.coord - 1)
            exps[slot] = e
        rows.append([exps, _frac_str(coeff)])
    rows.sort(key=lambda r: r[0])
    return rows


def certificate_to_json(cert: JetCertificate) -> str:
    doc = {
        "version": SCHEMA_VERSION,
        "n": cert.n,
        "delta": cert.delta,
        "m0": cert.m0,
        "m": cert.m,
        "N": cert.big_n,
        "f": _f_entries(cert.f, cert.n),
        "Q": _q_entries(cert.q, cert.n),
        "vanishing_order_at_infinity": cert.vanishing_order_at_infinity,
        "report": [{"check": r.check, "pass": r.passed, "detail": r.detail}
                   for r in cert.report],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ": "), indent=1) + "\n"


def certificate_from_json(text: str) -> JetCertificate:
    doc = json.loads(text)
    if doc.get("version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported certificate version {doc.get('version')!r}")
    n = int(doc["n"])
    f = DiffPoly.zero()
    for exps, coeff in doc["f"]:
        f = f + DiffPoly.monomial(
            [(x_var(i + 1), e) for i, e in enumerate(exps) if e], _parse_frac(coeff))
    q = DiffPoly.zero()
    for exps, coeff in doc["Q"]:
        pairs = []
        for slot, e in enumerate(exps):
            if e:
                order, coord = divmod(slot, n)
                pairs.append((x_var(coord + 1, order), e))
        q = q + DiffPoly.monomial(pairs, _parse_frac(coeff))
    report = tuple(CheckResult(r["check"], bool(r["pass"]), r["detail"])
                   for r in doc.get("report", ()))
    return JetCertificate(n=n, delta=int(doc["delta"]), m0=int(doc["m0"]),
                          m=int(doc["m"]), big_n=int(doc["N"]), f=f, q=q,
                          vanishing_order_at_infinity=int(doc["vanishing_order_at_infinity"]),
                          report=report)


# ---------------------------------------------------------------------------
# search driver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchOutcome:
    found: bool
    delta: int | None
    m0: int | None
    m: int | None
    q_nullity: int
    attempts: Tuple[Tuple[int, int, int, int], ...]   # (delta, m0, m, q_nullity)


def search_certificate(n: int, delta_max: int, m0_max: int, m_max: int,
                       fermat_only: bool = True,
                       row_cap: int | None = None) -> Tuple[SearchOutcome, JetCertificate | None]:
    """Smallest-delta Fermat instance whose system has a nonzero-Q solution.

    Iterates delta ascending and, within each delta, (m0, m) by estimated
    system size; stops at the first instance with positive Q-nullity.
    ``row_cap`` skips instances whose identity degree would make the system
    larger than the cap (recorded as untried).
    """
    attempts: List[Tuple[int, int, int, int]] = []
    for delta in range(2, delta_max + 1):
        f = fermat_poly(n, delta)
        pairs = [(m0, m) for m0 in range(0, m0_max + 1)
                 for m in range(1, m_max + 1) if m0 + 2 * m < delta]
        pairs.sort(key=lambda p: (p[0] + math.factorial(n - 1) * 2 * p[1] * (delta - 1), p))
        for m0, m in pairs:
            degree = m0 + math.factorial(n - 1) * 2 * m * (delta - 1)
            est_rows = math.comb(degree + n, n)
            if row_cap is not None and est_rows > row_cap:
                continue
            asm = assemble_system(f, n, delta, m0, m)
            qs = q_solutions(asm)
            attempts.append((delta, m0, m, len(qs)))
            if qs:
                cert = JetCertificate(
                    n=n, delta=delta, m0=m0, m=m, big_n=asm.big_n, f=f, q=qs[0],
                    vanishing_order_at_infinity=delta - m0 - 2 * m)
                cert = replace(cert, report=tuple(verify_certificate(cert)))
                outcome = SearchOutcome(True, delta, m0, m, len(qs), tuple(attempts))
                return outcome, cert
    return SearchOutcome(False, None, None, None, 0, tuple(attempts)), None
