"""Exact truncated power series, curve germs, and local parametrizations.

Univariate polynomials are tuples of Fractions in ascending degree; the zero
polynomial is the empty tuple.  Truncated series reuse the same layout with an
explicit validity order.  These are the germs fed to ``evaluate_at_jet`` and
the local parametrizations of hypersurfaces used for vanishing orders and
certificate checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Mapping, Sequence, Tuple

from .poly import BASE, DiffPoly, InsufficientTruncationError, Variable

Coeffs = Tuple[Fraction, ...]


# ---------------------------------------------------------------------------
# univariate polynomials (ascending coefficients)
# ---------------------------------------------------------------------------

def p_make(coeffs: Sequence) -> Coeffs:
    out = [Fraction(c) for c in coeffs]
    while out and not out[-1]:
        out.pop()
    return tuple(out)


def p_add(a: Coeffs, b: Coeffs) -> Coeffs:
    n = max(len(a), len(b))
    return p_make([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                   for i in range(n)])


def p_neg(a: Coeffs) -> Coeffs:
    return tuple(-c for c in a)


def p_sub(a: Coeffs, b: Coeffs) -> Coeffs:
    return p_add(a, p_neg(b))


def p_mul(a: Coeffs, b: Coeffs, cap: int | None = None) -> Coeffs:
    if not a or not b:
        return ()
    n = len(a) + len(b) - 1
    if cap is not None:
        n = min(n, cap + 1)
    out = [Fraction(0)] * n
    for i, ca in enumerate(a):
        if not ca or i >= n:
            continue
        for j, cb in enumerate(b):
            if i + j >= n:
                break
            out[i + j] += ca * cb
    return p_make(out)


def p_scale(a: Coeffs, c) -> Coeffs:
    c = Fraction(c)
    if not c:
        return ()
    return tuple(x * c for x in a)


def p_pow(a: Coeffs, n: int, cap: int | None = None) -> Coeffs:
    result: Coeffs = (Fraction(1),)
    for _ in range(n):
        result = p_mul(result, a, cap)
    return result


def p_deriv(a: Coeffs) -> Coeffs:
    return p_make([a[i] * i for i in range(1, len(a))])


def p_eval(a: Coeffs, x) -> Fraction:
    x = Fraction(x)
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


def p_divmod(a: Coeffs, b: Coeffs) -> Tuple[Coeffs, Coeffs]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a)
    quo = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(rem) - len(b), -1, -1):
        c = rem[i + len(b) - 1] / lead
        if not c:
            continue
        quo[i] = c
        for j, bc in enumerate(b):
            rem[i + j] -= c * bc
    return p_make(quo), p_make(rem)


def p_gcd(a: Coeffs, b: Coeffs) -> Coeffs:
    while b:
        a, b = b, p_divmod(a, b)[1]
    if a:
        a = p_scale(a, 1 / a[-1])
    return a


def p_squarefree_factors(a: Coeffs) -> list[Tuple[Coeffs, int]]:
    """Yun-style decomposition: [(factor, multiplicity)] with factors squarefree.

    The product of factor^multiplicity equals ``a`` up to a constant.
    """
    if len(a) <= 1:
        return []
    g = p_gcd(a, p_deriv(a))
    if len(g) <= 1:
        return [(a, 1)]
    out: list[Tuple[Coeffs, int]] = []
    w = p_divmod(a, g)[0]
    mult = 1
    while len(w) > 1:
        y = p_gcd(w, g)
        factor = p_divmod(w, y)[0]
        if len(factor) > 1:
            out.append((factor, mult))
        w = y
        g = p_divmod(g, y)[0]
        mult += 1
        if len(g) <= 1 and len(w) > 1:
            out.append((w, mult))
            break
    return out


def p_truncate(a: Coeffs, cap: int) -> Coeffs:
    return p_make(a[:cap + 1])


def series_inverse(a: Coeffs, cap: int) -> Coeffs:
    """1/a as a series modulo zeta^(cap+1); requires a(0) != 0."""
    if not a or not a[0]:
        raise ZeroDivisionError("series inverse needs nonzero constant term")
    inv: Coeffs = (1 / a[0],)
    k = 1
    while k <= cap:
        k = min(2 * k, cap + 1)
        # Newton step: inv <- inv*(2 - a*inv) mod zeta^k
        prod = p_mul(a, inv, k - 1)
        two_minus = p_sub((Fraction(2),), prod)
        inv = p_mul(inv, two_minus, k - 1)
    return p_truncate(inv, cap)


def series_log1p(a: Coeffs, cap: int) -> Coeffs:
    """log(1 + a) for a with a(0) = 0, modulo zeta^(cap+1)."""
    if a and a[0]:
        raise ValueError("series_log1p needs vanishing constant term")
    out: Coeffs = ()
    term: Coeffs = (Fraction(1),)
    for k in range(1, cap + 1):
        term = p_mul(term, a, cap)
        if not term:
            break
        out = p_add(out, p_scale(term, Fraction((-1) ** (k + 1), k)))
    return out


# ---------------------------------------------------------------------------
# germs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Germ:
    """A parametrized coordinate germ phi(zeta), polynomial or truncated.

    ``order`` is the truncation order; None means the coefficients are exact
    (a genuine polynomial), so derivatives of every order are available.
    """

    coeffs: Coeffs
    order: int | None = None

    @staticmethod
    def poly(coeffs: Sequence) -> "Germ":
        return Germ(p_make(coeffs), None)

    @staticmethod
    def truncated(coeffs: Sequence, order: int) -> "Germ":
        return Germ(p_make(coeffs), order)

    def derivative_value(self, order: int, zeta0) -> Fraction:
        if self.order is not None and order > self.order:
            raise InsufficientTruncationError(
                f"germ truncated at order {self.order}, needs {order}")
        c = self.coeffs
        for _ in range(order):
            c = p_deriv(c)
        return p_eval(c, zeta0)

    def value(self, zeta0) -> Fraction:
        return p_eval(self.coeffs, zeta0)


# ---------------------------------------------------------------------------
# truncated multivariate polynomials (for local Taylor expansions)
# ---------------------------------------------------------------------------

class TruncPoly:
    """Polynomial in t_1..t_k truncated at total degree <= cap, exact."""

    __slots__ = ("nvars", "cap", "terms")

    def __init__(self, nvars: int, cap: int, terms: Mapping[Tuple[int, ...], Fraction] | None = None):
        self.nvars = nvars
        self.cap = cap
        self.terms: Dict[Tuple[int, ...], Fraction] = {}
        if terms:
            for e, c in terms.items():
                if sum(e) <= cap and c:
                    self.terms[e] = Fraction(c)

    @staticmethod
    def const(nvars: int, cap: int, c) -> "TruncPoly":
        return TruncPoly(nvars, cap, {(0,) * nvars: Fraction(c)})

    @staticmethod
    def var(nvars: int, cap: int, i: int) -> "TruncPoly":
        e = [0] * nvars
        e[i] = 1
        return TruncPoly(nvars, cap, {tuple(e): Fraction(1)})

    def add(self, other: "TruncPoly") -> "TruncPoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            acc = out.get(e, Fraction(0)) + c
            if acc:
                out[e] = acc
            else:
                out.pop(e, None)
        return TruncPoly(self.nvars, self.cap, out)

    def neg(self) -> "TruncPoly":
        return TruncPoly(self.nvars, self.cap, {e: -c for e, c in self.terms.items()})

    def mul(self, other: "TruncPoly") -> "TruncPoly":
        out: Dict[Tuple[int, ...], Fraction] = {}
        cap = self.cap
        for e1, c1 in self.terms.items():
            d1 = sum(e1)
            for e2, c2 in other.terms.items():
                if d1 + sum(e2) > cap:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                acc = out.get(e, Fraction(0)) + c1 * c2
                if acc:
                    out[e] = acc
                else:
                    out.pop(e, None)
        return TruncPoly(self.nvars, cap, out)

    def scale(self, c) -> "TruncPoly":
        c = Fraction(c)
        return TruncPoly(self.nvars, self.cap, {e: c * v for e, v in self.terms.items()})

    def pow(self, n: int) -> "TruncPoly":
        result = TruncPoly.const(self.nvars, self.cap, 1)
        for _ in range(n):
            result = result.mul(self)
        return result

    def constant(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def inverse(self) -> "TruncPoly":
        c0 = self.constant()
        if not c0:
            raise ZeroDivisionError("TruncPoly inverse needs nonzero constant term")
        inv = TruncPoly.const(self.nvars, self.cap, 1 / c0)
        two = TruncPoly.const(self.nvars, self.cap, 2)
        # Newton iteration converges in log2(cap)+1 steps
        steps = max(1, self.cap.bit_length() + 1)
        for _ in range(steps):
            inv = inv.mul(two.add(self.mul(inv).neg()))
        return inv

    def is_zero(self) -> bool:
        return not self.terms

    def order(self) -> int | None:
        """Smallest total degree of a nonzero term; None if zero."""
        if not self.terms:
            return None
        return min(sum(e) for e in self.terms)


def expand_on_hypersurface(
    poly: DiffPoly,
    f: DiffPoly,
    basepoint: Sequence,
    solve_coord: int,
    cap: int,
) -> TruncPoly:
    """Taylor-expand poly|_{f=0} around a smooth point, exactly.

    ``poly`` and ``f`` are polynomials in base x-variables only.  The
    coordinate x_solve_coord is expressed as a truncated power series in the
    remaining coordinates (shifted to the basepoint) by Newton iteration;
    requires df/dx_solve_coord nonzero at the basepoint.
    """
    from .poly import x_var

    basepoint = [Fraction(b) for b in basepoint]
    n = len(basepoint)
    if any(v.kind != BASE or v.family != "x" for v in f.variables()):
        raise ValueError("f must be a polynomial in base x-variables")
    point_values = {x_var(j + 1): basepoint[j] for j in range(n)}
    if f.substitute_values(point_values).as_constant() != 0:
        raise ValueError("basepoint does not lie on the hypersurface")
    fprime = f.partial(x_var(solve_coord))
    if fprime.substitute_values(point_values).as_constant() == 0:
        raise ValueError("singular-point: df/dx_solve vanishes at basepoint")

    free = [j for j in range(1, n + 1) if j != solve_coord]
    nvars = len(free)

    def embed(j: int) -> TruncPoly:
        i = free.index(j)
        return TruncPoly.var(nvars, cap, i).add(
            TruncPoly.const(nvars, cap, basepoint[j - 1]))

    coords: Dict[int, TruncPoly] = {j: embed(j) for j in free}

    y = TruncPoly.const(nvars, cap, basepoint[solve_coord - 1])
    for _ in range(cap.bit_length() + 1):
        coords[solve_coord] = y
        fy = _eval_trunc(f, coords, nvars, cap)
        fpy = _eval_trunc(fprime, coords, nvars, cap)
        y = y.add(fy.mul(fpy.inverse()).neg())
    coords[solve_coord] = y
    residual = _eval_trunc(f, coords, nvars, cap)
    if not residual.is_zero():
        raise ValueError("singular-point: Newton iteration failed to converge")
    return _eval_trunc(poly, coords, nvars, cap)


def _eval_trunc(p: DiffPoly, coords: Mapping[int, TruncPoly], nvars: int, cap: int) -> TruncPoly:
    out = TruncPoly(nvars, cap)
    cache: Dict[Tuple[int, int], TruncPoly] = {}
    for mono, coeff in p.terms.items():
        piece = TruncPoly.const(nvars, cap, coeff)
        for v, e in mono:
            key = (v.coord, e)
            powv = cache.get(key)
            if powv is None:
                powv = coords[v.coord].pow(e)
                cache[key] = powv
            piece = piece.mul(powv)
        out = out.add(piece)
    return out


def hypersurface_germ(
    f: DiffPoly,
    basepoint: Sequence,
    solve_coord: int,
    free_germs: Mapping[int, Coeffs],
    order: int,
) -> Dict[int, Germ]:
    """A curve germ inside {f = 0} through the basepoint, exact to ``order``.

    ``free_germs`` prescribes phi_j(zeta) - basepoint_j for every coordinate
    except ``solve_coord`` (each must vanish at zeta = 0); the solved
    coordinate is produced by Newton iteration in the series ring.
    """
    from .poly import x_var

    basepoint = [Fraction(b) for b in basepoint]
    n = len(basepoint)
    cap = order
    phis: Dict[int, Coeffs] = {}
    for j in range(1, n + 1):
        if j == solve_coord:
            continue
        tail = p_make(free_germs.get(j, ()))
        if tail and tail[0]:
            raise ValueError("free germs must vanish at zeta = 0")
        phis[j] = p_truncate(p_add((basepoint[j - 1],), tail), cap)

    fprime = f.partial(x_var(solve_coord))
    y: Coeffs = (basepoint[solve_coord - 1],)
    for _ in range(cap.bit_length() + 2):
        vals = dict(phis)
        vals[solve_coord] = y
        fy = _eval_series(f, vals, cap)
        fpy = _eval_series(fprime, vals, cap)
        if not fpy or not fpy[0]:
            raise ValueError("singular-point: series Newton step degenerate")
        y = p_truncate(p_sub(y, p_mul(fy, series_inverse(fpy, cap), cap)), cap)
    vals = dict(phis)
    vals[solve_coord] = y
    if _eval_series(f, vals, cap):
        raise ValueError("singular-point: germ does not satisfy f = 0")
    return {j: Germ.truncated(c, cap) for j, c in vals.items()}


def _eval_series(p: DiffPoly, coords: Mapping[int, Coeffs], cap: int) -> Coeffs:
    out: Coeffs = ()
    cache: Dict[Tuple[int, int], Coeffs] = {}
    for mono, coeff in p.terms.items():
        piece: Coeffs = (coeff,)
        for v, e in mono:
            key = (v.coord, e)
            powv = cache.get(key)
            if powv is None:
                powv = p_pow(coords[v.coord], e, cap)
                cache[key] = powv
            piece = p_mul(piece, powv, cap)
        out = p_add(out, piece)
    return out
