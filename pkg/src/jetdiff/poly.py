"""Exact sparse differential polynomials over the rationals.

A differential polynomial is a sparse map from monomials to ``Fraction``
coefficients.  Monomials are products of *jet variables*: base coordinates
(``x1``, ``z0``), higher differentials (``d2x1`` for d^2 x_1), logarithmic
differentials (``xi2_1`` for d^2 log z_1), hypersurface coefficients
(``a[2,0,1]`` for the coefficient of z_0^2 z_2), symbolic multi-index
components (``nu0``), and registered log symbols (``L0_2`` for d^2 log F_0).

Exponent vectors are stored sparsely as sorted tuples of (variable, exponent)
pairs, so equality of polynomials is equality of dicts.  All coefficients are
exact rationals; there is no floating point anywhere in this module.

Two coordinate families exist side by side: the inhomogeneous ``x`` family
(x_j, d^l x_j for j >= 1) and the homogeneous ``z`` family (z_j, d^l z_j,
xi^(l)_j = d^l log z_j for j >= 0).  Conversion between them is explicit
(`homogenize_jet` / `dehomogenize_jet`); the two families never mix silently.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, Iterator, Mapping, Sequence, Tuple

# ---------------------------------------------------------------------------
# variables
# ---------------------------------------------------------------------------

# Variable kinds.  BASE has order 0 by definition; DIFF and LOGDIFF carry a
# positive differential order; ALPHA/NU/LOGSYM are weight-0 parameters except
# LOGSYM which carries the order of the log derivative it stands for.
BASE = "base"
DIFF = "diff"
LOGDIFF = "logdiff"
ALPHA = "alpha"
NU = "nu"
LOGSYM = "logsym"

_KIND_RANK = {BASE: 0, DIFF: 1, LOGDIFF: 2, NU: 3, ALPHA: 4, LOGSYM: 5}
_FAMILY_RANK = {"x": 0, "z": 1, "": 2}


@dataclass(frozen=True)
class Variable:
    """A single jet variable, self-describing (no external alphabet object).

    ``family`` is "x" or "z" for coordinate-like kinds, "" otherwise.
    ``coord`` is the coordinate index (or registry index for LOGSYM).
    ``order`` is the differential order (0 for BASE/ALPHA/NU).
    ``tag`` holds the multi-index for ALPHA variables.
    """

    kind: str
    family: str
    coord: int
    order: int
    tag: tuple = ()

    def sort_key(self):
        return (_KIND_RANK[self.kind], _FAMILY_RANK[self.family],
                self.order, self.coord, self.tag)

    @property
    def weight(self) -> int:
        if self.kind in (DIFF, LOGDIFF, LOGSYM):
            return self.order
        return 0

    def __str__(self) -> str:
        return var_name(self)

    __repr__ = __str__


@lru_cache(maxsize=None)
def _intern(kind, family, coord, order, tag) -> Variable:
    return Variable(kind, family, coord, order, tag)


def x_var(j: int, order: int = 0) -> Variable:
    """x_j (order 0) or d^order x_j."""
    if j < 1:
        raise ValueError("x coordinates are indexed from 1")
    if order == 0:
        return _intern(BASE, "x", j, 0, ())
    return _intern(DIFF, "x", j, order, ())


def z_var(j: int, order: int = 0) -> Variable:
    """z_j (order 0) or d^order z_j."""
    if j < 0:
        raise ValueError("z coordinates are indexed from 0")
    if order == 0:
        return _intern(BASE, "z", j, 0, ())
    return _intern(DIFF, "z", j, order, ())


def xi_var(j: int, order: int) -> Variable:
    """xi^(order)_j = d^order log z_j, order >= 1."""
    if order < 1:
        raise ValueError("log differentials have order >= 1")
    return _intern(LOGDIFF, "z", j, order, ())


def alpha_var(nu: Sequence[int]) -> Variable:
    """The hypersurface coefficient alpha_nu as a first-class variable."""
    return _intern(ALPHA, "", 0, 0, tuple(int(c) for c in nu))


def nu_var(j: int) -> Variable:
    """Symbolic multi-index component nu_j."""
    return _intern(NU, "", j, 0, ())


def log_sym(i: int, order: int) -> Variable:
    """Registered log symbol: d^order log F_i."""
    if order < 1:
        raise ValueError("log symbols have order >= 1")
    return _intern(LOGSYM, "", i, order, ())


def var_name(v: Variable) -> str:
    if v.kind == BASE:
        return f"{v.family}{v.coord}"
    if v.kind == DIFF:
        prefix = "d" if v.order == 1 else f"d{v.order}"
        return f"{prefix}{v.family}{v.coord}"
    if v.kind == LOGDIFF:
        return f"xi{v.order}_{v.coord}"
    if v.kind == ALPHA:
        return "a[" + ",".join(str(c) for c in v.tag) + "]"
    if v.kind == NU:
        return f"nu{v.coord}"
    if v.kind == LOGSYM:
        return f"L{v.coord}_{v.order}"
    raise ValueError(f"unknown kind {v.kind}")


# ---------------------------------------------------------------------------
# multi-indices
# ---------------------------------------------------------------------------

class MultiIndex(tuple):
    """Tuple of nonnegative integer exponents.

    Length n+1 in homogeneous mode, n in inhomogeneous mode.  |nu| is the sum
    of the components.
    """

    def __new__(cls, components: Iterable[int]):
        comps = tuple(int(c) for c in components)
        if any(c < 0 for c in comps):
            raise ValueError(f"multi-index components must be >= 0: {comps}")
        return super().__new__(cls, comps)

    @property
    def degree(self) -> int:
        return sum(self)

    def add(self, other: Sequence[int]) -> "MultiIndex":
        return MultiIndex(a + b for a, b in zip(self, other, strict=True))

    def sub(self, other: Sequence[int]) -> "MultiIndex":
        return MultiIndex(a - b for a, b in zip(self, other, strict=True))

    def __repr__(self) -> str:
        return "(" + ",".join(str(c) for c in self) + ")"


def unit_index(length: int, p: int) -> MultiIndex:
    """e_p: all zero except a 1 in place p."""
    comps = [0] * length
    comps[p] = 1
    return MultiIndex(comps)


def multi_indices(length: int, degree: int) -> Iterator[MultiIndex]:
    """All multi-indices of the given length and total degree, lex order."""
    if length == 1:
        yield MultiIndex((degree,))
        return
    for first in range(degree, -1, -1):
        for rest in multi_indices(length - 1, degree - first):
            yield MultiIndex((first,) + tuple(rest))


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

Monomial = Tuple[Tuple[Variable, int], ...]   # sorted by Variable.sort_key
Terms = Dict[Monomial, Fraction]

ONE_MONO: Monomial = ()


def _mono(pairs: Iterable[Tuple[Variable, int]]) -> Monomial:
    filtered = [(v, e) for v, e in pairs if e != 0]
    filtered.sort(key=lambda p: p[0].sort_key())
    return tuple(filtered)


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps: Dict[Variable, int] = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return _mono(exps.items())


class DiffPoly:
    """Sparse exact-rational polynomial in jet variables.

    Immutable by convention: no method mutates ``terms`` after construction,
    so values may be shared freely.  Equality is dict equality of the term
    maps; no stored coefficient is zero.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        clean: Terms = {}
        if terms:
            for mono, coeff in terms.items():
                if coeff:
                    clean[mono] = coeff if isinstance(coeff, Fraction) else Fraction(coeff)
        self.terms = clean
        self._hash = None

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "DiffPoly":
        return _ZERO

    @staticmethod
    def const(c) -> "DiffPoly":
        c = Fraction(c)
        if not c:
            return _ZERO
        return DiffPoly({ONE_MONO: c})

    @staticmethod
    def var(v: Variable, exp: int = 1) -> "DiffPoly":
        if exp == 0:
            return DiffPoly.const(1)
        return DiffPoly({((v, exp),): Fraction(1)})

    @staticmethod
    def monomial(pairs: Iterable[Tuple[Variable, int]], coeff=1) -> "DiffPoly":
        return DiffPoly({_mono(pairs): Fraction(coeff)})

    # -- predicates and views ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, DiffPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == DiffPoly.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def variables(self) -> set:
        out = set()
        for mono in self.terms:
            for v, _ in mono:
                out.add(v)
        return out

    def constant_term(self) -> Fraction:
        return self.terms.get(ONE_MONO, Fraction(0))

    def as_constant(self) -> Fraction:
        """The value of a constant polynomial; raises if not constant."""
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and ONE_MONO in self.terms:
            return self.terms[ONE_MONO]
        raise ValueError(f"not a constant polynomial: {self}")

    # -- ring operations -----------------------------------------------------

    def __add__(self, other) -> "DiffPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            acc = out.get(mono)
            if acc is None:
                out[mono] = coeff
            else:
                acc = acc + coeff
                if acc:
                    out[mono] = acc
                else:
                    del out[mono]
        return _raw(out)

    __radd__ = __add__

    def __neg__(self) -> "DiffPoly":
        return _raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "DiffPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "DiffPoly":
        return _coerce(other) - self

    def __mul__(self, other) -> "DiffPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.terms or not other.terms:
            return _ZERO
        out: Terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _mono_mul(m1, m2)
                c = c1 * c2
                acc = out.get(mono)
                if acc is None:
                    out[mono] = c
                else:
                    acc = acc + c
                    if acc:
                        out[mono] = acc
                    else:
                        del out[mono]
        return _raw(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "DiffPoly":
        if n < 0:
            raise ValueError("negative power of a DiffPoly")
        result = DiffPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def scale(self, c) -> "DiffPoly":
        c = Fraction(c)
        if not c:
            return _ZERO
        return _raw({m: c * k for m, k in self.terms.items()})

    # -- calculus ------------------------------------------------------------

    def partial(self, v: Variable) -> "DiffPoly":
        """Partial derivative with respect to a single variable."""
        out: Terms = {}
        for mono, coeff in self.terms.items():
            for i, (w, e) in enumerate(mono):
                if w == v:
                    rest = mono[:i] + ((w, e - 1),) + mono[i + 1:] if e > 1 \
                        else mono[:i] + mono[i + 1:]
                    c = coeff * e
                    acc = out.get(rest)
                    out[rest] = c if acc is None else acc + c
                    break
        return DiffPoly(out)

    def substitute(self, mapping: Mapping[Variable, "DiffPoly"]) -> "DiffPoly":
        """Replace each mapped variable by a polynomial, exactly."""
        result = _ZERO
        pow_cache: Dict[Tuple[Variable, int], DiffPoly] = {}
        for mono, coeff in self.terms.items():
            piece = DiffPoly({ONE_MONO: coeff})
            plain: list = []
            for v, e in mono:
                if v in mapping:
                    key = (v, e)
                    p = pow_cache.get(key)
                    if p is None:
                        p = mapping[v] ** e
                        pow_cache[key] = p
                    piece = piece * p
                else:
                    plain.append((v, e))
            if plain:
                piece = piece * DiffPoly.monomial(plain)
            result = result + piece
        return result

    def substitute_values(self, values: Mapping[Variable, Fraction]) -> "DiffPoly":
        """Replace mapped variables by exact scalars (faster than substitute)."""
        out: Terms = {}
        for mono, coeff in self.terms.items():
            c = coeff
            rest = []
            for v, e in mono:
                if v in values:
                    c = c * (Fraction(values[v]) ** e)
                    if not c:
                        break
                else:
                    rest.append((v, e))
            if not c:
                continue
            key = tuple(rest)
            acc = out.get(key)
            if acc is None:
                out[key] = c
            else:
                acc = acc + c
                if acc:
                    out[key] = acc
                else:
                    del out[key]
        return DiffPoly(out)

    # -- gradings --------------------------------------------------------------

    def weight_of(self, mono: Monomial) -> int:
        return sum(v.weight * e for v, e in mono)

    def max_order(self) -> int:
        """Largest differential order appearing (0 for order-free polys)."""
        orders = [v.order for mono in self.terms for v, _ in mono
                  if v.kind in (DIFF, LOGDIFF, LOGSYM)]
        return max(orders, default=0)

    def degree_in(self, pred: Callable[[Variable], bool]) -> int:
        """Max total exponent over terms of variables satisfying pred."""
        best = 0
        for mono in self.terms:
            d = sum(e for v, e in mono if pred(v))
            best = max(best, d)
        return best

    def coefficients_by(self, pred: Callable[[Variable], bool]) -> Dict[Monomial, "DiffPoly"]:
        """Group terms by the sub-monomial of variables satisfying pred.

        Returns {selected-sub-monomial: polynomial in the other variables}.
        """
        groups: Dict[Monomial, Terms] = {}
        for mono, coeff in self.terms.items():
            sel = tuple((v, e) for v, e in mono if pred(v))
            rest = tuple((v, e) for v, e in mono if not pred(v))
            groups.setdefault(sel, {})[rest] = coeff
        return {sel: DiffPoly(t) for sel, t in groups.items()}

    # -- display ---------------------------------------------------------------

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"DiffPoly({format_poly(self)})"


def _raw(terms: Terms) -> DiffPoly:
    p = DiffPoly.__new__(DiffPoly)
    p.terms = terms
    p._hash = None
    return p


def _coerce(value) -> DiffPoly:
    if isinstance(value, DiffPoly):
        return value
    if isinstance(value, (int, Fraction)):
        return DiffPoly.const(value)
    return NotImplemented


_ZERO = DiffPoly()


# ---------------------------------------------------------------------------
# grading operations
# ---------------------------------------------------------------------------

class GradingError(ValueError):
    """A polynomial violates a required weight/degree grading."""


def weight(p: DiffPoly) -> int:
    """The common weight of all terms, where d^l and xi^(l) weigh l.

    Raises GradingError("not-weight-homogeneous") when terms disagree and
    ValueError on the zero polynomial.
    """
    if p.is_zero():
        raise ValueError("weight of the zero polynomial is undefined")
    weights = {p.weight_of(m) for m in p.terms}
    if len(weights) != 1:
        raise GradingError(f"not-weight-homogeneous: weights {sorted(weights)}")
    return weights.pop()


def is_weight_homogeneous(p: DiffPoly, m: int | None = None) -> bool:
    if p.is_zero():
        return True
    weights = {p.weight_of(mono) for mono in p.terms}
    if len(weights) != 1:
        return False
    return m is None or weights.pop() == m


def degree_in_base(p: DiffPoly) -> int:
    """Maximum total exponent of base-coordinate variables over terms."""
    if p.is_zero():
        raise ValueError("degree of the zero polynomial is undefined")
    return p.degree_in(lambda v: v.kind == BASE)


# ---------------------------------------------------------------------------
# total derivative
# ---------------------------------------------------------------------------

def total_derivative(p: DiffPoly, z_rule: str = "diff") -> DiffPoly:
    """Apply the formal total derivative d once.

    Rules: d^l x_j -> d^(l+1) x_j, xi^(l)_j -> xi^(l+1)_j, and log symbols
    L_i^(l) -> L_i^(l+1).  Base coordinates follow their family: d(x_j) =
    dx_j always; d(z_j) = dz_j under the plain rule, or z_j * xi^(1)_j under
    the logarithmic chain-rule realization (``z_rule="log"``).  alpha and nu
    variables are constants.
    """
    out = _ZERO
    for mono, coeff in p.terms.items():
        for i, (v, e) in enumerate(mono):
            dv = _d_of_var(v, z_rule)
            if dv is None:
                continue
            rest = list(mono[:i]) + ([(v, e - 1)] if e > 1 else []) + list(mono[i + 1:])
            out = out + dv * DiffPoly.monomial(rest, coeff * e)
    return out


def _d_of_var(v: Variable, z_rule: str) -> DiffPoly | None:
    if v.kind == BASE:
        if v.family == "z" and z_rule == "log":
            return DiffPoly.monomial([(v, 1), (xi_var(v.coord, 1), 1)])
        return DiffPoly.var(_intern(DIFF, v.family, v.coord, 1, ()))
    if v.kind == DIFF:
        return DiffPoly.var(_intern(DIFF, v.family, v.coord, v.order + 1, ()))
    if v.kind == LOGDIFF:
        return DiffPoly.var(xi_var(v.coord, v.order + 1))
    if v.kind == LOGSYM:
        return DiffPoly.var(log_sym(v.coord, v.order + 1))
    return None   # alpha, nu: constants


def iterated_derivative(p: DiffPoly, k: int, z_rule: str = "diff") -> DiffPoly:
    for _ in range(k):
        p = total_derivative(p, z_rule=z_rule)
    return p


# ---------------------------------------------------------------------------
# homogenization (x <-> z)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _quotient_jet(j: int, order: int) -> DiffPoly:
    """z_0^(order+1) * d^order (z_j / z_0) as a polynomial in d^l z.

    Recursion: H_0 = z_j, H_{l+1} = z_0 * d(H_l) - (l+1) * dz_0 * H_l.
    Each H_l is homogeneous of degree l+1 in all variables jointly and of
    weight l in the differentials.
    """
    if order == 0:
        return DiffPoly.var(z_var(j))
    prev = _quotient_jet(j, order - 1)
    return (DiffPoly.var(z_var(0)) * total_derivative(prev)
            - DiffPoly.var(z_var(0, 1)).scale(order) * prev)


def homogenize_jet(q: DiffPoly, m0: int, m: int) -> DiffPoly:
    """z_0^(m0+2m) * q rewritten as a polynomial in z_j and d^l z_j.

    ``q`` must be a polynomial in x_j / d^l x_j with degree_in_base <= m0 and
    weight m.  The result is jointly homogeneous of degree m0 + 2m.
    """
    if q.is_zero():
        return q
    if not is_weight_homogeneous(q, m):
        raise GradingError(f"grading-violation: weight is not {m}")
    if degree_in_base(q) > m0:
        raise GradingError(f"grading-violation: base degree exceeds {m0}")
    total_power = m0 + 2 * m
    z0 = DiffPoly.var(z_var(0))
    out = _ZERO
    for mono, coeff in q.terms.items():
        piece = DiffPoly.const(coeff)
        used = 0
        for v, e in mono:
            if v.family != "x":
                raise GradingError(f"grading-violation: non-x variable {v}")
            piece = piece * (_quotient_jet(v.coord, v.order) ** e)
            used += (v.order + 1) * e
        if used > total_power:
            raise GradingError("grading-violation: z0 budget exceeded")
        out = out + piece * (z0 ** (total_power - used))
    return out


def dehomogenize_jet(p: DiffPoly) -> DiffPoly:
    """Set z_0 = 1, d^l z_0 = 0, and rename z_j -> x_j, d^l z_j -> d^l x_j."""
    mapping: Dict[Variable, DiffPoly] = {}
    for v in p.variables():
        if v.family != "z" or v.kind == LOGDIFF:
            raise GradingError(f"grading-violation: not a plain z-polynomial: {v}")
        if v.coord == 0:
            mapping[v] = DiffPoly.const(1) if v.order == 0 else _ZERO
        else:
            mapping[v] = DiffPoly.var(x_var(v.coord, v.order))
    return p.substitute(mapping)


# ---------------------------------------------------------------------------
# jet evaluation
# ---------------------------------------------------------------------------

class InsufficientTruncationError(ValueError):
    """A germ's truncation order is below the differential order required."""


def evaluate_at_jet(p: DiffPoly, germ: Mapping[int, "object"], zeta0) -> Fraction:
    """Evaluate p at the jet of a parametrized germ at zeta0, exactly.

    ``germ`` maps coordinate index j to a polynomial germ phi_j (an object
    with ``derivative_value(order, zeta0) -> Fraction``; see
    ``jetdiff.series.Germ``).  x_j goes to phi_j(zeta0), d^l x_j to the l-th
    derivative value of phi_j at zeta0.
    """
    zeta0 = Fraction(zeta0)
    total = Fraction(0)
    cache: Dict[Tuple[int, int], Fraction] = {}
    for mono, coeff in p.terms.items():
        value = coeff
        for v, e in mono:
            if v.kind not in (BASE, DIFF) or v.family != "x":
                raise ValueError(f"evaluate_at_jet: unsupported variable {v}")
            if v.coord not in germ:
                raise ValueError(f"evaluate_at_jet: no germ for coordinate {v.coord}")
            key = (v.coord, v.order)
            val = cache.get(key)
            if val is None:
                val = germ[v.coord].derivative_value(v.order, zeta0)
                cache[key] = val
            value *= val ** e
            if not value:
                break
        total += value
    return total


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<var>"
    r"d(?P<dord>\d*)(?P<dfam>[xz])(?P<dcoord>\d+)"
    r"|(?P<bfam>[xz])(?P<bcoord>\d+)"
    r"|xi(?P<xord>\d+)_(?P<xcoord>\d+)"
    r"|a\[(?P<atag>[\d,\s]*)\]"
    r"|nu(?P<ncoord>\d+)"
    r"|L(?P<lcoord>\d+)_(?P<lord>\d+)"
    r")"
    r"|(?P<num>\d+(?:/\d+)?)"
    r"|(?P<op>[-+*^()])"
    r")"
)


class PolyParseError(ValueError):
    """Raised on malformed polynomial text; carries the failing position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if not match or match.end() == match.start():
            if text[pos:].strip():
                raise PolyParseError(f"unexpected character {text[pos]!r}", pos)
            break
        tokens.append((match, pos))
        pos = match.end()
    return tokens


def _var_from_match(m) -> Variable:
    if m.group("dfam"):
        order = int(m.group("dord")) if m.group("dord") else 1
        fam = m.group("dfam")
        coord = int(m.group("dcoord"))
        return x_var(coord, order) if fam == "x" else z_var(coord, order)
    if m.group("bfam"):
        fam, coord = m.group("bfam"), int(m.group("bcoord"))
        return x_var(coord) if fam == "x" else z_var(coord)
    if m.group("xord"):
        return xi_var(int(m.group("xcoord")), int(m.group("xord")))
    if m.group("atag") is not None:
        tag = tuple(int(c) for c in m.group("atag").split(",") if c.strip())
        return alpha_var(tag)
    if m.group("ncoord"):
        return nu_var(int(m.group("ncoord")))
    return log_sym(int(m.group("lcoord")), int(m.group("lord")))


def parse_poly(text: str) -> DiffPoly:
    """Parse the text polynomial format; ``parse_poly(format_poly(p)) == p``."""
    tokens = _tokenize(text)
    result = _ZERO
    sign = 1
    coeff: Fraction | None = None
    factors: list = []
    i = 0

    def flush(position: int):
        nonlocal result, sign, coeff, factors
        if coeff is None and not factors:
            raise PolyParseError("empty term", position)
        c = Fraction(coeff if coeff is not None else 1) * sign
        term = DiffPoly.const(c)
        for v, e in factors:
            term = term * DiffPoly.var(v, e)
        result = result + term
        sign, coeff, factors = 1, None, []

    if not tokens:
        raise PolyParseError("empty input", 0)
    pending = False   # a term is being accumulated
    while i < len(tokens):
        m, pos = tokens[i]
        if m.group("op") in ("+", "-"):
            if pending:
                flush(pos)
                pending = False
            if m.group("op") == "-":
                sign = -sign
            i += 1
            continue
        if m.group("op") == "*":
            i += 1
            continue
        if m.group("op") in ("(", ")", "^"):
            raise PolyParseError(f"unexpected {m.group('op')!r}", pos)
        if m.group("num"):
            parts = m.group("num").split("/")
            value = Fraction(int(parts[0]), int(parts[1])) if len(parts) == 2 \
                else Fraction(int(parts[0]))
            coeff = value if coeff is None else coeff * value
            pending = True
            i += 1
            continue
        v = _var_from_match(m)
        exp = 1
        if i + 1 < len(tokens) and tokens[i + 1][0].group("op") == "^":
            if i + 2 >= len(tokens) or not tokens[i + 2][0].group("num"):
                raise PolyParseError("missing exponent after '^'", tokens[i + 1][1])
            exp = int(tokens[i + 2][0].group("num"))
            i += 2
        factors.append((v, exp))
        pending = True
        i += 1
    if pending:
        flush(len(text))
    elif sign != 1 or coeff is not None:
        raise PolyParseError("dangling sign or coefficient", len(text))
    return result


def format_poly(p: DiffPoly) -> str:
    """Canonical text form: terms sorted by monomial, '*'-separated factors."""
    if p.is_zero():
        return "0"
    items = sorted(p.terms.items(),
                   key=lambda kv: tuple((v.sort_key(), e) for v, e in kv[0]))
    parts = []
    for idx, (mono, coeff) in enumerate(items):
        sign = "-" if coeff < 0 else "+"
        mag = -coeff if coeff < 0 else coeff
        factors = []
        if mag != 1 or not mono:
            factors.append(str(mag))
        for v, e in mono:
            factors.append(var_name(v) if e == 1 else f"{var_name(v)}^{e}")
        body = "*".join(factors)
        if idx == 0:
            parts.append(body if sign == "+" else "-" + body)
        else:
            parts.append(f" {sign} {body}")
    return "".join(parts)
