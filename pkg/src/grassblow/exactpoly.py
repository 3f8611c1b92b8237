"""Exact sparse multivariate polynomial arithmetic over the integers.

Representation:

    Variable  -- a frozen (kind, index) symbol.  ('a', (1, 2)) prints as
                 a[1,2], ('xi', (2, 1, 3)) as xi[2;1,3], ('t', ()) as t.
                 Variables are totally ordered by (kind, index).
    Monomial  -- tuple of (Variable, exponent) pairs sorted by variable,
                 all exponents > 0; () is the constant monomial.
    MultiPoly -- {Monomial: int} with no zero coefficients stored; the zero
                 polynomial is the empty dict.

All polynomial arithmetic stays in Z[variables]; exact rationals enter only
through `substitute`, which evaluates at a rational point.  The rational
scalar type is gmpy2.mpq when available and fractions.Fraction otherwise;
both store lowest terms with a positive denominator.  There is no floating
point anywhere in this module.

The monomial order used for leading terms and canonical printing is graded
lexicographic: higher total degree first, ties broken by comparing exponents
variable by variable in ascending Variable order (the smallest variable is
the most significant).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

try:
    from gmpy2 import mpq
except ImportError:  # pragma: no cover - exercised only without gmpy2
    from fractions import Fraction as mpq

from .errors import DimensionError, DivisibilityError, MissingAssignmentError

Rational = mpq


def rat(num, den=1):
    """Exact rational; always stored in lowest terms with positive denominator."""
    return mpq(num, den)


def rat_str(q) -> str:
    q = mpq(q)
    return f"{q.numerator}/{q.denominator}"


_RAT_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")


def rat_from_str(s: str):
    m = _RAT_RE.match(s.strip())
    if m is None:
        raise ValueError(f"not a rational literal: {s!r}")
    return mpq(int(m.group(1)), int(m.group(2) or 1))


@dataclass(frozen=True, order=True)
class Variable:
    kind: str
    index: tuple[int, ...] = ()

    @property
    def name(self) -> str:
        if not self.index:
            return self.kind
        if self.kind == "xi":
            k, i, j = self.index
            return f"xi[{k};{i},{j}]"
        return f"{self.kind}[{','.join(map(str, self.index))}]"

    def __repr__(self):
        return self.name


_VAR_RE = re.compile(r"^([a-z]+)(?:\[(\d+;)?(\d+(?:,\d+)*)\])?$")


def var_from_name(name: str) -> Variable:
    m = _VAR_RE.match(name.strip())
    if m is None:
        raise ValueError(f"not a variable name: {name!r}")
    kind, layer, idx = m.groups()
    index = tuple(int(x) for x in idx.split(",")) if idx else ()
    if layer is not None:
        index = (int(layer[:-1]),) + index
    return Variable(kind, index)


# -- monomials ----------------------------------------------------------

Monomial = tuple  # tuple[tuple[Variable, int], ...], sorted, exponents > 0

ONE_MONO: Monomial = ()


def mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def mono_div(m1: Monomial, m2: Monomial):
    """m1 / m2, or None when m2 does not divide m1."""
    if not m2:
        return m1
    d = dict(m1)
    for v, e in m2:
        r = d.get(v, 0) - e
        if r < 0:
            return None
        if r == 0:
            d.pop(v, None)
        else:
            d[v] = r
    return tuple(sorted(d.items()))


def mono_deg(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_str(m: Monomial) -> str:
    if not m:
        return "1"
    return "*".join(v.name if e == 1 else f"{v.name}^{e}" for v, e in m)


# -- polynomials --------------------------------------------------------


class MultiPoly:
    """Immutable sparse polynomial with integer coefficients."""

    __slots__ = ("_t",)

    def __init__(self, terms=None):
        t = {}
        if terms:
            for m, c in terms.items():
                if c:
                    t[m] = c
        self._t = t

    # construction helpers

    @staticmethod
    def zero() -> "MultiPoly":
        return MultiPoly()

    @staticmethod
    def const(c: int) -> "MultiPoly":
        return MultiPoly({ONE_MONO: int(c)})

    @staticmethod
    def var(v: Variable) -> "MultiPoly":
        return MultiPoly({((v, 1),): 1})

    @staticmethod
    def monomial(m: Monomial, c: int = 1) -> "MultiPoly":
        return MultiPoly({m: int(c)})

    # inspection

    def is_zero(self) -> bool:
        return not self._t

    def as_const(self):
        """The integer value if the polynomial is constant, else None."""
        if not self._t:
            return 0
        if len(self._t) == 1 and ONE_MONO in self._t:
            return self._t[ONE_MONO]
        return None

    def terms(self):
        return self._t.items()

    def num_terms(self) -> int:
        return len(self._t)

    def coeff(self, m: Monomial) -> int:
        return self._t.get(m, 0)

    def degree(self) -> int:
        if not self._t:
            return 0
        return max(mono_deg(m) for m in self._t)

    def variables(self) -> list[Variable]:
        vs = set()
        for m in self._t:
            for v, _ in m:
                vs.add(v)
        return sorted(vs)

    def degree_in(self, v: Variable) -> int:
        d = 0
        for m in self._t:
            for w, e in m:
                if w == v and e > d:
                    d = e
        return d

    # arithmetic

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, int):
            return MultiPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        t = dict(self._t)
        for m, c in other._t.items():
            s = t.get(m, 0) + c
            if s:
                t[m] = s
            else:
                t.pop(m, None)
        out = MultiPoly.__new__(MultiPoly)
        out._t = t
        return out

    __radd__ = __add__

    def __neg__(self):
        out = MultiPoly.__new__(MultiPoly)
        out._t = {m: -c for m, c in self._t.items()}
        return out

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self._t or not other._t:
            return MultiPoly()
        t = {}
        for m1, c1 in self._t.items():
            for m2, c2 in other._t.items():
                m = mono_mul(m1, m2)
                s = t.get(m, 0) + c1 * c2
                if s:
                    t[m] = s
                else:
                    t.pop(m, None)
        out = MultiPoly.__new__(MultiPoly)
        out._t = t
        return out

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = MultiPoly.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            return self._t == MultiPoly.const(other)._t
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self._t == other._t

    def __hash__(self):
        return hash(frozenset(self._t.items()))

    # ordering of terms (graded lex; see module docstring)

    def _sorted_terms(self):
        vs = self.variables()
        pos = {v: i for i, v in enumerate(vs)}

        def key(item):
            m, _ = item
            row = [0] * len(vs)
            for v, e in m:
                row[pos[v]] = e
            return (mono_deg(m), tuple(row))

        return sorted(self._t.items(), key=key, reverse=True)

    def leading_term(self):
        """(monomial, coefficient) of the graded-lex leading term."""
        if not self._t:
            raise ValueError("zero polynomial has no leading term")
        return self._sorted_terms()[0]

    def __str__(self):
        if not self._t:
            return "0"
        parts = []
        for m, c in self._sorted_terms():
            if m == ONE_MONO:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono_str(m)
            else:
                body = f"{abs(c)}*{mono_str(m)}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    def __repr__(self):
        return f"MultiPoly({self})"


def poly_var(kind: str, *index: int) -> MultiPoly:
    return MultiPoly.var(Variable(kind, tuple(index)))


# -- determinants -------------------------------------------------------


def poly_det(rows, max_side: int = 8) -> MultiPoly:
    """Exact determinant of a square matrix of MultiPoly.

    Cofactor expansion with minor caching up to side 5; fraction-free
    Bareiss elimination (exact division by the previous pivot) above that.
    """
    n = len(rows)
    for r in rows:
        if len(r) != n:
            raise DimensionError(f"matrix is not square: {len(r)} != {n}")
    if n > max_side:
        raise DimensionError(f"side {n} exceeds the configured bound {max_side}")
    if n == 0:
        return MultiPoly.const(1)
    if n <= 5:
        return _det_cofactor(rows)
    return _det_bareiss(rows)


def _det_cofactor(rows) -> MultiPoly:
    n = len(rows)
    memo: dict[tuple, MultiPoly] = {}

    def minor(cols: tuple) -> MultiPoly:
        i = n - len(cols)
        if not cols:
            return MultiPoly.const(1)
        got = memo.get(cols)
        if got is not None:
            return got
        acc = MultiPoly.zero()
        sign = 1
        for idx, c in enumerate(cols):
            a = rows[i][c]
            if not a.is_zero():
                sub = minor(cols[:idx] + cols[idx + 1 :])
                term = a * sub
                acc = acc + term if sign > 0 else acc - term
            sign = -sign
        memo[cols] = acc
        return acc

    return minor(tuple(range(n)))


def _det_bareiss(rows) -> MultiPoly:
    n = len(rows)
    m = [list(r) for r in rows]
    sign = 1
    prev = MultiPoly.const(1)
    for k in range(n - 1):
        if m[k][k].is_zero():
            for i in range(k + 1, n):
                if not m[i][k].is_zero():
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return MultiPoly.zero()
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = exact_divide(num, prev)
            m[i][k] = MultiPoly.zero()
        prev = m[k][k]
    d = m[n - 1][n - 1]
    return d if sign > 0 else -d


# -- exact division -----------------------------------------------------


def exact_divide(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """The quotient q with f = q*g, raising DivisibilityError otherwise."""
    if g.is_zero():
        raise DivisibilityError("division by the zero polynomial")
    if f.is_zero():
        return MultiPoly.zero()
    if g.num_terms() == 1:
        (mg, cg), = g.terms()
        out = {}
        for m, c in f.terms():
            md = mono_div(m, mg)
            if md is None or c % cg:
                raise DivisibilityError(
                    f"monomial {mono_str(mg)} does not divide term {c}*{mono_str(m)}"
                )
            out[md] = c // cg
        return MultiPoly(out)

    # fix one variable universe so the term order is stable during the loop
    vs = sorted(set(f.variables()) | set(g.variables()))
    pos = {v: i for i, v in enumerate(vs)}

    def key(m):
        row = [0] * len(vs)
        for v, e in m:
            row[pos[v]] = e
        return (mono_deg(m), tuple(row))

    mg = max(g._t, key=key)
    cg = g._t[mg]
    q: dict = {}
    r = f
    while not r.is_zero():
        mr = max(r._t, key=key)
        cr = r._t[mr]
        md = mono_div(mr, mg)
        if md is None or cr % cg:
            raise DivisibilityError("leading term not divisible; g does not divide f")
        c = cr // cg
        q[md] = q.get(md, 0) + c
        r = r - MultiPoly.monomial(md, c) * g
    return MultiPoly(q)


def common_monomial(polys) -> Monomial:
    """Largest monomial dividing every term of every (nonzero) polynomial."""
    mins: dict | None = None
    for f in polys:
        for m, _ in f.terms():
            d = dict(m)
            if mins is None:
                mins = d
            else:
                for v in list(mins):
                    e = d.get(v, 0)
                    if e == 0:
                        del mins[v]
                    elif e < mins[v]:
                        mins[v] = e
            if not mins:
                return ONE_MONO
    if mins is None:
        return ONE_MONO
    return tuple(sorted(mins.items()))


def integer_content(polys) -> int:
    g = 0
    for f in polys:
        for _, c in f.terms():
            g = math.gcd(g, c)
    return g if g else 1


# -- evaluation ---------------------------------------------------------


def substitute(f: MultiPoly, assignment) -> Rational:
    """Exact evaluation of f at the rational point given by `assignment`.

    Every variable occurring in f must be assigned; raises
    MissingAssignmentError otherwise.
    """
    total = mpq(0)
    cache: dict = {}
    for m, c in f.terms():
        val = mpq(c)
        for v, e in m:
            got = cache.get((v, e))
            if got is None:
                if v not in assignment:
                    raise MissingAssignmentError(f"no value for variable {v.name}")
                got = mpq(assignment[v]) ** e
                cache[(v, e)] = got
            val *= got
        total += val
    return total


def compile_poly(f: MultiPoly, var_pos: dict[Variable, int]):
    """Precompile f against a positional variable layout for fast evaluation."""
    return tuple(
        (c, tuple((var_pos[v], e) for v, e in m)) for m, c in f.terms()
    )


def eval_compiled(cp, vals, pow_cache: dict) -> Rational:
    total = mpq(0)
    for c, mono in cp:
        val = mpq(c)
        for i, e in mono:
            got = pow_cache.get((i, e))
            if got is None:
                got = vals[i] ** e
                pow_cache[(i, e)] = got
            val *= got
        total += val
    return total


# -- grading by one variable --------------------------------------------


def t_degree_split(f: MultiPoly, t: Variable) -> list[tuple[int, MultiPoly]]:
    """Write f = sum t^e * c_e with c_e independent of t, e ascending."""
    buckets: dict[int, dict] = {}
    for m, c in f.terms():
        e = 0
        rest = []
        for v, ve in m:
            if v == t:
                e = ve
            else:
                rest.append((v, ve))
        buckets.setdefault(e, {})[tuple(rest)] = c
    return [(e, MultiPoly(buckets[e])) for e in sorted(buckets)]
