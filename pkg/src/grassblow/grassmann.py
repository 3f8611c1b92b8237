"""Grassmannian core: index combinatorics, Plucker coordinates, charts, strata.

Conventions fixed here and used everywhere else:

  * A point of G(p,n) is represented by a full-rank p x n matrix of exact
    rationals (GrassPoint); predicates on points are invariant under row
    operations and tested as such.
  * An index tuple I = (i_1, ..., i_p) is strictly decreasing with entries
    in [1, n].  The Plucker coordinate P_I is the p x p minor on the columns
    of I taken in *increasing* order left to right.
  * The ambient space splits as the span of the first s coordinates plus the
    span of the last n-s; the weight of I counts entries exceeding s.
  * ProjPoint stores a projective vector canonically: coprime integers with
    the first nonzero entry positive, labels in ascending lexicographic
    order of the (decreasing) index tuples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from math import comb, gcd, lcm

from .exactpoly import mpq

from .errors import (
    DimensionError,
    InvalidGroupElementError,
    InvalidParameterError,
    RangeError,
    UndefinedPointError,
)
from .exactpoly import rat_str


@dataclass(frozen=True)
class Params:
    """Ambient data (s, p, n) with the derived rank bound r."""

    s: int
    p: int
    n: int
    unnormalized: bool = field(default=False, compare=False)

    def __post_init__(self):
        if not (0 < self.p < self.n and 0 < self.s < self.n):
            raise InvalidParameterError(f"need 0 < p < n and 0 < s < n, got {self}")
        if not self.unnormalized and not (2 * self.p <= self.n <= 2 * self.s):
            raise InvalidParameterError(
                f"normalized parameters require 2p <= n <= 2s, got (s,p,n)=({self.s},{self.p},{self.n})"
            )

    @property
    def r(self) -> int:
        return min(self.s, self.n - self.s, self.p, self.n - self.p)


# -- index tuples --------------------------------------------------------


def index_tuples(p: int, n: int) -> list[tuple[int, ...]]:
    """All strictly decreasing p-tuples from [1, n], in canonical order."""
    return sorted(tuple(reversed(c)) for c in combinations(range(1, n + 1), p))


def enum_index_set(par: Params) -> list[tuple[int, ...]]:
    return index_tuples(par.p, par.n)


def weight(I: tuple[int, ...], par: Params) -> int:
    """Number of entries of I exceeding the split position s."""
    return sum(1 for i in I if i > par.s)


def enum_stratum(par: Params, k: int) -> list[tuple[int, ...]]:
    if not 0 <= k <= par.r:
        raise RangeError(f"stratum index {k} outside [0, {par.r}]")
    return [I for I in index_tuples(par.p, par.n) if weight(I, par) == k]


# -- exact rational matrices (module-private helpers) ---------------------


def _mat(rows):
    return tuple(tuple(mpq(x) for x in row) for row in rows)


def mat_mul(a, b):
    bt = list(zip(*b))
    return tuple(
        tuple(sum((x * y for x, y in zip(row, col)), mpq(0)) for col in bt) for row in a
    )


def mat_rank(rows) -> int:
    if not rows:
        return 0
    m = [list(r) for r in rows]
    nr, nc = len(m), len(m[0])
    rank = 0
    for c in range(nc):
        piv = None
        for i in range(rank, nr):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(rank + 1, nr):
            if m[i][c] != 0:
                f = m[i][c] / m[rank][c]
                for j in range(c, nc):
                    m[i][j] -= f * m[rank][j]
        rank += 1
        if rank == nr:
            break
    return rank


def mat_det(rows):
    n = len(rows)
    m = [list(r) for r in rows]
    det = mpq(1)
    for k in range(n):
        piv = None
        for i in range(k, n):
            if m[i][k] != 0:
                piv = i
                break
        if piv is None:
            return mpq(0)
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            det = -det
        det *= m[k][k]
        for i in range(k + 1, n):
            f = m[i][k] / m[k][k]
            for j in range(k, n):
                m[i][j] -= f * m[k][j]
    return det


def _int_det(rows, cols, cache, matrix):
    """Minor of the integer matrix on `rows x cols` by cached expansion."""
    key = (rows, cols)
    got = cache.get(key)
    if got is not None:
        return got
    if len(rows) == 1:
        val = matrix[rows[0]][cols[0]]
    else:
        val = 0
        sign = 1
        r0 = rows[0]
        rest = rows[1:]
        for idx, c in enumerate(cols):
            a = matrix[r0][c]
            if a:
                val += sign * a * _int_det(rest, cols[:idx] + cols[idx + 1 :], cache, matrix)
            sign = -sign
    cache[key] = val
    return val


# -- points ---------------------------------------------------------------


class GrassPoint:
    """A p x n exact-rational matrix of rank exactly p."""

    __slots__ = ("rows", "p", "n")

    def __init__(self, rows):
        self.rows = _mat(rows)
        self.p = len(self.rows)
        if self.p == 0:
            raise DimensionError("empty matrix")
        self.n = len(self.rows[0])
        if any(len(r) != self.n for r in self.rows):
            raise DimensionError("ragged matrix")
        if self.p > self.n:
            raise DimensionError(f"more rows than columns: {self.p} x {self.n}")
        if mat_rank(self.rows) != self.p:
            raise InvalidParameterError("matrix does not have full row rank")

    def column_block(self, j0: int, j1: int):
        """Columns j0..j1-1 (0-based) as a tuple of row tuples."""
        return tuple(row[j0:j1] for row in self.rows)

    def __eq__(self, other):
        return isinstance(other, GrassPoint) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"GrassPoint({[[rat_str(x) for x in row] for row in self.rows]})"

    def to_json(self) -> str:
        return json.dumps([[rat_str(x) for x in row] for row in self.rows])


class ProjPoint:
    """A projective vector over an ordered label list, stored canonically.

    Canonical form: integer coordinates, coprime as a vector, first nonzero
    entry positive.  Equality is structural equality.
    """

    __slots__ = ("labels", "coords")

    def __init__(self, labels, coords):
        labels = tuple(tuple(l) if isinstance(l, (tuple, list)) else l for l in labels)
        if len(labels) != len(coords):
            raise DimensionError("label/coordinate length mismatch")
        qs = [mpq(c) for c in coords]
        if all(q == 0 for q in qs):
            raise UndefinedPointError("all projective coordinates vanish")
        mult = lcm(*[int(q.denominator) for q in qs]) if qs else 1
        ints = [int(q * mult) for q in qs]
        g = 0
        for v in ints:
            g = gcd(g, v)
        ints = [v // g for v in ints]
        first = next(v for v in ints if v)
        if first < 0:
            ints = [-v for v in ints]
        self.labels = labels
        self.coords = tuple(ints)

    def __eq__(self, other):
        return (
            isinstance(other, ProjPoint)
            and self.labels == other.labels
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash((self.labels, self.coords))

    def __getitem__(self, label):
        return self.coords[self.labels.index(label)]

    def support(self):
        return [l for l, c in zip(self.labels, self.coords) if c]

    def __repr__(self):
        inside = ", ".join(str(c) for c in self.coords)
        return f"[{inside}]"

    def to_json(self) -> str:
        return json.dumps(
            {
                "labels": [list(l) if isinstance(l, tuple) else l for l in self.labels],
                "coords": [rat_str(c) for c in self.coords],
            }
        )


# -- Plucker coordinates --------------------------------------------------


def raw_minors(x: GrassPoint) -> list:
    """All Plucker minors of x as exact rationals, in canonical label order.

    The relative scale between minors is preserved exactly (one global
    clearing factor), which is what the torus-flow grading relies on.
    """
    mult = 1
    for row in x.rows:
        for v in row:
            mult = lcm(mult, int(v.denominator))
    im = [[int(v * mult) for v in row] for row in x.rows]
    cache: dict = {}
    rows_key = tuple(range(x.p))
    scale = mpq(1, mult) ** x.p
    out = []
    for I in index_tuples(x.p, x.n):
        cols = tuple(c - 1 for c in sorted(I))
        out.append(_int_det(rows_key, cols, cache, im) * scale)
    return out


def plucker(x: GrassPoint) -> ProjPoint:
    return ProjPoint(index_tuples(x.p, x.n), raw_minors(x))


def stratum_projection(v: ProjPoint, par: Params, k: int) -> ProjPoint:
    """Restrict a full Plucker vector to the weight-k labels."""
    full = tuple(index_tuples(par.p, par.n))
    if v.labels != full:
        raise DimensionError("projective point is not over the full label set")
    labels = enum_stratum(par, k)
    coords = [v[I] for I in labels]
    if all(c == 0 for c in coords):
        raise UndefinedPointError(
            f"every weight-{k} coordinate vanishes; the projection is undefined here",
            stratum=k,
        )
    return ProjPoint(labels, coords)


def plucker_oracle(v: ProjPoint):
    """Reconstruct a GrassPoint with plucker(x) == v, or None if impossible.

    Reads matrix entries off coordinate ratios in the chart of the first
    nonzero label, then certifies by re-computing the Plucker vector.
    """
    p = len(v.labels[0])
    n = v.labels[-1][0]
    if list(v.labels) != index_tuples(p, n):
        raise DimensionError("labels are not a full canonical Plucker label set")

    def lookup(seq):
        # coordinate of an arbitrary-order column sequence, with the sign of
        # the permutation sorting it increasingly
        perm = sorted(range(len(seq)), key=lambda i: seq[i])
        inv = sum(
            1
            for a in range(len(seq))
            for b in range(a + 1, len(seq))
            if perm[a] > perm[b]
        )
        label = tuple(sorted(seq, reverse=True))
        return (-1) ** inv * v[label]

    pivot = next(I for I, c in zip(v.labels, v.coords) if c)
    cols = sorted(pivot)  # ascending; row k pairs with column cols[k]
    denom = v[pivot]
    rows = []
    for k in range(p):
        row = []
        for j in range(1, n + 1):
            if j in cols:
                row.append(mpq(1) if cols[k] == j else mpq(0))
            else:
                seq = cols[:k] + [j] + cols[k + 1 :]
                row.append(mpq(lookup(seq), denom))
        rows.append(row)
    x = GrassPoint(rows)
    if plucker(x) != v:
        return None
    return x


# -- block charts and the group action ------------------------------------


def chart_matrix_ul(par: Params, l: int, Z, X, Y, W) -> GrassPoint:
    """Assemble the banded chart matrix [[Z 0 I X], [Y I 0 W]].

    Block shapes: Z is l x (s-p+l), X is l x (n-s-l), Y is (p-l) x (s-p+l),
    W is (p-l) x (n-s-l); the identity bands sit at columns s-p+l+1..s
    (lower) and s+1..s+l (upper).
    """
    s, p, n = par.s, par.p, par.n
    if not 0 <= l <= par.r:
        raise RangeError(f"band index {l} outside [0, {par.r}]")

    def check(block, nr, nc, name):
        block = [list(map(mpq, row)) for row in block]
        if len(block) != nr or any(len(row) != nc for row in block):
            raise DimensionError(f"block {name} must be {nr} x {nc}")
        return block

    Z = check(Z, l, s - p + l, "Z")
    X = check(X, l, n - s - l, "X")
    Y = check(Y, p - l, s - p + l, "Y")
    W = check(W, p - l, n - s - l, "W")
    rows = []
    for i in range(l):
        row = list(Z[i]) + [mpq(0)] * (p - l)
        row += [mpq(1) if c == i else mpq(0) for c in range(l)]
        row += list(X[i])
        rows.append(row)
    for i in range(p - l):
        row = list(Y[i]) + [mpq(1) if c == i else mpq(0) for c in range(p - l)]
        row += [mpq(0)] * l
        row += list(W[i])
        rows.append(row)
    return GrassPoint(rows)


def gl_act(g, x: GrassPoint, par: Params) -> GrassPoint:
    """Right action of a block pair (g1, g2) on column blocks.

    Convention (fixed once): the new matrix is x . diag(g1, g2)^T, so the
    first s columns transform by g1 and the last n-s by g2.
    """
    g1, g2 = _mat(g[0]), _mat(g[1])
    s = par.s
    if len(g1) != s or any(len(r) != s for r in g1):
        raise DimensionError(f"g1 must be {s} x {s}")
    if len(g2) != x.n - s or any(len(r) != x.n - s for r in g2):
        raise DimensionError(f"g2 must be {x.n - s} x {x.n - s}")
    if mat_det(g1) == 0 or mat_det(g2) == 0:
        raise InvalidGroupElementError("block is singular")
    left = mat_mul(x.column_block(0, s), tuple(zip(*g1)))
    right = mat_mul(x.column_block(s, x.n), tuple(zip(*g2)))
    return GrassPoint([lr + rr for lr, rr in zip(left, right)])


# -- determinantal strata --------------------------------------------------


def stratum_membership(x: GrassPoint, par: Params, k: int) -> tuple[bool, bool]:
    """Membership of x in the k-th determinantal stratum, two ways.

    plucker_test: every weight-k minor vanishes.
    rank_test:    the projection to the second factor has rank <= k-1, or the
                  projection to the first factor has rank <= p-k-1.
    The two are computed independently; their agreement is the mathematical
    claim under test, not a property of the implementation.
    """
    if not 0 <= k <= par.r:
        raise RangeError(f"stratum index {k} outside [0, {par.r}]")
    minors = raw_minors(x)
    labels = index_tuples(x.p, x.n)
    plucker_test = all(
        m == 0 for m, I in zip(minors, labels) if weight(I, par) == k
    )
    rank_e2 = mat_rank(x.column_block(par.s, x.n))
    rank_e1 = mat_rank(x.column_block(0, par.s))
    rank_test = rank_e2 <= k - 1 or rank_e1 <= par.p - k - 1
    return plucker_test, rank_test


def total_count(par: Params) -> int:
    return comb(par.n, par.p)
