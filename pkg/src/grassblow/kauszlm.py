"""Pivot-ratio chart algebra on the projective-space side and its comparison
with the Grassmannian blow-up.

The projective space P^{p(n-p)} with homogeneous coordinates
[x00 : x_ij] maps birationally to G(p,n) by sending a matrix X to the row
space of (X | x00 * I); composing with the blow-up's defining map gives a
second route onto the same product of projective spaces.  The chart algebra
on the projective-space side is generated by the ratios of the cumulative
Gaussian pivots t_i (reordered by the stage bijection), the row elimination
coefficients y[j,i] and the column elimination coefficients z[i,j].

Two independently computed routes are compared point by point:

  (A) numeric: chart coordinates -> pivot reconstruction -> matrix
      (X | x00*I) -> all Plucker strata;
  (B) symbolic: the same composite expanded once per chart as a vector of
      integer polynomials in the chart coordinates (denominators are pivot
      monomials and cleared projectively), then evaluated.

Exact projective equality of (A) and (B) on generic samples is the
commutativity check for the comparison diagram.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import gcd

from .exactpoly import mpq

from .charts import MultiProjPoint, kausz_total_map
from .errors import (
    DimensionError,
    InvalidParameterError,
    PivotFailureError,
    RangeError,
    UndefinedPointError,
)
from .exactpoly import (
    MultiPoly,
    Variable,
    common_monomial,
    compile_poly,
    eval_compiled,
    exact_divide,
    integer_content,
    poly_det,
    poly_var,
)
from .grassmann import (
    GrassPoint,
    Params,
    ProjPoint,
    enum_stratum,
    index_tuples,
    mat_mul,
    mat_rank,
)

# -- determinantal ideals ----------------------------------------------------


def determinantal_ideal_gens(p: int, n: int, l: int, which: str) -> list[MultiPoly]:
    """Generators of the rank (Y) and corank (Z) blow-up center ideals.

    Y: all (l+1) x (l+1) minors of the generic p x (n-p) matrix.
    Z: x[0,0] together with the (p-l) x (p-l) minors (just x[0,0] at l = 0).
    """
    if not 0 <= l <= p - 1:
        raise RangeError(f"stage {l} outside [0, {p - 1}]")
    if which not in ("Y", "Z"):
        raise InvalidParameterError(f"which must be 'Y' or 'Z', not {which!r}")
    x = [[poly_var("x", i, j) for j in range(1, n - p + 1)] for i in range(1, p + 1)]

    def minors(size):
        out = []
        for rset in combinations(range(p), size):
            for cset in combinations(range(n - p), size):
                out.append(poly_det([[x[i][j] for j in cset] for i in rset]))
        return out

    if which == "Y":
        return minors(l + 1)
    gens = [poly_var("x", 0, 0)]
    if l >= 1:
        gens.extend(minors(p - l))
    return gens


# -- charts ------------------------------------------------------------------


@dataclass(frozen=True)
class KauszChart:
    """Row/column permutations plus the stage of the pivot-ratio ladder."""

    p: int
    n: int
    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    l: int

    def __post_init__(self):
        p, n = self.p, self.n
        if not 0 < p <= n - p:
            raise InvalidParameterError("need 0 < p <= n - p")
        if sorted(self.alpha) != list(range(1, p + 1)):
            raise DimensionError("alpha must be a permutation of 1..p")
        if sorted(self.beta) != list(range(1, n - p + 1)):
            raise DimensionError("beta must be a permutation of 1..n-p")
        if not 0 <= self.l <= p:
            raise RangeError(f"stage {self.l} outside [0, {p}]")

    def iota(self, i: int) -> int:
        """The stage bijection {1..p+1} -> {0..p} inserting 0 after slot l."""
        if not 1 <= i <= self.p + 1:
            raise RangeError(f"ladder slot {i} outside [1, {self.p + 1}]")
        if i <= self.l:
            return i
        if i == self.l + 1:
            return 0
        return i - 1

    def ladder_position(self, v: int) -> int:
        """Inverse of iota: the slot of t_v in the reordered ladder."""
        if not 0 <= v <= self.p:
            raise RangeError(f"pivot index {v} outside [0, {self.p}]")
        if v == 0:
            return self.l + 1
        return v if v <= self.l else v + 1


def all_kausz_charts(p: int, n: int) -> list[KauszChart]:
    from itertools import permutations

    return [
        KauszChart(p, n, a, b, l)
        for a in permutations(range(1, p + 1))
        for b in permutations(range(1, n - p + 1))
        for l in range(p + 1)
    ]


@dataclass(frozen=True)
class KauszCoords:
    """Chart coordinates: p ladder ratios, y[j,i] (i<j<=p), z[i,j] (i<j<=n-p).

    The total count is p(n-p) for every (p, n); the constructor asserts it.
    """

    chart: KauszChart
    ratios: tuple
    y: tuple  # ((j, i), value) pairs, sorted
    z: tuple  # ((i, j), value) pairs, sorted

    @staticmethod
    def make(chart: KauszChart, ratios, y: dict, z: dict) -> "KauszCoords":
        p, n = chart.p, chart.n
        ratios = tuple(mpq(v) for v in ratios)
        if len(ratios) != p:
            raise DimensionError(f"need {p} ladder ratios")
        ykeys = {(j, i) for i in range(1, p + 1) for j in range(i + 1, p + 1)}
        zkeys = {(i, j) for i in range(1, p + 1) for j in range(i + 1, n - p + 1)}
        if set(y) != ykeys or set(z) != zkeys:
            raise DimensionError("y/z key sets do not match the chart layout")
        total = p + len(ykeys) + len(zkeys)
        assert total == p * (n - p), (p, n, total)
        return KauszCoords(
            chart,
            ratios,
            tuple(sorted((k, mpq(v)) for k, v in y.items())),
            tuple(sorted((k, mpq(v)) for k, v in z.items())),
        )

    def ydict(self):
        return dict(self.y)

    def zdict(self):
        return dict(self.z)


# -- the elimination recursion ------------------------------------------------


@dataclass
class RecursionTable:
    x: dict  # (k, i, j) -> value of the stage-k reduced entry
    y: dict  # (j, i)
    z: dict  # (i, j)
    t: list  # t_0 .. t_p


def kausz_recursion(alpha, beta, x00, x) -> RecursionTable:
    """Run the pivot elimination on the affine point (x00, x).

    x is a p x (n-p) matrix; every pivot reached must be nonzero, otherwise
    PivotFailureError names the failing stage (stage 0 is x00 itself).
    """
    p = len(alpha)
    np_ = len(beta)
    if sorted(alpha) != list(range(1, p + 1)) or sorted(beta) != list(range(1, np_ + 1)):
        raise DimensionError("alpha/beta must be permutations of 1..p and 1..n-p")
    if len(x) != p or any(len(row) != np_ for row in x):
        raise DimensionError("x must be p x (n-p)")
    x00 = mpq(x00)
    if x00 == 0:
        raise PivotFailureError("x00 vanishes", stage=0)
    cur = {
        (i, j): mpq(x[alpha[i - 1] - 1][beta[j - 1] - 1]) / x00
        for i in range(1, p + 1)
        for j in range(1, np_ + 1)
    }
    table = RecursionTable(x={}, y={}, z={}, t=[x00])
    for key, v in cur.items():
        table.x[(0,) + key] = v
    for k in range(1, p + 1):
        piv = cur[(k, k)]
        if piv == 0:
            raise PivotFailureError(f"stage-{k} pivot vanishes", stage=k)
        table.t.append(table.t[-1] * piv)
        nxt = {}
        for i in range(k + 1, p + 1):
            table.y[(i, k)] = cur[(i, k)] / piv
        for j in range(k + 1, np_ + 1):
            table.z[(k, j)] = cur[(k, j)] / piv
        for i in range(k + 1, p + 1):
            for j in range(k + 1, np_ + 1):
                nxt[(i, j)] = cur[(i, j)] / piv - table.y[(i, k)] * table.z[(k, j)]
                table.x[(k, i, j)] = nxt[(i, j)]
        cur = nxt
    return table


def kausz_chart_coords(chart: KauszChart, x00, x) -> KauszCoords:
    """Forward map: an affine point to its chart coordinates."""
    tab = kausz_recursion(chart.alpha, chart.beta, x00, x)
    ratios = [
        tab.t[chart.iota(i + 1)] / tab.t[chart.iota(i)] for i in range(1, chart.p + 1)
    ]
    return KauszCoords.make(chart, ratios, tab.y, tab.z)


def _pivots_from_ratios(chart: KauszChart, ratios, one, div):
    """The stage pivots t_k / t_{k-1} from the reordered ladder ratios."""
    p = chart.p
    ladder = [one]
    for i in range(1, p + 1):
        ladder.append(ladder[-1] * ratios[i - 1])
    # ladder[i - 1] carries the relative scale of t at slot i
    scale = {v: ladder[chart.ladder_position(v) - 1] for v in range(0, p + 1)}
    pivots = {}
    for k in range(1, p + 1):
        pivots[k] = div(scale[k], scale[k - 1], k)
    return pivots


def reconstruct_projective(kc: KauszCoords):
    """Blow-down: chart coordinates to the affine point (1, X).

    Requires the sampled point to be generic: every stage pivot must be
    reconstructible, i.e. no needed ladder ratio vanishes.
    """
    chart = kc.chart
    p, np_ = chart.p, chart.n - chart.p

    def div(a, b, stage):
        if b == 0:
            raise PivotFailureError(
                f"ladder does not determine the stage-{stage} pivot", stage=stage
            )
        return a / b

    pivots = _pivots_from_ratios(chart, kc.ratios, mpq(1), div)
    y, z = kc.ydict(), kc.zdict()
    cur: dict = {}
    for k in range(p, 0, -1):
        nxt = {(k, k): pivots[k]}
        for i in range(k + 1, p + 1):
            nxt[(i, k)] = y[(i, k)] * pivots[k]
        for j in range(k + 1, np_ + 1):
            nxt[(k, j)] = z[(k, j)] * pivots[k]
        for i in range(k + 1, p + 1):
            for j in range(k + 1, np_ + 1):
                nxt[(i, j)] = pivots[k] * (cur[(i, j)] + y[(i, k)] * z[(k, j)])
        cur = nxt
    X = [[mpq(0)] * np_ for _ in range(p)]
    for (i, j), v in cur.items():
        X[chart.alpha[i - 1] - 1][chart.beta[j - 1] - 1] = v
    return mpq(1), X


# -- the projective-space-to-Grassmannian map ---------------------------------


def lm_labels(p: int, n: int):
    return [(0, 0)] + [(i, j) for i in range(1, p + 1) for j in range(1, n - p + 1)]


def lm_map(h: ProjPoint) -> GrassPoint:
    """Row space of (X | x00 * I); undefined when the assembly drops rank."""
    first = h.labels[0]
    if first != (0, 0):
        raise DimensionError("first label must be (0,0)")
    ij = h.labels[1:]
    p = max(i for i, _ in ij)
    np_ = max(j for _, j in ij)
    if list(h.labels) != lm_labels(p, p + np_):
        raise DimensionError("labels are not a full matrix label set")
    x00 = h.coords[0]
    vals = dict(zip(ij, h.coords[1:]))
    rows = []
    for i in range(1, p + 1):
        row = [mpq(vals[(i, j)]) for j in range(1, np_ + 1)]
        row += [mpq(x00) if c == i - 1 else mpq(0) for c in range(p)]
        rows.append(row)
    if mat_rank(rows) != p:
        raise UndefinedPointError("assembled matrix drops rank; the map is undefined here")
    return GrassPoint(rows)


# -- symbolic route (B) --------------------------------------------------------


class _Frac:
    """Unreduced polynomial fraction; denominators stay single monomials here."""

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly = None):
        if den is None:
            den = MultiPoly.const(1)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        g = integer_content([num, den])
        m = common_monomial([num, den]) if not num.is_zero() else None
        if m:
            num = exact_divide(num, MultiPoly.monomial(m))
            den = exact_divide(den, MultiPoly.monomial(m))
        if g > 1:
            num = exact_divide(num, MultiPoly.const(g))
            den = exact_divide(den, MultiPoly.const(g))
        self.num = num
        self.den = den

    @staticmethod
    def of(x):
        if isinstance(x, _Frac):
            return x
        if isinstance(x, MultiPoly):
            return _Frac(x)
        return _Frac(MultiPoly.const(int(x)))

    def __add__(self, other):
        other = _Frac.of(other)
        return _Frac(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        other = _Frac.of(other)
        return _Frac(self.num * other.den - other.num * self.den, self.den * other.den)

    def __mul__(self, other):
        other = _Frac.of(other)
        return _Frac(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _Frac.of(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by the zero fraction")
        return _Frac(self.num * other.den, self.den * other.num)

    def __eq__(self, other):
        other = _Frac.of(other)
        return self.num * other.den == other.num * self.den

    def is_zero(self):
        return self.num.is_zero()

    def __repr__(self):
        return f"({self.num})/({self.den})"


def _frac_det(rows) -> _Frac:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = _Frac.of(0)
    sign = 1
    for k in range(n):
        a = rows[0][k]
        if not a.is_zero():
            sub = _frac_det([r[:k] + r[k + 1 :] for r in rows[1:]])
            term = a * sub
            total = total + term if sign > 0 else total - term
        sign = -sign
    return total


def ratio_variable(i: int) -> Variable:
    return Variable("t", (i,))


def chart_coordinate_variables(chart: KauszChart) -> list[Variable]:
    p, np_ = chart.p, chart.n - chart.p
    vs = [ratio_variable(i) for i in range(1, p + 1)]
    vs += [Variable("y", (j, i)) for i in range(1, p + 1) for j in range(i + 1, p + 1)]
    vs += [Variable("z", (i, j)) for i in range(1, p + 1) for j in range(i + 1, np_ + 1)]
    return vs


@dataclass
class _Composite:
    chart: KauszChart
    variables: tuple
    main_labels: tuple
    strata_labels: list
    main_compiled: list
    strata_compiled: list


_COMPOSITE_CACHE: dict[KauszChart, _Composite] = {}


def _composite_form(chart: KauszChart) -> _Composite:
    got = _COMPOSITE_CACHE.get(chart)
    if got is not None:
        return got
    p, n = chart.p, chart.n
    np_ = n - p
    par = Params(n - p, p, n)

    one = _Frac.of(1)
    ratios = [_Frac(MultiPoly.var(ratio_variable(i))) for i in range(1, p + 1)]

    def div(a, b, stage):
        return a / b

    pivots = _pivots_from_ratios(chart, ratios, one, div)
    y = {
        (j, i): _Frac(MultiPoly.var(Variable("y", (j, i))))
        for i in range(1, p + 1)
        for j in range(i + 1, p + 1)
    }
    z = {
        (i, j): _Frac(MultiPoly.var(Variable("z", (i, j))))
        for i in range(1, p + 1)
        for j in range(i + 1, np_ + 1)
    }
    cur: dict = {}
    for k in range(p, 0, -1):
        nxt = {(k, k): pivots[k]}
        for i in range(k + 1, p + 1):
            nxt[(i, k)] = y[(i, k)] * pivots[k]
        for j in range(k + 1, np_ + 1):
            nxt[(k, j)] = z[(k, j)] * pivots[k]
        for i in range(k + 1, p + 1):
            for j in range(k + 1, np_ + 1):
                nxt[(i, j)] = pivots[k] * (cur[(i, j)] + y[(i, k)] * z[(k, j)])
        cur = nxt
    X = [[None] * np_ for _ in range(p)]
    for (i, j), v in cur.items():
        X[chart.alpha[i - 1] - 1][chart.beta[j - 1] - 1] = v
    # matrix (X | 1 * I) over the fraction field
    M = [
        [X[i][j] for j in range(np_)]
        + [_Frac.of(1) if c == i else _Frac.of(0) for c in range(p)]
        for i in range(p)
    ]

    labels = tuple(index_tuples(p, n))
    minors = {}
    for I in labels:
        cols = sorted(c - 1 for c in I)
        minors[I] = _frac_det([[M[r][c] for c in cols] for r in range(p)])

    def clear(fracs):
        dens = []
        for f in fracs:
            assert f.den.num_terms() == 1, "route-B denominators must be monomials"
            dens.append(next(iter(f.den.terms())))
        lc = 1
        exps: dict = {}
        for m, c in dens:
            lc = abs(c) * lc // gcd(abs(c), lc)
            for v, e in m:
                if exps.get(v, 0) < e:
                    exps[v] = e
        big = MultiPoly.monomial(tuple(sorted(exps.items())), lc)
        polys = []
        for f in fracs:
            q = exact_divide(big, f.den)
            polys.append(f.num * q)
        cm = common_monomial(polys)
        ic = integer_content(polys)
        if cm or ic > 1:
            d = MultiPoly.monomial(cm, ic)
            polys = [exact_divide(f, d) for f in polys]
        return polys

    main_polys = clear([minors[I] for I in labels])
    strata_labels, strata_polys = [], []
    for k in range(par.r + 1):
        ls = tuple(enum_stratum(par, k))
        strata_labels.append(ls)
        strata_polys.append(clear([minors[I] for I in ls]))

    variables = tuple(chart_coordinate_variables(chart))
    var_pos = {v: i for i, v in enumerate(variables)}
    got = _Composite(
        chart=chart,
        variables=variables,
        main_labels=labels,
        strata_labels=strata_labels,
        main_compiled=[compile_poly(f, var_pos) for f in main_polys],
        strata_compiled=[[compile_poly(f, var_pos) for f in polys] for polys in strata_polys],
    )
    _COMPOSITE_CACHE[chart] = got
    return got


def composite_symbolic(kc: KauszCoords) -> MultiProjPoint:
    """Route (B): evaluate the cached symbolic composite at the chart point."""
    form = _composite_form(kc.chart)
    vals = []
    values = dict(zip([ratio_variable(i) for i in range(1, kc.chart.p + 1)], kc.ratios))
    values.update({Variable("y", k): v for k, v in kc.y})
    values.update({Variable("z", k): v for k, v in kc.z})
    vals = [values[v] for v in form.variables]
    cache: dict = {}
    main = ProjPoint(
        form.main_labels, [eval_compiled(cp, vals, cache) for cp in form.main_compiled]
    )
    strata = tuple(
        ProjPoint(form.strata_labels[k], [eval_compiled(cp, vals, cache) for cp in cps])
        for k, cps in enumerate(form.strata_compiled)
    )
    return MultiProjPoint(main, strata)


# -- the comparison diagram -----------------------------------------------------


def diagram_check(par: Params, samples) -> list[dict]:
    """Compare routes (A) and (B) at every sample; one report entry each."""
    if par.s != par.n - par.p:
        raise InvalidParameterError("the comparison needs s = n - p")
    report = []
    for idx, kc in enumerate(samples):
        entry = {
            "params": [par.s, par.p, par.n],
            "chart": {"alpha": list(kc.chart.alpha), "beta": list(kc.chart.beta), "l": kc.chart.l},
            "sample": idx,
            "status": "pass",
            "mismatch_factor": None,
        }
        try:
            _, X = reconstruct_projective(kc)
            h = ProjPoint(
                lm_labels(par.p, par.n),
                [mpq(1)] + [X[i][j] for i in range(par.p) for j in range(par.n - par.p)],
            )
            a = kausz_total_map(par, lm_map(h))
            b = composite_symbolic(kc)
        except (PivotFailureError, UndefinedPointError) as e:
            entry["status"] = "undefined"
            entry["mismatch_factor"] = str(e)
            report.append(entry)
            continue
        if a != b:
            entry["status"] = "fail"
            if a.main != b.main:
                entry["mismatch_factor"] = "main"
            else:
                entry["mismatch_factor"] = next(
                    k for k in range(par.r + 1) if a.strata[k] != b.strata[k]
                )
        report.append(entry)
    return report


def pivot_product_identity(p: int, n: int) -> bool:
    """t_p/t_0 equals det_p(X) / (x00 * det_{p-1}(X)), symbolically.

    The elimination normalizes the whole remaining block by the pivot at
    every stage, so the cumulative pivot product telescopes to the ratio of
    the last two leading principal minors rather than to det(X)/x00^p.
    Checked by cross-multiplication over the fraction field.
    """
    x00 = _Frac(poly_var("x", 0, 0))
    xs = {
        (i, j): _Frac(poly_var("x", i, j))
        for i in range(1, p + 1)
        for j in range(1, n - p + 1)
    }
    cur = {k: v / x00 for k, v in xs.items()}
    prod = _Frac.of(1)
    for k in range(1, p + 1):
        piv = cur[(k, k)]
        prod = prod * piv
        nxt = {}
        for i in range(k + 1, p + 1):
            for j in range(k + 1, n - p + 1):
                nxt[(i, j)] = cur[(i, j)] / piv - (cur[(i, k)] / piv) * (cur[(k, j)] / piv)
        cur = nxt

    def leading_minor(size):
        if size == 0:
            return MultiPoly.const(1)
        return poly_det(
            [[poly_var("x", i, j) for j in range(1, size + 1)] for i in range(1, size + 1)]
        )

    return prod == _Frac(leading_minor(p), poly_var("x", 0, 0) * leading_minor(p - 1))


# -- fibrations -------------------------------------------------------------------


def fibration_eta(par: Params, l: int, u: GrassPoint, w: GrassPoint) -> GrassPoint:
    """Glue a fiber point w over the base chart point u: (A B) = (C, D.u).

    w must lie in the stage-l band chart of G(p, s+p) (split at s); u must be
    a p x (n-s) chart matrix whose first l columns are the first l unit
    vectors.  The result lies in the stage-l band chart of G(p,n).
    """
    s, p, n = par.s, par.p, par.n
    if not 0 <= l <= par.r:
        raise RangeError(f"stage {l} outside [0, {par.r}]")
    if (u.p, u.n) != (p, n - s):
        raise DimensionError(f"base point must be {p} x {n - s}")
    if (w.p, w.n) != (p, s + p):
        raise DimensionError(f"fiber point must be {p} x {s + p}")
    for i in range(p):
        for c in range(l):
            if u.rows[i][c] != (1 if i == c else 0):
                raise DimensionError("base point is not in the required chart")
    for i in range(p):
        for c in range(p - l):
            if w.rows[i][s - p + l + c] != (1 if i == l + c else 0):
                raise DimensionError("fiber point lacks the lower identity band")
        for c in range(l):
            if w.rows[i][s + c] != (1 if i == c else 0):
                raise DimensionError("fiber point lacks the upper identity band")
    C = w.column_block(0, s)
    D = w.column_block(s, s + p)
    B = mat_mul(D, u.rows)
    return GrassPoint([list(cr) + list(br) for cr, br in zip(C, B)])
