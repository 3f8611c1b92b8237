"""Layered coordinate charts for the blow-up of the Grassmannian.

The blow-up is modeled pointwise: a point is the tuple of projective vectors
(full Plucker vector, weight-0 restriction, ..., weight-r restriction), one
factor per weight stratum (MultiProjPoint).  The charts parametrize it by
iteratively summing rank-one matrix layers scaled by cumulative pivot
products, in two Gaussian-elimination zones:

  * rows 1..l, columns 1..s-p+l        ("a"-zone, pivots a[i,j]),
  * rows l+1..p, columns s+l+1..n      ("b"-zone, pivots b[i,j]),

glued by two identity bands, a free block x[i,j] (upper right) and a free
block y[i,j] (lower left).  A chart index records the stage l and the pivot
positions of every layer.

For each chart the map to the ambient product of projective spaces is
computed once symbolically: the weight-k factor is divided by its known
common monomial (a falling-power product of pivots), after which one
designated coordinate is a constant +-1.  That certified normal form is
cached; numeric evaluation substitutes into it, so points with vanishing
pivots (the boundary divisors) evaluate without ever forming 0/0.

Inversion is a triangular solve discovered at build time: an ordered plan of
(factor, coordinate, variable) steps, each reading one chart variable off a
normalized coordinate, where the coordinate is (integer) * variable plus a
polynomial in previously recovered variables.  The flow pivots (the first
b-pivot and the first a-pivot) are recoverable only from the full Plucker
factor; all remaining variables are recoverable from the stratum factors
alone, which is exactly why dropping the Plucker factor is a well-defined
retraction onto the source divisor.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from itertools import combinations, permutations

from .exactpoly import mpq

from .errors import (
    ChartDomainError,
    DimensionError,
    IdentityFalsifiedError,
    RangeError,
    UndefinedPointError,
)
from .exactpoly import (
    MultiPoly,
    Variable,
    compile_poly,
    eval_compiled,
    exact_divide,
    poly_det,
    rat_str,
    substitute,
    var_from_name,
)
from .grassmann import (
    GrassPoint,
    Params,
    ProjPoint,
    enum_stratum,
    index_tuples,
    raw_minors,
)

# -- chart indices ---------------------------------------------------------


@dataclass(frozen=True)
class ChartIndex:
    """Stage l plus the pivot rows/columns (i_1..i_r), (j_1..j_r)."""

    par: Params
    l: int
    rows: tuple[int, ...]
    cols: tuple[int, ...]

    def __post_init__(self):
        s, p, n, r, l = self.par.s, self.par.p, self.par.n, self.par.r, self.l
        if not 0 <= l <= r:
            raise RangeError(f"stage {l} outside [0, {r}]")
        if len(self.rows) != r or len(self.cols) != r:
            raise DimensionError(f"pivot tuples must have length r={r}")
        ok = (
            _is_partial_perm(self.rows[: r - l], range(l + 1, p + 1))
            and sorted(self.rows[r - l :]) == list(range(1, l + 1))
            and _is_partial_perm(self.cols[: r - l], range(s + l + 1, n + 1))
            and _is_partial_perm(self.cols[r - l :], range(1, s - p + l + 1))
        )
        if not ok:
            raise DimensionError(f"invalid pivot pattern for stage {l}: {self.rows}, {self.cols}")

    @property
    def b_pivots(self) -> tuple[Variable, ...]:
        r, l = self.par.r, self.l
        return tuple(
            Variable("b", (self.rows[k], self.cols[k])) for k in range(r - l)
        )

    @property
    def a_pivots(self) -> tuple[Variable, ...]:
        r, l = self.par.r, self.l
        return tuple(
            Variable("a", (self.rows[k], self.cols[k])) for k in range(r - l, r)
        )

    @property
    def b_flow(self):
        bp = self.b_pivots
        return bp[0] if bp else None

    @property
    def a_flow(self):
        ap = self.a_pivots
        return ap[0] if ap else None


def _is_partial_perm(seq, pool) -> bool:
    pool = set(pool)
    return len(set(seq)) == len(seq) and all(x in pool for x in seq)


def enum_chart_indices(par: Params, l: int) -> list[ChartIndex]:
    """All chart indices of stage l, in a fixed deterministic order."""
    s, p, n, r = par.s, par.p, par.n, par.r
    if not 0 <= l <= r:
        raise RangeError(f"stage {l} outside [0, {r}]")
    out = []
    for itop in permutations(range(l + 1, p + 1), r - l):
        for ibot in permutations(range(1, l + 1)):
            for jtop in permutations(range(s + l + 1, n + 1), r - l):
                for jbot in permutations(range(1, s - p + l + 1), l):
                    out.append(ChartIndex(par, l, itop + ibot, jtop + jbot))
    return out


def chart_variables(tau: ChartIndex) -> tuple[Variable, ...]:
    """The chart's coordinate variables, in canonical Variable order."""
    s, p, n, r, l = tau.par.s, tau.par.p, tau.par.n, tau.par.r, tau.l
    vs: list[Variable] = []
    vs.extend(tau.b_pivots)
    vs.extend(tau.a_pivots)
    for k in range(1, r - l + 1):
        ik, jk = tau.rows[k - 1], tau.cols[k - 1]
        used_j = set(tau.cols[:k])
        used_i = set(tau.rows[:k])
        vs.extend(Variable("xi", (k, ik, j)) for j in range(s + l + 1, n + 1) if j not in used_j)
        vs.extend(Variable("xi", (k, i, jk)) for i in range(l + 1, p + 1) if i not in used_i)
    for k in range(r - l + 1, r + 1):
        ik, jk = tau.rows[k - 1], tau.cols[k - 1]
        used_j = set(tau.cols[r - l : k])
        used_i = set(tau.rows[r - l : k])
        vs.extend(Variable("xi", (k, ik, j)) for j in range(1, s - p + l + 1) if j not in used_j)
        vs.extend(Variable("xi", (k, i, jk)) for i in range(1, l + 1) if i not in used_i)
    vs.extend(Variable("x", (i, j)) for i in range(1, l + 1) for j in range(s + l + 1, n + 1))
    vs.extend(Variable("y", (i, j)) for i in range(l + 1, p + 1) for j in range(1, s - p + l + 1))
    vs = sorted(vs)
    assert len(vs) == p * (n - p), "chart coordinate count must be dim G(p,n)"
    return tuple(vs)


# -- coordinates and points ------------------------------------------------


class MCCoords:
    """A rational coordinate vector of one chart."""

    __slots__ = ("tau", "values")

    def __init__(self, tau: ChartIndex, values):
        vs = chart_variables(tau)
        vals = {}
        for v in vs:
            if v not in values:
                raise DimensionError(f"missing chart coordinate {v.name}")
            vals[v] = mpq(values[v])
        if len(values) != len(vs):
            extra = set(values) - set(vs)
            raise DimensionError(f"foreign coordinates: {sorted(x.name for x in extra)}")
        self.tau = tau
        self.values = vals

    @classmethod
    def from_named(cls, tau: ChartIndex, named=None, default=0):
        """Build coordinates from {name: rational}, padding with `default`."""
        named = {var_from_name(k): v for k, v in (named or {}).items()}
        vals = {v: named.get(v, default) for v in chart_variables(tau)}
        return cls(tau, vals)

    def replace(self, **by_name):
        vals = dict(self.values)
        for name, v in by_name.items():
            vals[var_from_name(name)] = mpq(v)
        return MCCoords(self.tau, vals)

    def __getitem__(self, v):
        if isinstance(v, str):
            v = var_from_name(v)
        return self.values[v]

    def __eq__(self, other):
        return (
            isinstance(other, MCCoords)
            and self.tau == other.tau
            and self.values == other.values
        )

    def __repr__(self):
        inner = ", ".join(f"{v.name}={rat_str(q)}" for v, q in sorted(self.values.items()))
        return f"MCCoords({inner})"

    def to_json(self) -> str:
        return json.dumps(
            {v.name: rat_str(q) for v, q in sorted(self.values.items())}
        )


@dataclass(frozen=True)
class MultiProjPoint:
    """A point of the ambient product: Plucker factor plus one per stratum."""

    main: ProjPoint
    strata: tuple[ProjPoint, ...]


@dataclass(frozen=True)
class OrbitSignature:
    """Vanishing-divisor index sets classifying a group orbit."""

    iplus: frozenset
    iminus: frozenset


# -- the chart parametrization ---------------------------------------------


def _gamma_symbolic(tau: ChartIndex):
    """The chart matrix with polynomial entries, as a p x n nested list."""
    s, p, n, r, l = tau.par.s, tau.par.p, tau.par.n, tau.par.r, tau.l
    zero, one = MultiPoly.zero(), MultiPoly.const(1)
    M = [[zero for _ in range(n)] for _ in range(p)]
    for c in range(l):
        M[c][s + c] = one
    for c in range(p - l):
        M[l + c][s - p + l + c] = one
    for i in range(1, l + 1):
        for j in range(s + l + 1, n + 1):
            M[i - 1][j - 1] = MultiPoly.var(Variable("x", (i, j)))
    for i in range(l + 1, p + 1):
        for j in range(1, s - p + l + 1):
            M[i - 1][j - 1] = MultiPoly.var(Variable("y", (i, j)))

    def layer(k, row_range, col_range, ks_start):
        ik, jk = tau.rows[k - 1], tau.cols[k - 1]
        used_i = tau.rows[ks_start : k - 1]
        used_j = tau.cols[ks_start : k - 1]
        v = {}
        for t in row_range:
            if t == ik:
                v[t] = one
            elif t in used_i:
                v[t] = zero
            else:
                v[t] = MultiPoly.var(Variable("xi", (k, t, jk)))
        w = {}
        for t in col_range:
            if t == jk:
                w[t] = one
            elif t in used_j:
                w[t] = zero
            else:
                w[t] = MultiPoly.var(Variable("xi", (k, ik, t)))
        return v, w

    prod = one
    for k in range(1, r - l + 1):
        prod = prod * MultiPoly.var(Variable("b", (tau.rows[k - 1], tau.cols[k - 1])))
        v, w = layer(k, range(l + 1, p + 1), range(s + l + 1, n + 1), 0)
        for t_r in range(l + 1, p + 1):
            if v[t_r].is_zero():
                continue
            for t_c in range(s + l + 1, n + 1):
                if not w[t_c].is_zero():
                    M[t_r - 1][t_c - 1] = M[t_r - 1][t_c - 1] + prod * v[t_r] * w[t_c]
    prod = one
    for k in range(r - l + 1, r + 1):
        prod = prod * MultiPoly.var(Variable("a", (tau.rows[k - 1], tau.cols[k - 1])))
        v, w = layer(k, range(1, l + 1), range(1, s - p + l + 1), r - l)
        for t_r in range(1, l + 1):
            if v[t_r].is_zero():
                continue
            for t_c in range(1, s - p + l + 1):
                if not w[t_c].is_zero():
                    M[t_r - 1][t_c - 1] = M[t_r - 1][t_c - 1] + prod * v[t_r] * w[t_c]
    return M


def gamma_tau(c: MCCoords) -> GrassPoint:
    """Evaluate the chart parametrization at rational coordinates."""
    M = _gamma_symbolic(c.tau)
    return GrassPoint([[substitute(e, c.values) for e in row] for row in M])


def gamma_tau_symbolic(tau: ChartIndex):
    return _gamma_symbolic(tau)


# -- special labels and cancellation monomials ------------------------------


def special_label(tau: ChartIndex, k: int) -> tuple[int, ...]:
    """The weight-k label whose chart minor is a pure pivot monomial."""
    s, p, r, l = tau.par.s, tau.par.p, tau.par.r, tau.l
    if not 0 <= k <= r:
        raise RangeError(f"stratum index {k} outside [0, {r}]")
    if k >= l:
        m = k - l
        used_rows = set(tau.rows[:m])
        cols = set(tau.cols[:m])
        cols |= {s + i for i in range(1, l + 1)}
        cols |= {s - p + i for i in range(l + 1, p + 1) if i not in used_rows}
    else:
        m = l - k
        a_rows = set(tau.rows[r - l : r - l + m])
        cols = set(tau.cols[r - l : r - l + m])
        cols |= {s + i for i in range(1, l + 1) if i not in a_rows}
        cols |= {s - p + i for i in range(l + 1, p + 1)}
    return tuple(sorted(cols, reverse=True))


def cancel_monomial(tau: ChartIndex, k: int) -> MultiPoly:
    """The common pivot-power monomial of the weight-k coordinate vector."""
    r, l = tau.par.r, tau.l
    if not 0 <= k <= r:
        raise RangeError(f"stratum index {k} outside [0, {r}]")
    out = MultiPoly.const(1)
    if k >= l:
        for t in range(1, k - l + 1):
            out = out * MultiPoly.var(tau.b_pivots[t - 1]) ** (k - l + 1 - t)
    else:
        for t in range(1, l - k + 1):
            out = out * MultiPoly.var(tau.a_pivots[t - 1]) ** (l - k + 1 - t)
    return out


# -- the fixed special-index families ---------------------------------------


def special_indices(par: Params, k: int):
    """The four reference label families of the normalized chart.

    Returns (I_k, I*_k, {(mu,nu): I^k_(mu,nu)}, {(mu,nu): I^k*_(mu,nu)}).
    I*_k is None outside 1 <= k <= p-1.
    """
    s, p, n = par.s, par.p, par.n
    if not 0 <= k <= min(p, n - s):
        raise RangeError(f"index family undefined for k={k} with (s,p,n)=({s},{p},{n})")
    base = tuple(range(s + k, s - p + k, -1))
    star = None
    if 1 <= k <= p - 1:
        star = tuple(
            sorted(set(base) - {s + k, s - p + k + 1} | {s + k + 1, s - p + k}, reverse=True)
        )
    fam = {}
    for mu in range(s - p + k + 1, s + 1):
        for nu in range(1, s - p + k + 1):
            fam[(mu, nu)] = tuple(sorted(set(base) - {mu} | {nu}, reverse=True))
    fam_star = {}
    for mu in range(s + 1, s + k + 1):
        for nu in range(s + k + 1, n + 1):
            fam_star[(mu, nu)] = tuple(sorted(set(base) - {mu} | {nu}, reverse=True))
    return base, star, fam, fam_star


# -- chart normal form -------------------------------------------------------


@dataclass
class PlanStep:
    src: object  # 'main' or a stratum index
    pos: int
    var: Variable
    coeff: int
    residual: MultiPoly


@dataclass
class ChartForm:
    """Certified symbolic normal form of one chart's map to the ambient product."""

    tau: ChartIndex
    variables: tuple[Variable, ...]
    main_labels: tuple
    main_polys: list
    main_unit: tuple  # (position, +-1)
    strata_labels: list
    strata_polys: list
    strata_units: list
    plan: list
    strata_recoverable: frozenset
    _var_pos: dict
    _main_compiled: list
    _strata_compiled: list


_FORM_CACHE: dict[ChartIndex, ChartForm] = {}
_FORM_LOCK = threading.Lock()


def chart_form(tau: ChartIndex) -> ChartForm:
    got = _FORM_CACHE.get(tau)
    if got is not None:
        return got
    with _FORM_LOCK:
        got = _FORM_CACHE.get(tau)
        if got is None:
            got = _build_chart_form(tau)
            _FORM_CACHE[tau] = got
    return got


def _build_chart_form(tau: ChartIndex) -> ChartForm:
    par = tau.par
    p, n, r = par.p, par.n, par.r
    M = _gamma_symbolic(tau)
    main_labels = tuple(index_tuples(p, n))

    def minor(I):
        cols = sorted(i - 1 for i in I)
        return poly_det([[M[ri][ci] for ci in cols] for ri in range(p)])

    main_polys = [minor(I) for I in main_labels]
    by_label = dict(zip(main_labels, main_polys))

    strata_labels, strata_polys, strata_units = [], [], []
    for k in range(r + 1):
        labels = tuple(enum_stratum(par, k))
        mk = cancel_monomial(tau, k)
        try:
            polys = [exact_divide(by_label[I], mk) for I in labels]
        except Exception as e:
            raise IdentityFalsifiedError(
                f"weight-{k} vector of chart {tau.rows}/{tau.cols} is not divisible "
                f"by its pivot monomial: {e}"
            ) from e
        upos = labels.index(special_label(tau, k))
        uval = polys[upos].as_const()
        if uval not in (1, -1):
            raise IdentityFalsifiedError(
                f"weight-{k} unit coordinate of chart {tau.rows}/{tau.cols} is "
                f"{polys[upos]}, not a unit constant"
            )
        strata_labels.append(labels)
        strata_polys.append(polys)
        strata_units.append((upos, uval))

    mu_pos = main_labels.index(special_label(tau, tau.l))
    mu_val = main_polys[mu_pos].as_const()
    if mu_val not in (1, -1):
        raise IdentityFalsifiedError("Plucker factor lacks a constant unit coordinate")

    variables = chart_variables(tau)
    plan, strata_recoverable = _discover_plan(
        tau, variables, strata_polys, main_polys
    )

    var_pos = {v: i for i, v in enumerate(variables)}
    return ChartForm(
        tau=tau,
        variables=variables,
        main_labels=main_labels,
        main_polys=main_polys,
        main_unit=(mu_pos, mu_val),
        strata_labels=strata_labels,
        strata_polys=strata_polys,
        strata_units=strata_units,
        plan=plan,
        strata_recoverable=strata_recoverable,
        _var_pos=var_pos,
        _main_compiled=[compile_poly(f, var_pos) for f in main_polys],
        _strata_compiled=[[compile_poly(f, var_pos) for f in polys] for polys in strata_polys],
    )


def _extract_linear(f: MultiPoly, known: set):
    """(var, coeff) with f - coeff*var in Z[known], or None."""
    cand = None
    coeff = 0
    for m, c in f.terms():
        unknowns = [v for v, _ in m if v not in known]
        if not unknowns:
            continue
        if len(m) == 1 and m[0][1] == 1 and len(unknowns) == 1:
            v = unknowns[0]
            if cand is None:
                cand, coeff = v, c
            elif cand != v:
                return None
        else:
            return None
    if cand is None:
        return None
    return cand, coeff


def _discover_plan(tau, variables, strata_polys, main_polys):
    entries = []
    for k, polys in enumerate(strata_polys):
        entries.extend((k, pos, f) for pos, f in enumerate(polys))
    main_entries = [("main", pos, f) for pos, f in enumerate(main_polys)]

    def run(pool, known, plan):
        progress = True
        while progress:
            progress = False
            for src, pos, f in pool:
                hit = _extract_linear(f, known)
                if hit is None:
                    continue
                v, c = hit
                residual = f - c * MultiPoly.var(v)
                plan.append(PlanStep(src, pos, v, c, residual))
                known.add(v)
                progress = True

    known: set = set()
    plan: list = []
    run(entries, known, plan)
    strata_recoverable = frozenset(known)
    run(entries + main_entries, known, plan)
    missing = set(variables) - known
    if missing:
        raise IdentityFalsifiedError(
            f"chart {tau.rows}/{tau.cols} is not invertible by coordinate reads; "
            f"unrecovered: {sorted(v.name for v in missing)}"
        )
    return plan, strata_recoverable


# -- the chart map and its inverse -------------------------------------------


def kausz_total_map(par: Params, x: GrassPoint) -> MultiProjPoint:
    """The defining rational map: Plucker vector plus all stratum restrictions.

    Undefined exactly where some weight stratum vanishes identically on x;
    the error names the first such weight.
    """
    if (x.p, x.n) != (par.p, par.n):
        raise DimensionError("point shape does not match parameters")
    mins = raw_minors(x)
    labels = index_tuples(par.p, par.n)
    pos_by_weight: dict[int, list[int]] = {k: [] for k in range(par.r + 1)}
    for i, I in enumerate(labels):
        w = sum(1 for a in I if a > par.s)
        if w <= par.r:
            pos_by_weight[w].append(i)
    strata = []
    for k in range(par.r + 1):
        coords = [mins[i] for i in pos_by_weight[k]]
        if all(c == 0 for c in coords):
            raise UndefinedPointError(
                f"all weight-{k} coordinates vanish on this point", stratum=k
            )
        strata.append(ProjPoint(enum_stratum(par, k), coords))
    return MultiProjPoint(ProjPoint(labels, mins), tuple(strata))


def j_tau(c: MCCoords, mode: str = "numeric"):
    """Evaluate the extended chart map; `mode='symbolic'` returns the ChartForm."""
    cf = chart_form(c.tau)
    if mode == "symbolic":
        return cf
    if mode != "numeric":
        raise ValueError(f"unknown mode {mode!r}")
    vals = [c.values[v] for v in cf.variables]
    cache: dict = {}
    main = ProjPoint(
        cf.main_labels,
        [eval_compiled(cp, vals, cache) for cp in cf._main_compiled],
    )
    strata = tuple(
        ProjPoint(cf.strata_labels[k], [eval_compiled(cp, vals, cache) for cp in cps])
        for k, cps in enumerate(cf._strata_compiled)
    )
    return MultiProjPoint(main, strata)


def _factor_reader(cf: ChartForm, m: MultiProjPoint):
    scales = {}

    def prepare(src, coords, unit):
        upos, uval = unit
        if coords[upos] == 0:
            raise ChartDomainError(
                f"unit coordinate at label {cf.strata_labels[src][upos] if src != 'main' else cf.main_labels[upos]} "
                f"vanishes; the point is outside this chart"
            )
        scales[src] = mpq(uval, coords[upos])

    if len(m.strata) != len(cf.strata_labels):
        raise DimensionError("stratum factor count mismatch")
    if m.main.labels != cf.main_labels:
        raise DimensionError("Plucker factor labels mismatch")
    for k, f in enumerate(m.strata):
        if f.labels != cf.strata_labels[k]:
            raise DimensionError(f"weight-{k} factor labels mismatch")
    prepare("main", m.main.coords, cf.main_unit)
    for k, f in enumerate(m.strata):
        prepare(k, f.coords, cf.strata_units[k])

    def read(src, pos):
        coords = m.main.coords if src == "main" else m.strata[src].coords
        return coords[pos] * scales[src]

    return read


def j_tau_inverse(tau: ChartIndex, m: MultiProjPoint) -> MCCoords:
    """Invert the chart map; ChartDomainError when m is not in the chart image."""
    cf = chart_form(tau)
    read = _factor_reader(cf, m)
    values: dict[Variable, mpq] = {}
    for step in cf.plan:
        if step.var in values:
            continue
        rem = substitute(step.residual, values)
        values[step.var] = (read(step.src, step.pos) - rem) / step.coeff
    c = MCCoords(tau, values)
    if j_tau(c) != m:
        raise ChartDomainError("point is not in the image of this chart")
    return c


def chart_transition(tau1: ChartIndex, tau2: ChartIndex, c: MCCoords) -> MCCoords:
    if c.tau != tau1:
        raise DimensionError("coordinates do not belong to the source chart")
    return j_tau_inverse(tau2, j_tau(c))


# -- orbits -----------------------------------------------------------------


def orbit_signature(c: MCCoords) -> OrbitSignature:
    """Divisor-membership signature read off the pivot vanishing pattern."""
    tau = c.tau
    r, l = tau.par.r, tau.l
    iminus = frozenset(
        k + l for k in range(1, r - l + 1) if c.values[tau.b_pivots[k - 1]] == 0
    )
    iplus = frozenset(
        k for k in range(r - l + 1, r + 1) if c.values[tau.a_pivots[k - (r - l) - 1]] == 0
    )
    return OrbitSignature(iplus, iminus)


def signature_admissible(sig: OrbitSignature, r: int) -> bool:
    """min(I+) + min(I-) >= r + 2, with min(empty) = +infinity."""
    if not (set(sig.iplus) <= set(range(1, r + 1)) and set(sig.iminus) <= set(range(1, r + 1))):
        raise RangeError("signature entries outside [1, r]")
    lo_p = min(sig.iplus) if sig.iplus else None
    lo_m = min(sig.iminus) if sig.iminus else None
    if lo_p is None or lo_m is None:
        return True
    return lo_p + lo_m >= r + 2


def realized_signatures(par: Params) -> set[OrbitSignature]:
    """Sweep every chart and every pivot-vanishing pattern."""
    out = set()
    for l in range(par.r + 1):
        for tau in enum_chart_indices(par, l):
            pivots = tau.b_pivots + tau.a_pivots
            for mask in range(1 << len(pivots)):
                named = {
                    pivots[i].name: 0 if mask >> i & 1 else 1
                    for i in range(len(pivots))
                }
                c = MCCoords.from_named(tau, named, default=0)
                out.add(orbit_signature(c))
    return out


def admissible_signatures(r: int) -> set[OrbitSignature]:
    subsets = [
        frozenset(c)
        for size in range(r + 1)
        for c in combinations(range(1, r + 1), size)
    ]
    return {
        OrbitSignature(ip, im)
        for ip in subsets
        for im in subsets
        if signature_admissible(OrbitSignature(ip, im), r)
    }


def flat_normal_form_check(tau: ChartIndex) -> bool:
    """Every stratum coordinate uses the two flow pivots only through their
    product.

    Symbolic check: in each canceled stratum polynomial, every monomial
    carries equal exponents of the first b-pivot and the first a-pivot (a
    missing pivot counts as exponent 0, so at the extreme stages the
    remaining flow pivot must not appear at all).
    """
    cf = chart_form(tau)
    a, b = tau.a_flow, tau.b_flow
    for polys in cf.strata_polys:
        for f in polys:
            for m, _ in f.terms():
                ea = eb = 0
                for v, e in m:
                    if v == a:
                        ea = e
                    elif v == b:
                        eb = e
                if ea != eb:
                    return False
    return True


# -- the chart-level retraction ----------------------------------------------


def retraction_chart(c: MCCoords) -> MCCoords:
    """Project onto the source divisor (first b-pivot = 0), chart-level.

    In a stage-0 chart this just zeroes the first b-pivot.  For higher
    stages the image is re-expressed in the first stage-0 chart that
    contains it, reading coordinates off the stratum factors alone (the
    Plucker factor carries exactly the flow data that the retraction
    forgets).
    """
    tau = c.tau
    if tau.l == 0:
        vals = dict(c.values)
        vals[tau.b_flow] = mpq(0)
        return MCCoords(tau, vals)
    strata = j_tau(c).strata
    for tau0 in enum_chart_indices(tau.par, 0):
        try:
            return _strata_inverse_l0(tau0, strata)
        except ChartDomainError:
            continue
    raise ChartDomainError(
        "no stage-0 chart of the atlas contains the retracted point"
    )


def _strata_inverse_l0(tau0: ChartIndex, strata) -> MCCoords:
    cf = chart_form(tau0)
    flow = tau0.b_flow
    needed = set(cf.variables) - {flow}
    if not needed <= cf.strata_recoverable:
        raise ChartDomainError("stratum factors do not determine this chart")
    scales = {}
    for k, f in enumerate(strata):
        if f.labels != cf.strata_labels[k]:
            raise DimensionError(f"weight-{k} factor labels mismatch")
        upos, uval = cf.strata_units[k]
        if f.coords[upos] == 0:
            raise ChartDomainError("unit coordinate vanishes; outside this chart")
        scales[k] = mpq(uval, f.coords[upos])
    values: dict[Variable, mpq] = {}
    for step in cf.plan:
        # only the steps discovered from stratum factors alone are sound here
        if step.src == "main" or step.var not in cf.strata_recoverable:
            continue
        if step.var in values:
            continue
        val = strata[step.src].coords[step.pos] * scales[step.src]
        values[step.var] = (val - substitute(step.residual, values)) / step.coeff
    values[flow] = mpq(0)
    c0 = MCCoords(tau0, values)
    if j_tau(c0).strata != tuple(strata):
        raise ChartDomainError("point is not in the image of this chart")
    return c0
