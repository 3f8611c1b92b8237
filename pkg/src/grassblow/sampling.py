"""Seeded random sampling of exact rational data.

Distribution fixed once for reproducibility: numerators uniform in
[-10^4, 10^4], denominators uniform in [1, 10^3], rejection with a retry
cap of 100 wherever a genericity condition (rank, nonzero pivot) is
required.
"""

from __future__ import annotations

import random

from .exactpoly import mpq

from .charts import ChartIndex, MCCoords, chart_variables
from .errors import InvalidParameterError
from .grassmann import GrassPoint, Params, mat_rank
from .kauszlm import KauszChart, KauszCoords

NUM_BOUND = 10**4
DEN_BOUND = 10**3
RETRY_CAP = 100


def rand_rational(rng: random.Random) -> mpq:
    return mpq(rng.randint(-NUM_BOUND, NUM_BOUND), rng.randint(1, DEN_BOUND))


def rand_nonzero_rational(rng: random.Random) -> mpq:
    for _ in range(RETRY_CAP):
        q = rand_rational(rng)
        if q != 0:
            return q
    raise InvalidParameterError("retry cap exhausted sampling a nonzero rational")


def rand_grass_point(rng: random.Random, p: int, n: int) -> GrassPoint:
    for _ in range(RETRY_CAP):
        rows = [[rand_rational(rng) for _ in range(n)] for _ in range(p)]
        if mat_rank(rows) == p:
            return GrassPoint(rows)
    raise InvalidParameterError("retry cap exhausted sampling a full-rank matrix")


def rand_generic_point(rng: random.Random, par: Params) -> GrassPoint:
    """A point with every Plucker minor nonzero (all strata defined)."""
    from .grassmann import raw_minors

    for _ in range(RETRY_CAP):
        x = rand_grass_point(rng, par.p, par.n)
        if all(m != 0 for m in raw_minors(x)):
            return x
    raise InvalidParameterError("retry cap exhausted sampling a generic point")


def rand_mc_coords(rng: random.Random, tau: ChartIndex, generic: bool = True) -> MCCoords:
    vals = {}
    for v in chart_variables(tau):
        if generic and v.kind in ("a", "b"):
            vals[v] = rand_nonzero_rational(rng)
        else:
            vals[v] = rand_rational(rng)
    return MCCoords(tau, vals)


def rand_kausz_coords(rng: random.Random, chart: KauszChart) -> KauszCoords:
    p, np_ = chart.p, chart.n - chart.p
    ratios = [rand_nonzero_rational(rng) for _ in range(p)]
    y = {
        (j, i): rand_rational(rng)
        for i in range(1, p + 1)
        for j in range(i + 1, p + 1)
    }
    z = {
        (i, j): rand_rational(rng)
        for i in range(1, p + 1)
        for j in range(i + 1, np_ + 1)
    }
    return KauszCoords.make(chart, ratios, y, z)


def rand_rank_matrix(rng: random.Random, nr: int, nc: int, rank: int):
    """An nr x nc rational matrix of the exact given rank."""
    if rank == 0:
        return [[mpq(0)] * nc for _ in range(nr)]
    if rank > min(nr, nc):
        raise InvalidParameterError("rank exceeds the matrix dimensions")
    for _ in range(RETRY_CAP):
        a = [[rand_rational(rng) for _ in range(rank)] for _ in range(nr)]
        b = [[rand_rational(rng) for _ in range(nc)] for _ in range(rank)]
        m = [
            [sum((a[i][k] * b[k][j] for k in range(rank)), mpq(0)) for j in range(nc)]
            for i in range(nr)
        ]
        if mat_rank(m) == rank:
            return m
    raise InvalidParameterError("retry cap exhausted sampling a fixed-rank matrix")


def rand_block_rank_point(rng: random.Random, par: Params, rank_e1: int, rank_e2: int) -> GrassPoint:
    """A point whose two column-block projections have prescribed ranks."""
    for _ in range(RETRY_CAP):
        left = rand_rank_matrix(rng, par.p, par.s, rank_e1)
        right = rand_rank_matrix(rng, par.p, par.n - par.s, rank_e2)
        rows = [list(l) + list(r) for l, r in zip(left, right)]
        if mat_rank(rows) == par.p:
            return GrassPoint(rows)
    raise InvalidParameterError("retry cap exhausted sampling a block-rank point")
