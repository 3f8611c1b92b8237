"""Torus flow on the Grassmannian and its blow-up: limits, fixed components,
stable/unstable membership, orbit-curve degree, and the total retraction.

The one-parameter subgroup scales the last n-s columns by t.  Every Plucker
minor of weight k then picks up a factor t^k, so the full minor vector of a
point decomposes by weight into the coefficient vectors of the curve
t -> plucker(t . x).  All flow data (limits, normal directions, degrees) is
read off that grading, computed on raw integer-cleared minor vectors so the
relative scale between weights stays exact; canonicalization happens only at
operation boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactpoly import mpq

from .charts import MultiProjPoint, kausz_total_map
from .errors import (
    DegenerateOrbitError,
    DimensionError,
    InternalInconsistencyError,
    InvalidParameterError,
    StratifiedOrbitError,
)
from .grassmann import (
    GrassPoint,
    Params,
    ProjPoint,
    enum_stratum,
    index_tuples,
    plucker_oracle,
    raw_minors,
    weight,
)


@dataclass(frozen=True)
class FlowCurve:
    """The weight decomposition of the minor vector of one point.

    weights[k] is the integer coefficient vector over the weight-k labels;
    only nonvanishing weights are stored.  Summing t^k times each vector
    (padded to the full label set) reproduces the minor vector of the
    scaled point up to one global factor.
    """

    par: Params
    base: GrassPoint
    weights: dict

    def nonzero_weights(self) -> list[int]:
        return sorted(self.weights)

    def padded(self, k) -> list[int]:
        """weights[k] spread over the full label list, zeros elsewhere."""
        labels = index_tuples(self.par.p, self.par.n)
        stratum = enum_stratum(self.par, k)
        pos = {I: i for i, I in enumerate(stratum)}
        vec = self.weights[k]
        return [vec[pos[I]] if I in pos else 0 for I in labels]

    def to_json_dict(self):
        return {str(k): list(v) for k, v in sorted(self.weights.items())}


@dataclass
class BoundaryData:
    """A flow limit: the fixed point, its component, and the first-order
    direction in which the orbit leaves it (None for constant orbits)."""

    limit: GrassPoint
    component: int
    normal: ProjPoint | None

    def projective_key(self):
        from .grassmann import plucker

        return (plucker(self.limit), self.component, self.normal)


# -- the action --------------------------------------------------------------


def gm_act(par: Params, t, x: GrassPoint) -> GrassPoint:
    """Scale the last n-s columns by the nonzero rational t."""
    t = mpq(t)
    if t == 0:
        raise InvalidParameterError("t = 0 is not a group element; take a limit instead")
    if x.n != par.n:
        raise DimensionError("point does not live in the parametrized ambient space")
    return GrassPoint(
        [row[: par.s] + tuple(t * v for v in row[par.s :]) for row in x.rows]
    )


def flow_curve(par: Params, x: GrassPoint) -> FlowCurve:
    if (x.p, x.n) != (par.p, par.n):
        raise DimensionError("point shape does not match parameters")
    mins = raw_minors(x)
    mult = 1
    for q in mins:
        mult = mult * int(q.denominator) // _gcd(mult, int(q.denominator))
    ints = [int(q * mult) for q in mins]
    g = 0
    for v in ints:
        g = _gcd(g, v)
    ints = [v // g for v in ints]
    labels = index_tuples(par.p, par.n)
    buckets: dict[int, list[int]] = {}
    for I, c in zip(labels, ints):
        buckets.setdefault(weight(I, par), []).append(c)
    weights = {k: tuple(v) for k, v in buckets.items() if any(v)}
    return FlowCurve(par, x, weights)


def _gcd(a, b):
    from math import gcd

    return gcd(a, b)


# -- limits and the fixed scheme ----------------------------------------------


def limit(par: Params, x: GrassPoint, direction: str) -> BoundaryData:
    """Flow limit of x for t -> 0 ('to_zero') or t -> infinity ('to_infinity')."""
    if direction not in ("to_zero", "to_infinity"):
        raise InvalidParameterError(f"unknown direction {direction!r}")
    fc = flow_curve(par, x)
    ks = fc.nonzero_weights()
    if len(ks) == 1:
        return BoundaryData(limit=x, component=ks[0], normal=None)
    if direction == "to_zero":
        k_lead, k_next = ks[0], ks[1]
    else:
        k_lead, k_next = ks[-1], ks[-2]
    lead = ProjPoint(index_tuples(par.p, par.n), fc.padded(k_lead))
    gp = plucker_oracle(lead)
    if gp is None:
        raise InternalInconsistencyError(
            "leading coefficient vector is not a Plucker vector"
        )
    normal = ProjPoint(enum_stratum(par, k_next), fc.weights[k_next])
    return BoundaryData(limit=gp, component=k_lead, normal=normal)


def fixed_component(par: Params, x: GrassPoint):
    """k when x is fixed and lies in the k-th fixed component, else None.

    Fixedness is equivalent to the minor vector being concentrated in one
    weight; the adapted-basis block description is checked against this in
    the tests.
    """
    ks = flow_curve(par, x).nonzero_weights()
    return ks[0] if len(ks) == 1 else None


def bb_class(par: Params, x: GrassPoint) -> tuple[int, int]:
    """(component of the t->infinity limit, component of the t->0 limit)."""
    ks = flow_curve(par, x).nonzero_weights()
    return ks[-1], ks[0]


def orbit_curve_degree(par: Params, x: GrassPoint) -> int:
    """Degree of the closed orbit curve through x in the Plucker embedding."""
    ks = flow_curve(par, x).nonzero_weights()
    if len(ks) == 1:
        raise DegenerateOrbitError("the point is fixed; its orbit is not a curve")
    return ks[-1] - ks[0]


# -- fibers of the retraction --------------------------------------------------


def retraction_total(m: MultiProjPoint) -> tuple[ProjPoint, ...]:
    """Drop the Plucker factor; two points are in one retraction fiber iff
    their outputs agree factorwise."""
    return m.strata


def same_fiber(par: Params, x: GrassPoint, y: GrassPoint) -> bool:
    return retraction_total(kausz_total_map(par, x)) == retraction_total(
        kausz_total_map(par, y)
    )


def orbit_boundary_data(par: Params, x: GrassPoint) -> tuple[BoundaryData, BoundaryData]:
    """Source and sink data of a generic orbit (components 0 and r required)."""
    kplus, kminus = bb_class(par, x)
    if (kplus, kminus) != (par.r, 0):
        raise StratifiedOrbitError(
            f"orbit runs between components {kminus} and {kplus}, "
            f"not between the source 0 and the sink {par.r}"
        )
    return limit(par, x, "to_zero"), limit(par, x, "to_infinity")
