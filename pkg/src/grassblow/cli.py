"""Batch driver: enumeration, verification suites, and flow-data emission.

Output is deterministic JSON (one object per line for verification reports):
identical configuration, byte-identical output.  Exit codes: 0 all checks
pass, 1 a mathematical check was falsified, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import charts, grassmann, kauszlm, sampling, torusflow
from .errors import ChartDomainError, DegenerateOrbitError, GrassblowError
from .exactpoly import rat_from_str, rat_str
from .grassmann import GrassPoint, Params

SUITES = ("chart-units", "orbits", "diagram", "retraction", "flow", "strata")

ORBIT_PARAMS = {1: (2, 1, 3), 2: (2, 2, 4), 3: (3, 3, 6)}


@dataclass
class RunConfig:
    params: tuple
    samples: int = 100
    seed: int = 0
    suites: tuple = ()
    out: str | None = None


@dataclass
class Check:
    check: str
    params: list
    status: str = "pass"
    witness: str | None = None

    def as_line(self, suite: str) -> str:
        return json.dumps(
            {
                "suite": suite,
                "check": self.check,
                "params": self.params,
                "status": self.status,
                "witness": self.witness,
            },
            sort_keys=True,
        )


def _pool_size() -> int:
    try:
        return max(1, int(os.environ.get("GRASSBLOW_THREADS", "1")))
    except ValueError:
        return 1


def _run_units(units):
    """Execute (check_id, thunk) pairs, merging results in submission order."""
    size = _pool_size()
    if size == 1:
        return [thunk() for _, thunk in units]
    with ThreadPoolExecutor(max_workers=size) as pool:
        futures = [pool.submit(thunk) for _, thunk in units]
        return [f.result() for f in futures]


# -- suites -------------------------------------------------------------------


def suite_chart_units(par: Params) -> list[Check]:
    """Symbolic pivot-monomial and unit-coordinate identities on the final-stage
    charts (requires the complementary split p = n - s)."""
    pl = [par.s, par.p, par.n]
    if par.p != par.n - par.s:
        return [
            Check("chart-units-applicable", pl, "fail", "suite needs p = n - s")
        ]
    units = []
    normalized = charts.ChartIndex(
        par,
        par.r,
        tuple(range(par.p, 0, -1)),
        tuple(range(par.s, par.s - par.p, -1)),
    )
    for tau in charts.enum_chart_indices(par, par.r):
        for k in range(par.r + 1):
            units.append(
                (
                    f"{tau.rows}/{tau.cols}/{k}",
                    _make_unit_check(par, pl, tau, k, tau == normalized),
                )
            )
    return _run_units(units)


def _make_unit_check(par, pl, tau, k, is_normalized):
    def thunk():
        name = f"pivot-monomial[{','.join(map(str, tau.rows))};{','.join(map(str, tau.cols))};k={k}]"
        try:
            cf = charts.chart_form(tau)
        except GrassblowError as e:
            return Check(name, pl, "fail", str(e))
        label = charts.special_label(tau, k)
        got = cf.main_polys[cf.main_labels.index(label)]
        mono = charts.cancel_monomial(tau, k)
        quotient = None
        for sign in (1, -1):
            if got == sign * mono:
                quotient = sign
        if quotient is None:
            return Check(name, pl, "fail", f"minor is {got}, not a signed pivot monomial")
        if is_normalized and quotient != (-1) ** (k * (par.p - k)):
            return Check(name, pl, "fail", f"normalized-chart sign is {quotient}")
        upos, uval = cf.strata_units[k]
        unit = cf.strata_polys[k][upos]
        if unit.as_const() not in (1, -1):
            return Check(name, pl, "fail", f"stratum unit coordinate is {unit}")
        return Check(name, pl)

    return thunk


def suite_orbits(par: Params) -> list[Check]:
    pl = [par.s, par.p, par.n]
    realized = charts.realized_signatures(par)
    admissible = charts.admissible_signatures(par.r)
    checks = []
    extra = realized - admissible
    checks.append(
        Check(
            "orbit-signatures-realized-are-admissible",
            pl,
            "pass" if not extra else "fail",
            None if not extra else f"inadmissible signatures realized: {sorted(map(_sig_str, extra))}",
        )
    )
    missing = admissible - realized
    checks.append(
        Check(
            "orbit-signatures-admissible-are-realized",
            pl,
            "pass" if not missing else "fail",
            None if not missing else f"unrealized signatures: {sorted(map(_sig_str, missing))}",
        )
    )
    checks.append(Check(f"orbit-signature-count[{len(realized)}]", pl))
    return checks


def _sig_str(sig):
    return f"(+{sorted(sig.iplus)},-{sorted(sig.iminus)})"


def suite_diagram(par: Params, samples: int, seed: int) -> list[Check]:
    pl = [par.s, par.p, par.n]
    rng = random.Random(seed)
    all_charts = kauszlm.all_kausz_charts(par.p, par.n)
    kcs = [
        sampling.rand_kausz_coords(rng, all_charts[rng.randrange(len(all_charts))])
        for _ in range(samples)
    ]
    out = []
    for entry in kauszlm.diagram_check(par, kcs):
        status = "pass" if entry["status"] == "pass" else "fail"
        witness = None
        if entry["status"] != "pass":
            witness = f"factor {entry['mismatch_factor']}"
        ch = entry["chart"]
        out.append(
            Check(
                f"diagram-commutes[sample={entry['sample']},chart={ch['alpha']}/{ch['beta']}/{ch['l']}]",
                pl,
                status,
                witness,
            )
        )
    return out


def suite_retraction(par: Params, samples: int, seed: int) -> list[Check]:
    pl = [par.s, par.p, par.n]
    rng = random.Random(seed)
    checks = []

    taus0 = charts.enum_chart_indices(par, 0)
    ok = True
    witness = None
    for i in range(samples):
        tau = taus0[i % len(taus0)]
        c = sampling.rand_mc_coords(rng, tau)
        rc = charts.retraction_chart(c)
        if charts.retraction_chart(rc) != rc:
            ok, witness = False, f"sample {i}: retraction is not idempotent"
            break
    checks.append(Check("retraction-idempotent", pl, "pass" if ok else "fail", witness))

    ok, witness, hits = True, None, 0
    for i in range(samples):
        t1 = taus0[i % len(taus0)]
        t2 = taus0[(i + 1) % len(taus0)]
        c = sampling.rand_mc_coords(rng, t1)
        try:
            d = charts.chart_transition(t1, t2, c)
        except ChartDomainError:
            continue
        hits += 1
        if charts.j_tau(charts.retraction_chart(c)) != charts.j_tau(
            charts.retraction_chart(d)
        ):
            ok, witness = False, f"sample {i}: retraction differs across charts"
            break
    if hits == 0:
        ok, witness = False, "no overlap samples landed in both charts"
    checks.append(
        Check(f"retraction-chart-compatible[{hits}]", pl, "pass" if ok else "fail", witness)
    )

    ok, witness = True, None
    for i in range(samples):
        x = sampling.rand_generic_point(rng, par)
        t = sampling.rand_nonzero_rational(rng)
        if not torusflow.same_fiber(par, x, torusflow.gm_act(par, t, x)):
            ok, witness = False, f"sample {i}: translate left the fiber"
            break
    checks.append(Check("fiber-invariance-translates", pl, "pass" if ok else "fail", witness))

    mixed = [l for l in range(1, par.r)]
    if mixed:
        tau = charts.enum_chart_indices(par, mixed[0])[0]
        good = charts.flat_normal_form_check(tau)
        checks.append(
            Check(
                "flat-normal-form-pivot-product",
                pl,
                "pass" if good else "fail",
                None if good else "a stratum coordinate separates the flow pivots",
            )
        )
    return checks


def suite_flow(par: Params, samples: int, seed: int) -> list[Check]:
    pl = [par.s, par.p, par.n]
    rng = random.Random(seed)
    checks = []

    ok, witness = True, None
    for i in range(samples):
        x = sampling.rand_generic_point(rng, par)
        d = torusflow.orbit_curve_degree(par, x)
        if d != par.r:
            ok, witness = False, f"sample {i}: degree {d} != {par.r}"
            break
    checks.append(Check("orbit-curve-degree-generic", pl, "pass" if ok else "fail", witness))

    ok, witness = True, None
    for i in range(samples):
        r1 = rng.randint(1, par.p)
        r2 = rng.randint(0, min(par.r, par.p) - 1)
        try:
            x = sampling.rand_block_rank_point(rng, par, r1, r2)
            d = torusflow.orbit_curve_degree(par, x)
        except (DegenerateOrbitError, GrassblowError):
            continue
        if d > par.r:
            ok, witness = False, f"sample {i}: degree {d} exceeds {par.r}"
            break
    checks.append(Check("orbit-curve-degree-bounded", pl, "pass" if ok else "fail", witness))

    ok, witness = True, None
    for i in range(samples):
        x = sampling.rand_grass_point(rng, par.p, par.n)
        fc = torusflow.flow_curve(par, x)
        ks = fc.nonzero_weights()
        lo = torusflow.limit(par, x, "to_zero")
        hi = torusflow.limit(par, x, "to_infinity")
        if lo.component != ks[0] or hi.component != ks[-1]:
            ok, witness = False, f"sample {i}: limit components disagree with grading"
            break
    checks.append(Check("limit-component-is-extreme-weight", pl, "pass" if ok else "fail", witness))
    return checks


def suite_strata(par: Params, samples: int, seed: int) -> list[Check]:
    pl = [par.s, par.p, par.n]
    rng = random.Random(seed)
    checks = []
    for k in range(par.r + 1):
        ok, witness = True, None
        for i in range(samples):
            r1 = rng.randint(0, par.p)
            r2 = rng.randint(0, min(par.p, par.n - par.s))
            try:
                x = sampling.rand_block_rank_point(rng, par, r1, r2)
            except GrassblowError:
                continue
            pt, rt = grassmann.stratum_membership(x, par, k)
            if pt != rt:
                ok, witness = False, f"sample {i}: minor test {pt} vs rank test {rt}"
                break
        checks.append(
            Check(f"stratum-membership-agreement[k={k}]", pl, "pass" if ok else "fail", witness)
        )

    from .exactpoly import Variable, substitute

    p, n = par.p, par.n
    for l in range(p):
        gens = kauszlm.determinantal_ideal_gens(p, n, l, "Y")
        ok, witness = True, None
        for i in range(samples):
            rank = rng.randint(0, p)
            X = sampling.rand_rank_matrix(rng, p, n - p, rank)
            sigma = {
                Variable("x", (a + 1, b + 1)): X[a][b]
                for a in range(p)
                for b in range(n - p)
            }
            vanish = all(substitute(g, sigma) == 0 for g in gens)
            if vanish != (grassmann.mat_rank(X) <= l):
                ok, witness = False, f"sample {i}: ideal vanishing disagrees with rank"
                break
        checks.append(
            Check(f"ideal-vanishing-matches-rank[l={l}]", pl, "pass" if ok else "fail", witness)
        )
    return checks


# -- commands -------------------------------------------------------------------


def cmd_enum(args) -> int:
    p, n = args.p, args.n
    if args.k is not None:
        if args.s is None:
            print("error: --k requires --s", file=sys.stderr)
            return 2
        par = Params(args.s, p, n)
        labels = grassmann.enum_stratum(par, args.k)
    else:
        labels = grassmann.index_tuples(p, n)
    print(json.dumps({"labels": [list(I) for I in labels]}, sort_keys=True))
    return 0


def run_suite(suite: str, cfg: RunConfig) -> list[Check]:
    par = Params(*cfg.params)
    if suite == "chart-units":
        return suite_chart_units(par)
    if suite == "orbits":
        return suite_orbits(par)
    if suite == "diagram":
        return suite_diagram(par, cfg.samples, cfg.seed)
    if suite == "retraction":
        return suite_retraction(par, cfg.samples, cfg.seed)
    if suite == "flow":
        return suite_flow(par, cfg.samples, cfg.seed)
    if suite == "strata":
        return suite_strata(par, cfg.samples, cfg.seed)
    raise ValueError(f"unknown suite {suite!r}")


def cmd_verify(args) -> int:
    if args.suite == "orbits" and args.s is None:
        trip = ORBIT_PARAMS.get(args.r)
        if trip is None:
            print(f"error: no default parameters for r={args.r}", file=sys.stderr)
            return 2
        params = trip
    else:
        if args.s is None or args.p is None or args.n is None:
            print("error: --s/--p/--n required", file=sys.stderr)
            return 2
        params = (args.s, args.p, args.n)

    cfg = RunConfig(
        params=params,
        samples=args.samples,
        seed=args.seed,
        suites=(args.suite,),
        out=args.out,
    )
    checks = run_suite(args.suite, cfg)
    lines = [c.as_line(args.suite) for c in checks]
    text = "\n".join(lines) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all(c.status == "pass" for c in checks) else 1


def _read_point(args) -> GrassPoint:
    if args.random:
        rng = random.Random(args.seed)
        return sampling.rand_grass_point(rng, args.p, args.n)
    if args.point:
        with open(args.point) as fh:
            data = json.load(fh)
    else:
        data = json.load(sys.stdin)
    return GrassPoint([[rat_from_str(str(v)) for v in row] for row in data])


def cmd_flow(args) -> int:
    par = Params(args.s, args.p, args.n)
    x = _read_point(args)
    fc = torusflow.flow_curve(par, x)
    out = {
        "params": [par.s, par.p, par.n],
        "weights": fc.to_json_dict(),
        "degenerate": False,
    }
    if len(fc.nonzero_weights()) == 1:
        out["degenerate"] = True
        out["component"] = fc.nonzero_weights()[0]
    else:
        lo = torusflow.limit(par, x, "to_zero")
        hi = torusflow.limit(par, x, "to_infinity")
        out["degree"] = torusflow.orbit_curve_degree(par, x)
        out["components"] = [lo.component, hi.component]
        out["limits"] = {
            "to_zero": [[rat_str(v) for v in row] for row in lo.limit.rows],
            "to_infinity": [[rat_str(v) for v in row] for row in hi.limit.rows],
        }
        out["normals"] = {
            "to_zero": list(lo.normal.coords),
            "to_infinity": list(hi.normal.coords),
        }
    print(json.dumps(out, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="grassblow")
    sub = ap.add_subparsers(dest="command", required=True)

    enum = sub.add_parser("enum", help="emit index tuples or one weight stratum")
    enum.add_argument("--p", type=int, required=True)
    enum.add_argument("--n", type=int, required=True)
    enum.add_argument("--s", type=int)
    enum.add_argument("--k", type=int)

    verify = sub.add_parser("verify", help="run a verification suite")
    verify.add_argument("--suite", choices=SUITES, required=True)
    verify.add_argument("--s", type=int)
    verify.add_argument("--p", type=int)
    verify.add_argument("--n", type=int)
    verify.add_argument("--r", type=int, help="rank bound for the orbits suite")
    verify.add_argument("--samples", type=int, default=100)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--out")

    flow = sub.add_parser("flow", help="emit flow-curve and boundary data")
    flow.add_argument("--s", type=int, required=True)
    flow.add_argument("--p", type=int, required=True)
    flow.add_argument("--n", type=int, required=True)
    flow.add_argument("--random", action="store_true")
    flow.add_argument("--seed", type=int, default=0)
    flow.add_argument("--point", help="JSON file with a matrix of 'a/b' strings")

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        if args.command == "enum":
            return cmd_enum(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "flow":
            return cmd_flow(args)
    except GrassblowError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
