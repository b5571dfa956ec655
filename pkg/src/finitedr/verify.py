"""Verification suites behind ``finitedr verify``.

Every suite returns ``{"suite": name, "checks": [{"name", "status", "residual"?}]}``.
A check passes only on exact equality; ``residual`` is the number of surviving
terms (or the offending value) and is omitted on success.

>>> report = run_suite("kdv")
>>> report["suite"], all(c["status"] == "pass" for c in report["checks"])
('kdv', True)
"""
from itertools import combinations_with_replacement

from ._rational import Q
from .diffpoly import DiffPoly, TruncationContext, dx, invert_miura, substitute
from .drcycle import (
    Q_COEFFS,
    VertexIntegralQuery,
    evaluate,
    genus0_string_oracle,
    genus0_value,
    genus1_seed,
    genus2_local,
    unified_genus1_local,
)
from .fcohft import FamilySpec, figure_families
from .hierarchy import (
    FlowTable,
    assemble_P,
    check_commutativity,
    golden_P110,
    golden_P120_contributions,
    kdv_rescaled,
    miura_flows,
    special_miura,
    theorem_flows,
    trivial_rank1,
)
from .laxkdv import kdv_P
from .multipoly import MultiPoly, msym, set_var_zero
from .trees import extremal_tree, genus_bound, lemma_scan

SUITES = ("kdv", "oracle", "theorem-n2", "finiteness", "commutativity")


def _check(name, ok, residual=None):
    out = {"name": name, "status": "pass" if ok else "fail"}
    if not ok and residual is not None:
        out["residual"] = residual
    return out


def _poly_check(name, got, want):
    diff = got - want
    return _check(name, diff.is_zero(), len(diff))


# -- kdv -------------------------------------------------------------------------------
def kdv_goldens(ctx):
    """P_0, P_1, P_2 of KdV, typed in by hand."""
    u = lambda k=0: DiffPoly.var(ctx, 1, k)
    e2, e4 = DiffPoly.eps(ctx, 2), DiffPoly.eps(ctx, 4)
    return [
        u(),
        u() * u() / 2 + e2 * u(2) / 12,
        u() ** 3 / 6 + e2 * (u() * u(2) / 12 + u(1) * u(1) / 24) + e4 * u(4) / 240,
    ]


def suite_kdv(q_coeffs=None):
    ctx = TruncationContext(1, 6, 4)
    checks = []
    for d, want in enumerate(kdv_goldens(ctx)):
        checks.append(_poly_check(f"lax P_{d} golden", kdv_P(d, ctx), want))
    table = trivial_rank1(ctx, dmax=2)
    for d in range(3):
        checks.append(_poly_check(f"rank-one assembly P_{d} = lax", table[(1, 1, d)], kdv_P(d, ctx)))
    return {"suite": "kdv", "checks": checks}


# -- oracle -------------------------------------------------------------------------------
def _genus1_two_psi():
    a1, a2 = MultiPoly.var(2, 1), MultiPoly.var(2, 2)
    return (a1 * a1 * 3 + a2 * a2 * 3 + a1 * a2 * 4) * Q(1, 24)


def suite_oracle(q_coeffs=None):
    checks = []
    # genus 1: DR_1(-a1-a2, 0, a1, a2) lambda_1 psi_3 psi_4
    q = VertexIntegralQuery(1, [((-1, -1), 0), ((0, 0), 0), ((1, 0), 1), ((0, 1), 1)])
    got = evaluate(q)
    checks.append(_check("genus-1 two psi points", got == _genus1_two_psi(), str(got - _genus1_two_psi())))
    b1, b2 = MultiPoly.var(2, 1), MultiPoly.var(2, 2)
    q = VertexIntegralQuery(1, [((-1, -1), 1), ((1, 0), 0), ((0, 1), 0)])
    checks.append(_check("genus-1 seed", evaluate(q) == genus1_seed(b1, b2)))
    for n in range(2, 7):
        P = unified_genus1_local(n)
        lower = unified_genus1_local(n - 1)
        # local symbols are (x_1..x_n, b); dropping x_n leaves (x_1..x_{n-1}, b)
        cut = set_var_zero(P, n)
        want = lower * (n + 1)
        checks.append(_check(f"genus-1 dilaton n={n}", cut == want, str(cut - want)))
    table = None if q_coeffs is None else tuple(sorted(q_coeffs.items()))
    for n in range(2, 7):
        Qn = genus2_local(n, table)
        cut = set_var_zero(Qn, n)
        prev = genus2_local(n - 1, table)
        want = prev * (n + 2)
        checks.append(_check(f"genus-2 dilaton n={n}", cut == want, str(cut - want)))
        checks.append(_check(f"genus-2 symmetric n={n}", Qn.is_symmetric()))
        checks.append(_check(f"genus-2 homogeneous degree 4 n={n}", Qn.is_homogeneous(4)))
    # with a single psi point only m(4) survives
    seed = genus2_local(1, table)
    want = msym((4,), 1) * (Q_COEFFS[(4,)] * 6)
    checks.append(_check("genus-2 seed", seed == want, str(seed - want)))
    bad = []
    for m in range(3, 9):
        for exps in combinations_with_replacement(range(m - 2), m):
            if sum(exps) == m - 3 and genus0_value(exps) != genus0_string_oracle(exps):
                bad.append(list(exps))
    checks.append(_check("genus-0 string equation m<=8", not bad, bad))
    return {"suite": "oracle", "checks": checks}


# -- rank-2 statements -----------------------------------------------------------------
def suite_theorem_n2(q_coeffs=None):
    spec = FamilySpec.rank2()
    checks = []
    ctx = TruncationContext(2, 6, 4)
    ctx1 = TruncationContext(1, 6, 4)
    for d in range(3):
        got = assemble_P(2, 1, d, spec, ctx, q_coeffs=q_coeffs)
        checks.append(_check(f"P^2_1,{d} vanishes", got.is_zero(), len(got)))
        got = assemble_P(2, 2, d, spec, ctx, q_coeffs=q_coeffs)
        checks.append(_poly_check(f"P^2_2,{d} = rescaled KdV", got, kdv_rescaled(kdv_P(d, ctx1), ctx)))
    c8 = TruncationContext(2, 8, 2)
    checks.append(_poly_check("P^1_1,0 closed form", assemble_P(1, 1, 0, spec, c8, q_coeffs=q_coeffs), golden_P110(spec, c8)))
    P120 = assemble_P(1, 2, 0, spec, ctx, q_coeffs=q_coeffs)
    want = sum((c.poly for c in golden_P120_contributions(spec, ctx)), DiffPoly.zero(ctx))
    checks.append(_poly_check("P^1_2,0 tree contributions", P120, want))
    checks.append(_check("P^1_2,0 eps degree 4", P120.max_eps() == 4, P120.max_eps()))
    P = FlowTable(ctx, {(a, b, 0): assemble_P(a, b, 0, spec, ctx, q_coeffs=q_coeffs) for a in (1, 2) for b in (1, 2)})
    m = special_miura(spec, ctx)
    got = miura_flows(P, m)
    want = theorem_flows(spec, ctx)
    for key in sorted(want):
        a, b, _ = key
        checks.append(_poly_check(f"transformed flow du{a}/dt{b}_0", got[key], want[key]))
    back = substitute(substitute(DiffPoly.var(ctx, 1), m.images), invert_miura(m).images)
    checks.append(_poly_check("Miura round trip", back, DiffPoly.var(ctx, 1)))
    return {"suite": "theorem-n2", "checks": checks}


# -- finiteness ---------------------------------------------------------------------------
def suite_finiteness(q_coeffs=None):
    checks = []
    for N in (2, 3):
        for d in (0, 1):
            best, _ = lemma_scan(N, d)
            bound = genus_bound(N, d)
            checks.append(_check(f"genus bound N={N} d={d}", best <= bound, best))
            ext = extremal_tree(N, d)
            ok = ext.total_genus() == bound and ext.degree() <= N and ext.coarse_ok(d)
            checks.append(_check(f"extremal tree N={N} d={d}", ok and best == bound, ext.total_genus()))
    spec = FamilySpec.rank2()
    n110 = sum(len(figure_families(1, 1, 0, g, spec)) for g in range(3))
    checks.append(_check("families (1,1,0)", n110 == 4, n110))
    for g, want in ((0, 6), (1, 9), (2, 6)):
        got = len(figure_families(1, 2, 0, g, spec))
        checks.append(_check(f"families (1,2,0) genus {g}", got == want, got))
    # eps cutoff far above the bound: the genus loop stops at the lemma bound
    ctx = TruncationContext(2, 4, 24)
    P = assemble_P(1, 2, 0, spec, ctx, q_coeffs=q_coeffs)
    bound = 2 * genus_bound(2, 0)
    checks.append(_check(f"P^1_2,0 eps degree 4 within bound {bound}", P.max_eps() == 4, P.max_eps()))
    return {"suite": "finiteness", "checks": checks}


# -- commutativity ------------------------------------------------------------------------
def suite_commutativity(q_coeffs=None, spec=None, ctx=None):
    spec = spec or FamilySpec.rank2()
    ctx = ctx or TruncationContext(spec.N, 6, 4)
    N = spec.N
    P = FlowTable(ctx, {(a, b, 0): assemble_P(a, b, 0, spec, ctx, q_coeffs=q_coeffs)
                        for a in range(1, N + 1) for b in range(1, N + 1)})
    pairs = [((b1, 0), (b2, 0)) for b1 in range(1, N + 1) for b2 in range(b1 + 1, N + 1)]
    report = check_commutativity(P, pairs)
    for c in report["checks"]:
        if c["status"] == "pass":
            c.pop("residual", None)
    # flows must actually do something, otherwise commutation is vacuous
    moving = all(not dx(P[(a, a, 0)]).is_zero() for a in range(1, N + 1))
    report["checks"].append(_check("flows nontrivial", moving))
    return report


_RUNNERS = {
    "kdv": suite_kdv,
    "oracle": suite_oracle,
    "theorem-n2": suite_theorem_n2,
    "finiteness": suite_finiteness,
    "commutativity": suite_commutativity,
}


def run_suite(name, q_coeffs=None, **kwargs):
    """Run one suite (or ``"all"``, which concatenates every suite with prefixed names)."""
    if name == "all":
        checks = []
        for s in SUITES:
            for c in run_suite(s, q_coeffs)["checks"]:
                checks.append(dict(c, name=f"{s}: {c['name']}"))
        return {"suite": "all", "checks": checks}
    if name not in _RUNNERS:
        raise KeyError(f"unknown suite {name!r}")
    return _RUNNERS[name](q_coeffs=q_coeffs, **kwargs)


def passed(report):
    return all(c["status"] == "pass" for c in report["checks"])
