"""Assembly of the flows P^alpha_{beta,d}, reference closed forms, Miura change of variables.

``assemble_P`` sums decorated trees of the family against the vertex-integral
oracle and extracts coefficients: a monomial ``prod a_j^{k_j}`` of the integral
becomes ``prod u^{alpha_j}_{k_j}``, weighted by ``eps^{2g}/n!``.
"""
from collections import namedtuple
from itertools import combinations_with_replacement, product
from math import factorial

from ._rational import Q
from . import kernels
from .diffpoly import (
    DiffPoly,
    MiuraMap,
    TruncationContext,
    _key,
    dx,
    expand_inverse,
    flow_apply,
    invert_miura,
    substitute,
)
from .drcycle import UnsupportedPattern, VertexIntegralQuery, evaluate
from .fcohft import FamilySpec, check_nilpotent, decorated_trees, family_key
from .multipoly import MultiPoly
from .params import ParamRational
from .trees import balance_multiplicities, genus_bound


class FlowTable(dict):
    """``(alpha, beta, d) -> DiffPoly``.  ``kind`` is "P" (densities) or "flow"."""

    def __init__(self, ctx, entries=None, kind="P"):
        super().__init__(entries or {})
        self.ctx = ctx
        self.kind = kind

    def flow(self, alpha, beta, d):
        """``du^alpha/dt^beta_d``."""
        p = self[(alpha, beta, d)]
        return dx(p) if self.kind == "P" else p

    def flows_for(self, beta, d):
        return [self.flow(a, beta, d) for a in range(1, self.ctx.N + 1)]

    def to_json(self):
        return {
            "kind": self.kind,
            "entries": [
                {"alpha": a, "beta": b, "d": d, "poly": p.to_json()} for (a, b, d), p in sorted(self.items())
            ],
        }


def _tuples(N, n, mode):
    """Vector-index tuples with their weights relative to the labeled sum."""
    if mode == "labeled":
        for t in product(range(1, N + 1), repeat=n):
            yield t, 1
    elif mode == "orbit":
        for t in combinations_with_replacement(range(1, N + 1), n):
            w = factorial(n)
            for a in set(t):
                w //= factorial(t.count(a))
            yield t, w
    else:
        raise ValueError(f"unknown summation mode {mode!r}")


def tree_integral(dt, n, q_coeffs=None):
    """Product of vertex integrals of a decorated tree, as a MultiPoly in a_1..a_n."""
    forms = balance_multiplicities(dt.tree, n)
    val = MultiPoly.const(n, 1)
    for v in range(dt.tree.nvertices):
        q = VertexIntegralQuery(dt.tree.genus[v], dt.vertex_points(v, n, forms), nvars=n)
        try:
            val = val * evaluate(q, q_coeffs)
        except UnsupportedPattern as exc:
            exc.context["tree"] = dt.to_json(n)
            exc.context["vertex"] = v
            raise
        if not val:
            break
    return val


def genus_range(spec, ctx, d):
    top = ctx.Emax // 2
    if spec.N >= 2:
        top = min(top, genus_bound(spec.N, d))
    return range(top + 1)


def assemble_P(alpha, beta, d, spec, ctx, mode="labeled", breakdown=False, q_coeffs=None):
    """The density ``P^alpha_{beta,d}`` truncated to ``ctx``.

    ``mode="labeled"`` sums all index tuples; ``"orbit"`` sums sorted tuples with
    multinomial weights (equal result, fewer terms).  With ``breakdown=True`` a dict
    from family key to partial sums is returned alongside the total.
    """
    if ctx.N != spec.N:
        raise ValueError("context rank differs from the family rank")
    if not check_nilpotent(spec):
        raise ValueError("R1 must square to zero")
    if d < 0:
        raise ValueError("d must be nonnegative")
    acc = {}
    parts = {}
    for g in genus_range(spec, ctx, d):
        for n in range(ctx.Dmax + 1):
            if 2 * g + n == 0:
                continue
            inv_nfact = Q(1, factorial(n))
            for vectors, tw in _tuples(spec.N, n, mode):
                for dt in decorated_trees(alpha, beta, d, vectors, g, spec):
                    val = tree_integral(dt, n, q_coeffs)
                    if not val:
                        continue
                    local = {}
                    for e, c in val.terms.items():
                        key = _key(2 * g, [(vectors[j], k, 1) for j, k in enumerate(e)])
                        scale = c * tw * inv_nfact
                        kernels.dp_add_scaled(local, {key: {pe: pc * scale for pe, pc in dt.weight.terms.items()}}, None)
                    kernels.dp_add_scaled(acc, local, None)
                    if breakdown:
                        fk = family_key(dt)
                        kernels.dp_add_scaled(parts.setdefault(fk, {}), local, None)
    total = DiffPoly._wrap(ctx, acc)
    if breakdown:
        return total, {k: DiffPoly._wrap(ctx, v) for k, v in parts.items()}
    return total


def assemble_table(keys, spec, ctx, mode="labeled"):
    return FlowTable(ctx, {k: assemble_P(*k, spec, ctx, mode=mode) for k in keys})


# -- closed forms --------------------------------------------------------------------------
def _rank2_params(spec, ctx):
    if spec.N != 2 or ctx.N != 2:
        raise ValueError("closed forms are for rank 2")
    return spec.r1(1, 2), spec.G[0], spec.G[1]


def _building_blocks(spec, ctx):
    xi, G1, G2 = _rank2_params(spec, ctx)
    u1, u2 = DiffPoly.var(ctx, 1), DiffPoly.var(ctx, 2)
    inv = {k: expand_inverse(u2 * xi, k) for k in range(1, 9)}
    A = u1 + u2 * u2 * xi / 2
    return xi, G1, G2, u1, u2, inv, A


def golden_P110(spec, ctx):
    """Closed form of ``P^1_{1,0}``: genus 0 and genus 1 parts."""
    xi, G1, G2, u1, u2, inv, A = _building_blocks(spec, ctx)
    e2 = DiffPoly.eps(ctx, 2)
    u2x, u2xx = DiffPoly.var(ctx, 2, 1), DiffPoly.var(ctx, 2, 2)
    genus1 = (
        u2xx * inv[3] * (-xi * G1 / 24)
        + u2x * u2x * inv[4] * (xi * xi * G1 / 12)
        + u2xx * inv[1] * (xi * G2 / 24)
    )
    return A * inv[1] + e2 * genus1


Contribution = namedtuple("Contribution", "genus trees poly")


def golden_P120_contributions(spec, ctx):
    """Closed forms of the tree contributions to ``P^1_{2,0}``, tagged by genus and tree numbers."""
    xi, G1, G2, u1, u2, inv, A = _building_blocks(spec, ctx)
    e2, e4 = DiffPoly.eps(ctx, 2), DiffPoly.eps(ctx, 4)
    v = lambda k: DiffPoly.var(ctx, 2, k)
    Ax, Axx = dx(A), dx(dx(A))
    out = [
        Contribution(0, (1,), u2 * u2 * (-xi / 2)),
        Contribution(0, (2,), u1 * u1 * inv[2] * (-xi / 2)),
        Contribution(0, (3,), u1 * u2 * u2 * inv[2] * (-xi * xi / 2)),
        Contribution(0, (4,), u1 * u2 * inv[1] * xi),
        Contribution(0, (5,), u2 ** 4 * inv[2] * (-xi ** 3 / 8)),
        Contribution(0, (6,), u2 ** 3 * inv[1] * (xi * xi / 2)),
    ]
    g1 = [
        ((1,), v(2) * (-xi * G2 / 24)),
        (
            (2, 3),
            A * v(2) * inv[4] * (xi ** 2 * G1 / 8)
            + A * v(1) * v(1) * inv[5] * (-xi ** 3 * G1 / 3)
            + Ax * v(1) * inv[4] * (xi ** 2 * G1 / 4)
            + Axx * inv[3] * (-xi * G1 / 12),
        ),
        ((4,), v(2) * inv[3] * (xi * G1 / 24) + v(1) * v(1) * inv[4] * (-xi ** 2 * G1 / 12)),
        ((5, 7), A * v(2) * inv[2] * (-xi ** 2 * G2 / 24)),
        ((6, 8), DiffPoly.zero(ctx)),
        ((9,), u2 * v(2) * inv[1] * (xi ** 2 * G2 / 24)),
    ]
    out += [Contribution(1, t, e2 * p) for t, p in g1]
    tree2 = G1 ** 2 * (
        v(4) * inv[5] * (xi ** 2 / 288)
        + v(2) * v(2) * inv[6] * (-29 * xi ** 3 / 1152)
        + v(3) * v(1) * inv[6] * (-11 * xi ** 3 / 288)
        + v(2) * v(1) * v(1) * inv[7] * (5 * xi ** 4 / 24)
        + v(1) ** 4 * inv[8] * (-49 * xi ** 5 / 288)
    )
    tree3 = G1 * G2 * (
        v(2) * v(2) * inv[4] * (xi ** 3 / 192)
        + v(2) * v(1) * v(1) * inv[5] * (-xi ** 4 / 72)
        + v(3) * v(1) * inv[4] * (xi ** 3 / 96)
        + v(4) * inv[3] * (-xi ** 2 / 288)
    )
    g2 = [
        ((1,), DiffPoly.zero(ctx)),
        ((2,), tree2),
        ((3,), tree3),
        ((4,), DiffPoly.zero(ctx)),
        ((5,), v(2) * v(2) * inv[2] * (-xi ** 3 * G2 ** 2 / 1152)),
        ((6,), DiffPoly.zero(ctx)),
    ]
    out += [Contribution(2, t, e4 * p) for t, p in g2]
    return out


def special_miura(spec, ctx):
    """``u~1 = u1 + xi (u2)^2/2 + eps^2/24 dx^2(xi G2 u2 + G1/(1 + xi u2))``, ``u~2 = u2``."""
    xi, G1, G2, u1, u2, inv, A = _building_blocks(spec, ctx)
    inner = u2 * (xi * G2) + inv[1] * G1
    corr = DiffPoly.eps(ctx, 2) * dx(dx(inner)) / 24
    return MiuraMap([A + corr, u2])


def theorem_flows(spec, ctx):
    """The four rank-2 primary flows in the transformed variables, as series.

    Keys ``(alpha, beta, 0)`` give ``du~^alpha/dt^beta_0``.
    """
    xi, G1, G2, w1, w2, inv, _ = _building_blocks(spec, ctx)
    e2 = DiffPoly.eps(ctx, 2)
    q = w1 * inv[1]
    nested = dx(dx(q) * inv[1]) * inv[1]
    inner = w1 * w2 * inv[1] - w1 * w1 * inv[2] / 2 - e2 * nested * G1 / 12
    return FlowTable(
        ctx,
        {
            (1, 1, 0): dx(q),
            (2, 1, 0): DiffPoly.zero(ctx),
            (1, 2, 0): dx(inner) * xi,
            (2, 2, 0): DiffPoly.var(ctx, 2, 1),
        },
        kind="flow",
    )


def miura_flows(P, m, betas=None):
    """Transform every flow of ``P`` to the variables ``u~ = m(u)``.

    ``du~^alpha/dt = flow_apply(m_alpha, flows)`` is computed in u and then rewritten
    in u~ through the inverse map.
    """
    ctx = P.ctx
    if m.ctx != ctx:
        raise ValueError("Miura map lives in another context")
    inverse = invert_miura(m)
    keys = sorted({(b, d) for (_, b, d) in P})
    if betas is not None:
        keys = [k for k in keys if k in betas]
    out = FlowTable(ctx, kind="flow")
    for b, d in keys:
        if any((a, b, d) not in P for a in range(1, ctx.N + 1)):
            continue
        flows = P.flows_for(b, d)
        for a in range(1, ctx.N + 1):
            out[(a, b, d)] = substitute(flow_apply(m.images[a - 1], flows), inverse)
    return out


# -- compatibility ---------------------------------------------------------------------
def certified_degree(flows, ctx):
    """Largest u-degree up to which truncated evolutionary derivatives are exact."""
    if all(f.is_zero() or f.min_udeg() >= 1 for f in flows):
        return ctx.Dmax
    top = max((f.max_udeg() for f in flows), default=1)
    return ctx.Dmax - max(top - 1, 0)


def check_commutativity(P, pairs, ctx=None):
    """Commutators of flow pairs on every u^alpha; report dict with residuals in the certified range."""
    ctx = ctx or P.ctx
    checks = []
    for (b1, d1), (b2, d2) in pairs:
        X = P.flows_for(b1, d1)
        Y = P.flows_for(b2, d2)
        cert = min(certified_degree(X, ctx), certified_degree(Y, ctx))
        for a in range(1, ctx.N + 1):
            comm = flow_apply(Y[a - 1], X) - flow_apply(X[a - 1], Y)
            resid = comm.truncate(Dmax=cert)
            checks.append(
                {
                    "name": f"[t{b1}_{d1}, t{b2}_{d2}] u{a}",
                    "status": "pass" if resid.is_zero() else "fail",
                    "residual": len(resid),
                    "certified_udeg": cert,
                    "certified_eps": ctx.Emax,
                }
            )
    return {"suite": "commutativity", "checks": checks}


# -- rank one -----------------------------------------------------------------------------
def rank1_spec():
    """Trivial rank-one family (G = 1, no R-matrix): its hierarchy is KdV."""
    return FamilySpec.make(1, {}, [1])


def trivial_rank1(ctx, dmax=2):
    """``P_d`` for d <= dmax from one-vertex trees and the oracle."""
    spec = rank1_spec()
    return FlowTable(ctx, {(1, 1, d): assemble_P(1, 1, d, spec, ctx) for d in range(dmax + 1)})


def kdv_rescaled(P, ctx, alpha=2):
    """Embed a rank-one polynomial as u -> u^alpha with eps^{2g} -> (G^alpha)^g eps^{2g}."""
    images = [DiffPoly.var(ctx, alpha)]
    return substitute(P.with_context(TruncationContext(1, ctx.Dmax, ctx.Emax)), images,
                      eps2_factor=ParamRational.G(ctx.N, alpha))
