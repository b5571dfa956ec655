"""Exact vertex integrals of lambda_g times psi-monomials over DR cycles.

A query lists the marked points of one vertex as ``(multiplicity, psi exponent)``
pairs.  Multiplicities are integer linear forms in the leg symbols a_1..a_n,
stored as coefficient tuples.  Values are :class:`MultiPoly` objects in a_1..a_n.

Supported layouts (anything else in genus 1 or 2 raises UnsupportedPattern):

* genus 0, any exponents: the multinomial ``(m-3)!/prod k_i!``;
* genus >= 1 with every multiplicity zero: 0;
* genus 1, exponents in {0, 1}: two psi-free points ``c, b`` and n points with psi;
* genus 2, exponents in {0, 1}: one psi-free point and n points with psi;
* genus 1 or 2, one psi-decorated point of multiplicity zero, the rest psi-free.

>>> q = VertexIntegralQuery(0, [((-1,), 1), ((0,), 0), ((1,), 1), ((0,), 0), ((0,), 0)])
>>> print(evaluate(q))
2
>>> q = VertexIntegralQuery(1, [((-1, -1), 0), ((0, 0), 0), ((1, 0), 1), ((0, 1), 1)])
>>> print(evaluate(q))
1/8*a1^2 + 1/6*a1*a2 + 1/8*a2^2
"""
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial

from ._rational import Q
from .multipoly import MultiPoly, msym, substitute_linear


class UnsupportedPattern(Exception):
    """No tabulated formula for this psi layout; ``query`` holds the offending input."""

    def __init__(self, query, message=None):
        self.query = query
        self.context = {}
        super().__init__(message or f"no formula for genus {query.genus} layout {query.layout()}")


def _as_coeffs(mult, nvars):
    if isinstance(mult, MultiPoly):
        out = [0] * mult.nvars
        for e, c in mult.terms.items():
            if sum(e) != 1 or c.denominator != 1:
                raise ValueError(f"multiplicity {mult} is not an integer linear form")
            out[e.index(1)] = int(c)
        return tuple(out)
    mult = tuple(int(c) for c in mult)
    if nvars is not None and len(mult) != nvars:
        raise ValueError("multiplicity forms of different lengths")
    return mult


@dataclass(frozen=True)
class VertexIntegralQuery:
    """``genus`` and ``points``: tuple of ``(coefficient tuple, psi exponent)``."""

    genus: int
    points: tuple
    nvars: int = field(default=None, compare=False)

    def __post_init__(self):
        pts = []
        nvars = self.nvars
        for mult, psi in self.points:
            coeffs = _as_coeffs(mult, nvars)
            nvars = len(coeffs)
            if psi < 0:
                raise ValueError("negative psi exponent")
            pts.append((coeffs, int(psi)))
        if not pts:
            raise ValueError("a vertex needs at least one point")
        if any(sum(col) for col in zip(*(p[0] for p in pts))):
            raise ValueError("multiplicities must sum to zero")
        object.__setattr__(self, "points", tuple(pts))
        object.__setattr__(self, "nvars", nvars)

    @property
    def m(self):
        return len(self.points)

    def layout(self):
        return tuple(p[1] for p in self.points)

    def dimension_ok(self):
        """``sum psi == g - 3 + m``, i.e. lambda_g DR_g psi^k has top degree."""
        return sum(self.layout()) == self.genus - 3 + self.m

    def mults(self):
        return [MultiPoly.linear(c) for c, _ in self.points]

    def to_json(self):
        return {
            "genus": self.genus,
            "points": [{"mult": list(c), "psi": k} for c, k in self.points],
        }

    @classmethod
    def from_json(cls, data):
        return cls(data["genus"], [(p["mult"], p["psi"]) for p in data["points"]])


# -- closed forms in local symbols ----------------------------------------------
def genus0_value(exponents):
    m = len(exponents)
    if sum(exponents) != m - 3:
        return Q(0)
    out = Q(factorial(m - 3))
    for k in exponents:
        out /= factorial(k)
    return out


@lru_cache(maxsize=None)
def genus0_string_oracle(exponents):
    """<tau_k1 ... tau_km>_0 from the string equation and <tau_0^3> = 1."""
    exponents = tuple(sorted(exponents))
    m = len(exponents)
    if m < 3 or sum(exponents) != m - 3:
        return Q(0)
    if m == 3:
        return Q(1)
    # a tau_0 exists since sum k = m - 3 < m
    rest = list(exponents[1:])
    total = Q(0)
    for i, k in enumerate(rest):
        if k:
            lowered = rest[:i] + [k - 1] + rest[i + 1:]
            total += genus0_string_oracle(tuple(lowered))
    return total


@lru_cache(maxsize=None)
def unified_genus1_local(n):
    """Genus-1 value in local symbols (x_1..x_n, b) for psi on the x points."""
    nv = n + 1
    x = lambda lam: _embed(msym(lam, n), nv) if len(lam) <= n else MultiPoly.zero(nv)
    b = MultiPoly.var(nv, nv)
    val = x((2,)) / 48 + x((1, 1)) / 36 + b * x((1,)) / 24 + b * b / 24
    return val * factorial(n + 1)


Q_COEFFS = {
    (4,): Q(1, 6912),
    (2, 2): Q(29, 69120),
    (3, 1): Q(11, 34560),
    (2, 1, 1): Q(1, 1728),
    (1, 1, 1, 1): Q(7, 8640),
}


@lru_cache(maxsize=None)
def genus2_local(n, coeffs=None):
    """Genus-2 value in the n psi-decorated multiplicities."""
    table = Q_COEFFS if coeffs is None else dict(coeffs)
    out = MultiPoly.zero(n)
    for lam, c in table.items():
        if len(lam) <= n:
            out = out + msym(lam, n) * c
    return out * factorial(n + 2)


def _embed(p, nvars):
    return MultiPoly._wrap(nvars, {e + (0,) * (nvars - p.nvars): c for e, c in p.terms.items()})


# -- public pattern evaluators ----------------------------------------------------
def genus0(q):
    if q.genus != 0:
        raise UnsupportedPattern(q, "genus0 called on positive genus")
    return MultiPoly.const(q.nvars, genus0_value(q.layout()))


def zero_multiplicity_rule(q):
    """``DR_g(0,...,0) lambda_g = (-1)^g lambda_g^2 = 0`` for g >= 1."""
    if q.genus < 1 or any(any(c) for c, _ in q.points):
        raise UnsupportedPattern(q, "zero rule needs g >= 1 and vanishing multiplicities")
    return MultiPoly.zero(q.nvars)


def _split(q):
    free = [i for i, (_, k) in enumerate(q.points) if k == 0]
    psi = [i for i, (_, k) in enumerate(q.points) if k == 1]
    return free, psi


def genus1_unified(q):
    free, psi = _split(q)
    if q.genus != 1 or len(free) != 2 or len(free) + len(psi) != q.m:
        raise UnsupportedPattern(q)
    mults = q.mults()
    images = [mults[i] for i in psi] + [mults[free[1]]]
    return substitute_linear(unified_genus1_local(len(psi)), images, q.nvars)


def genus1_seed(b1, b2):
    """``int_{DR_1(-b1-b2, b1, b2)} lambda_1 psi_1 = (b1^2 + b2^2)/24``."""
    return (b1 * b1 + b2 * b2) * Q(1, 24)


def genus2_Q(q, coeffs=None):
    free, psi = _split(q)
    if q.genus != 2 or len(free) != 1 or len(free) + len(psi) != q.m:
        raise UnsupportedPattern(q)
    if isinstance(coeffs, dict):
        coeffs = tuple(sorted(coeffs.items()))
    mults = q.mults()
    return substitute_linear(genus2_local(len(psi), coeffs), [mults[i] for i in psi], q.nvars)


def single_zero_point(q):
    """One psi-decorated point of multiplicity zero, all other points psi-free.

    In terms of the power sums p_k of the multiplicities: ``p_2/24`` in genus 1
    and ``(7 p_2^2 - 2 p_4)/5760`` in genus 2.  These coefficients were read off
    from the Lax-operator KdV densities and are checked against them in tests.
    """
    heavy = [i for i, (_, k) in enumerate(q.points) if k]
    if not 1 <= q.genus <= 2 or len(heavy) != 1 or any(q.points[heavy[0]][0]):
        raise UnsupportedPattern(q)
    mults = q.mults()
    p2 = sum((b * b for b in mults), MultiPoly.zero(q.nvars))
    if q.genus == 1:
        return p2 / 24
    p4 = sum((b ** 4 for b in mults), MultiPoly.zero(q.nvars))
    return (p2 * p2 * 7 - p4 * 2) / 5760


_Q_OVERRIDE = None


def evaluate(q, q_coeffs=None):
    """Dispatch a query to the first matching formula; 0 when dimensions do not match."""
    if not q.dimension_ok():
        return MultiPoly.zero(q.nvars)
    if q.genus == 0:
        return genus0(q)
    if not any(any(c) for c, _ in q.points):
        return zero_multiplicity_rule(q)
    layout = q.layout()
    if max(layout) <= 1:
        if q.genus == 1:
            return genus1_unified(q)
        if q.genus == 2:
            return genus2_Q(q, q_coeffs if q_coeffs is not None else _Q_OVERRIDE)
    return single_zero_point(q)


def set_q_override(coeffs):
    """Replace the genus-2 coefficient table (used for negative-control runs); None restores."""
    global _Q_OVERRIDE
    _Q_OVERRIDE = None if coeffs is None else tuple(sorted(coeffs.items()))
