"""KdV flows from the Lax operator ``L = d^2 + 2 eps^-2 u``.

The coefficients of pseudodifferential operators are :class:`LaurentPoly`
objects: polynomials in the jets u_k of a single field with Laurent powers of
eps.  Everything here is independent of the hierarchy assembly code and serves
as its reference for the rank-one sector.

>>> print(kdv_P(1))
1/2*u1^2 + 1/12*eps^2*u1_xx
"""
from math import comb

from ._rational import Q, as_rational
from .diffpoly import DiffPoly, TruncationContext, integrate_x


class LaurentPoly:
    """``{(eps power, ((d, exp), ...)): rational}`` in one field u with Laurent eps."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: c for k, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, c, eps=0):
        return cls({(eps, ()): Q(c)})

    @classmethod
    def u(cls, d=0, eps=0):
        return cls({(eps, ((d, 1),)): Q(1)})

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return LaurentPoly(out)

    def __neg__(self):
        return LaurentPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            c = as_rational(other)
            return LaurentPoly({k: v * c for k, v in self.terms.items()})
        out = {}
        for (ea, fa), ca in self.terms.items():
            for (eb, fb), cb in other.terms.items():
                f = dict(fa)
                for d, e in fb:
                    f[d] = f.get(d, 0) + e
                key = (ea + eb, tuple(sorted(f.items())))
                out[key] = out.get(key, 0) + ca * cb
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and self.terms == other.terms

    def dx(self):
        out = {}
        for (e, f), c in self.terms.items():
            for i, (d, k) in enumerate(f):
                g = dict(f)
                g[d] -= 1
                if not g[d]:
                    del g[d]
                g[d + 1] = g.get(d + 1, 0) + 1
                key = (e, tuple(sorted(g.items())))
                out[key] = out.get(key, 0) + c * k
        return LaurentPoly(out)

    def min_eps(self):
        return min((e for e, _ in self.terms), default=0)

    def to_diffpoly(self, ctx):
        """Convert to a rank-one DiffPoly; eps powers must be nonnegative."""
        if self.min_eps() < 0:
            raise ValueError("negative eps powers survive")
        return DiffPoly(ctx, {(e, tuple((1, d, k) for d, k in f)): c for (e, f), c in self.terms.items()})


class PsdOperator:
    """Truncated pseudodifferential operator ``sum_k coeffs[k] d^k`` with ``k >= -tail``."""

    def __init__(self, coeffs, tail):
        self.tail = tail
        self.coeffs = {k: c for k, c in coeffs.items() if c and k >= -tail}

    def order(self):
        return max(self.coeffs, default=None)

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        return PsdOperator(out, min(self.tail, other.tail))

    def __neg__(self):
        return PsdOperator({k: -c for k, c in self.coeffs.items()}, self.tail)

    def __sub__(self, other):
        return self + (-other)

    def plus(self):
        """Differential part (orders >= 0)."""
        return PsdOperator({k: c for k, c in self.coeffs.items() if k >= 0}, self.tail)

    def __eq__(self, other):
        return isinstance(other, PsdOperator) and self.coeffs == other.coeffs

    def __repr__(self):
        return "PsdOperator(" + ", ".join(f"{k}: {c.terms}" for k, c in sorted(self.coeffs.items())) + ")"


def _binom(k, i):
    # generalized binomial coefficient, valid for negative k
    if k >= 0:
        return comb(k, i)
    return (-1) ** i * comb(-k + i - 1, i)


def compose(A, B):
    """Symbol calculus ``d^k f = sum_i binom(k, i) f^(i) d^(k-i)``, cut at ``-tail``."""
    tail = min(A.tail, B.tail)
    out = {}
    for k, a in A.coeffs.items():
        for j, b in B.coeffs.items():
            deriv = b
            i = 0
            while k + j - i >= -tail:
                if not deriv:
                    break
                c = _binom(k, i)
                if c:
                    o = k + j - i
                    term = a * deriv * c
                    out[o] = out[o] + term if o in out else term
                if k >= 0 and i >= k:
                    break
                i += 1
                deriv = deriv.dx()
    return PsdOperator(out, tail)


def lax_L(tail):
    return PsdOperator({2: LaurentPoly.const(1), 0: LaurentPoly.u(0, eps=-2) * 2}, tail)


def sqrt_L(L):
    """The operator S = d + lower with S o S = L (to the tail depth)."""
    if L.order() != 2 or L.coeffs[2] != LaurentPoly.const(1):
        raise ValueError("sqrt_L needs a monic second-order operator")
    S = PsdOperator({1: LaurentPoly.const(1)}, L.tail)
    for j in range(1, L.tail + 2):
        order = 1 - j
        if order < -L.tail:
            break
        sq = compose(S, S)
        target = 2 - j
        resid = L.coeffs.get(target, LaurentPoly()) - sq.coeffs.get(target, LaurentPoly())
        if resid:
            S.coeffs[order] = resid * Q(1, 2)
    return S


def power(S, k):
    out = S
    for _ in range(k - 1):
        out = compose(out, S)
    return out


def _double_factorial(n):
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def kdv_commutator(d):
    """The multiplication operator ``[(L^(d+1/2))_+, L]`` (order-0 coefficient)."""
    tail = 2 * d + 2
    L = lax_L(tail)
    S = sqrt_L(L)
    A = power(S, 2 * d + 1).plus()
    C = compose(A, L) - compose(L, A)
    extra = [k for k, c in C.coeffs.items() if k != 0 and c]
    if extra:
        raise ArithmeticError(f"commutator has orders {extra}")
    return C.coeffs.get(0, LaurentPoly())


def kdv_P(d, ctx=None):
    """``P_d`` with ``dx P_d = eps^(2d+2) / (2 (2d+1)!!) [(L^(d+1/2))_+, L]``."""
    if d < 0:
        raise ValueError("d must be nonnegative")
    comm = kdv_commutator(d)
    flow = comm * LaurentPoly.const(Q(1, 2 * _double_factorial(2 * d + 1)), eps=2 * d + 2)
    full = TruncationContext(1, d + 1, 2 * d)
    P = integrate_x(flow.to_diffpoly(full))
    if ctx is not None:
        if ctx.N != 1:
            raise ValueError("kdv_P lives in rank one")
        P = P.with_context(ctx)
    return P
