"""Truncated differential polynomials in u^alpha_d and eps over Q[xi, G].

Elements live in a :class:`TruncationContext`: monomials of total u-degree above
``Dmax`` or eps-power above ``Emax`` are dropped by every ring operation.  A
monomial is keyed by ``(eps, udeg, factors)`` with ``factors`` a sorted tuple of
``(alpha, d, exponent)`` triples, so ``sorted(keys)`` is the canonical order.
"""
from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import comb

from ._rational import Q, as_rational
from .params import ParamRational
from . import kernels


class ContextMismatch(ValueError):
    """Raised when two differential polynomials with different cutoffs are combined."""


@dataclass(frozen=True)
class TruncationContext:
    N: int
    Dmax: int
    Emax: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("rank N must be at least 1")
        if self.Dmax < 0 or self.Emax < 0:
            raise ValueError("cutoffs must be nonnegative")

    def to_json(self):
        return {"N": self.N, "Dmax": self.Dmax, "Emax": self.Emax}


def _key(eps, factors):
    merged = {}
    for a, d, e in factors:
        merged[(a, d)] = merged.get((a, d), 0) + e
    factors = tuple((a, d, e) for (a, d), e in sorted(merged.items()) if e)
    return (eps, sum(f[2] for f in factors), factors)


def _diff_order(key):
    return sum(d * e for _, d, e in key[2])


def _var_name(alpha, d):
    if d == 0:
        return f"u{alpha}"
    if d <= 3:
        return f"u{alpha}_" + "x" * d
    return f"u{alpha}_{d}"


class DiffPoly:
    """Element of the truncated ring of differential polynomials.

    Coefficients are stored as raw ``{exponent: rational}`` dictionaries; use
    :meth:`coeff` or :attr:`terms` for :class:`ParamRational` views.
    """

    __slots__ = ("ctx", "_raw")

    def __init__(self, ctx, terms=None):
        self.ctx = ctx
        raw = {}
        for key, c in (terms or {}).items():
            eps, factors = key[0], key[-1]
            key = _key(eps, factors)
            if key[0] > ctx.Emax or key[1] > ctx.Dmax:
                continue
            for a, d, _ in key[2]:
                if not 1 <= a <= ctx.N or d < 0:
                    raise ValueError(f"variable u{a}_{d} outside rank {ctx.N}")
            if not isinstance(c, ParamRational):
                c = ParamRational.const(ctx.N, c)
            c = c.embed(ctx.N)
            if key in raw:
                kernels.dp_add_scaled(raw, {key: c.terms}, None)
            elif c.terms:
                raw[key] = dict(c.terms)
        self._raw = raw

    @classmethod
    def _wrap(cls, ctx, raw):
        obj = cls.__new__(cls)
        obj.ctx = ctx
        obj._raw = raw
        return obj

    # -- constructors --------------------------------------------------------
    @classmethod
    def zero(cls, ctx):
        return cls._wrap(ctx, {})

    @classmethod
    def const(cls, ctx, value):
        if not isinstance(value, ParamRational):
            value = ParamRational.const(ctx.N, value)
        return cls(ctx, {(0, ()): value})

    @classmethod
    def one(cls, ctx):
        return cls.const(ctx, 1)

    @classmethod
    def var(cls, ctx, alpha, d=0):
        """The jet variable ``u^alpha_d``."""
        return cls(ctx, {(0, ((alpha, d, 1),)): 1})

    @classmethod
    def eps(cls, ctx, k=1):
        return cls(ctx, {(k, ()): 1})

    @classmethod
    def monomial(cls, ctx, coeff, eps=0, factors=()):
        """``coeff * eps^eps * prod u^alpha_d^exp`` for ``factors`` of (alpha, d, exp)."""
        return cls(ctx, {(eps, tuple(factors)): coeff})

    # -- views ----------------------------------------------------------------
    @property
    def terms(self):
        return {k: ParamRational._wrap(self.ctx.N, c) for k, c in self._raw.items()}

    def coeff(self, eps=0, factors=()):
        key = _key(eps, factors)
        return ParamRational._wrap(self.ctx.N, dict(self._raw.get(key, {})))

    def sorted_items(self):
        return [(k, ParamRational._wrap(self.ctx.N, self._raw[k])) for k in sorted(self._raw)]

    def __len__(self):
        return len(self._raw)

    def __bool__(self):
        return bool(self._raw)

    def is_zero(self):
        return not self._raw

    def max_eps(self):
        return max((k[0] for k in self._raw), default=-1)

    def max_udeg(self):
        return max((k[1] for k in self._raw), default=-1)

    def min_udeg(self):
        return min((k[1] for k in self._raw), default=-1)

    def variables(self):
        """Set of ``(alpha, d)`` jet variables that occur."""
        return {(a, d) for k in self._raw for a, d, _ in k[2]}

    def filter(self, pred):
        """Terms whose key ``(eps, udeg, factors)`` satisfies ``pred``."""
        return DiffPoly._wrap(self.ctx, {k: dict(c) for k, c in self._raw.items() if pred(k)})

    def eps_part(self, k):
        """Coefficient of eps^k, kept as a DiffPoly with eps-power 0."""
        return DiffPoly._wrap(
            self.ctx, {(0, key[1], key[2]): dict(c) for key, c in self._raw.items() if key[0] == k}
        )

    def udeg_part(self, k):
        return self.filter(lambda key: key[1] == k)

    def truncate(self, Dmax=None, Emax=None):
        """Drop terms above smaller cutoffs (the context itself is unchanged)."""
        Dmax = self.ctx.Dmax if Dmax is None else Dmax
        Emax = self.ctx.Emax if Emax is None else Emax
        return self.filter(lambda key: key[0] <= Emax and key[1] <= Dmax)

    def with_context(self, ctx):
        """Re-home into another context of the same rank, truncating if smaller."""
        if ctx.N != self.ctx.N:
            raise ContextMismatch("rank differs; use substitute() to change rank")
        return DiffPoly._wrap(
            ctx,
            {k: dict(c) for k, c in self._raw.items() if k[0] <= ctx.Emax and k[1] <= ctx.Dmax},
        )

    def is_homogeneous(self):
        """Every eps^k monomial has differential order exactly k."""
        return all(_diff_order(k) == k[0] for k in self._raw)

    def map_coefficients(self, fn):
        out = {}
        for k, c in self._raw.items():
            new = fn(ParamRational._wrap(self.ctx.N, c))
            if new.terms:
                out[k] = dict(new.terms)
        return DiffPoly._wrap(self.ctx, out)

    def evaluate_params(self, xi=None, G=None):
        return self.map_coefficients(lambda c: c.evaluate(xi=xi, G=G))

    # -- ring operations ------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, DiffPoly):
            return DiffPoly.const(self.ctx, other)
        if other.ctx != self.ctx:
            raise ContextMismatch(f"{self.ctx} vs {other.ctx}")
        return other

    def __add__(self, other):
        other = self._check(other)
        acc = {k: dict(c) for k, c in self._raw.items()}
        kernels.dp_add_scaled(acc, other._raw, None)
        return DiffPoly._wrap(self.ctx, acc)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly._wrap(
            self.ctx, {k: {e: -v for e, v in c.items()} for k, c in self._raw.items()}
        )

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if isinstance(other, DiffPoly):
            self._check(other)
            raw = kernels.dp_mul(self._raw, other._raw, self.ctx.Dmax, self.ctx.Emax)
            return DiffPoly._wrap(self.ctx, raw)
        if isinstance(other, ParamRational):
            scale = other.embed(self.ctx.N).terms
            acc = {}
            kernels.dp_add_scaled(acc, self._raw, scale)
            return DiffPoly._wrap(self.ctx, acc)
        c = as_rational(other)
        if not c:
            return DiffPoly.zero(self.ctx)
        return DiffPoly._wrap(
            self.ctx, {k: {e: v * c for e, v in cf.items()} for k, cf in self._raw.items()}
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (Q(1) / as_rational(other))

    def __pow__(self, k):
        if k < 0:
            raise ValueError("use expand_inverse for negative powers")
        out = DiffPoly.one(self.ctx)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, DiffPoly):
            return self.ctx == other.ctx and self._raw == other._raw
        if isinstance(other, (int, ParamRational)) or hasattr(other, "denominator"):
            return self == DiffPoly.const(self.ctx, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx, frozenset((k, frozenset(c.items())) for k, c in self._raw.items())))

    # -- serialization --------------------------------------------------------
    def to_json(self):
        return {
            "ctx": self.ctx.to_json(),
            "terms": [
                {"eps": k[0], "factors": [list(f) for f in k[2]], "coeff": c.to_json()}
                for k, c in self.sorted_items()
            ],
        }

    @classmethod
    def from_json(cls, data):
        ctx = TruncationContext(**data["ctx"])
        terms = {}
        for item in data["terms"]:
            key = (item["eps"], tuple(tuple(f) for f in item["factors"]))
            coeff = ParamRational.from_json(ctx.N, item["coeff"])
            terms[key] = terms.get(key, ParamRational.zero(ctx.N)) + coeff
        return cls(ctx, terms)

    def __str__(self):
        if not self._raw:
            return "0"
        chunks = []
        for k, c in self.sorted_items():
            mono = []
            if k[0]:
                mono.append("eps" if k[0] == 1 else f"eps^{k[0]}")
            for a, d, e in k[2]:
                name = _var_name(a, d)
                mono.append(name if e == 1 else f"{name}^{e}")
            mono = "*".join(mono)
            cs = str(c)
            if not mono:
                chunks.append(cs)
            elif cs == "1":
                chunks.append(mono)
            elif cs == "-1":
                chunks.append("-" + mono)
            elif len(c.terms) > 1:
                chunks.append(f"({cs})*{mono}")
            else:
                chunks.append(f"{cs}*{mono}")
        return " + ".join(chunks).replace("+ -", "- ")

    def __repr__(self):
        return f"DiffPoly({self})"


# -- module-level operations ---------------------------------------------------
def add(p, q):
    return p + q


def mul(p, q):
    return p * q


def _check_same(p, q):
    if p.ctx != q.ctx:
        raise ContextMismatch(f"{p.ctx} vs {q.ctx}")


def dx(p):
    """Total x-derivative: sum over n of u^alpha_{n+1} d/du^alpha_n."""
    out = {}
    for (eps, udeg, factors), c in p._raw.items():
        for i, (a, d, e) in enumerate(factors):
            new = list(factors)
            if e == 1:
                del new[i]
            else:
                new[i] = (a, d, e - 1)
            # the raised variable lands right after (a, d) in sorted order
            for j, (a2, d2, e2) in enumerate(new):
                if (a2, d2) == (a, d + 1):
                    new[j] = (a2, d2, e2 + 1)
                    break
            else:
                new.append((a, d + 1, 1))
                new.sort()
            key = (eps, udeg, tuple(new))
            scaled = c if e == 1 else {pe: pc * e for pe, pc in c.items()}
            kernels.dp_add_scaled(out, {key: scaled}, None)
    return DiffPoly._wrap(p.ctx, out)


def dx_power(p, k):
    for _ in range(k):
        p = dx(p)
    return p


def pderiv(p, alpha, k):
    """Formal partial derivative with respect to ``u^alpha_k``."""
    out = {}
    for (eps, udeg, factors), c in p._raw.items():
        for i, (a, d, e) in enumerate(factors):
            if a == alpha and d == k:
                new = list(factors)
                if e == 1:
                    del new[i]
                else:
                    new[i] = (a, d, e - 1)
                key = (eps, udeg - 1, tuple(new))
                scaled = c if e == 1 else {pe: pc * e for pe, pc in c.items()}
                kernels.dp_add_scaled(out, {key: scaled}, None)
                break
    return DiffPoly._wrap(p.ctx, out)


def has_constant_term(p):
    return any(k[0] == 0 and k[1] == 0 for k in p._raw)


def expand_inverse(q, k=1):
    """Truncated expansion of ``(1 + q)^(-k)``; ``q`` must have no constant term."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    if has_constant_term(q):
        raise ValueError("expand_inverse needs q with zero constant term")
    out = DiffPoly.one(q.ctx)
    power = DiffPoly.one(q.ctx)
    j = 0
    while True:
        j += 1
        power = power * q
        if power.is_zero():
            return out
        out = out + power * ((-1) ** j * comb(k + j - 1, j))


class MiuraMap:
    """Change of variables: entry ``alpha`` is the image of u^alpha (a DiffPoly)."""

    def __init__(self, images):
        images = tuple(images)
        if not images:
            raise ValueError("empty Miura map")
        ctx = images[0].ctx
        for im in images:
            if im.ctx != ctx:
                raise ContextMismatch("Miura images must share a context")
        if len(images) != ctx.N:
            raise ValueError(f"need {ctx.N} images, got {len(images)}")
        self.images = images
        self.ctx = ctx

    @classmethod
    def identity(cls, ctx):
        return cls([DiffPoly.var(ctx, a) for a in range(1, ctx.N + 1)])

    def __call__(self, p):
        return substitute(p, self)

    def __eq__(self, other):
        return isinstance(other, MiuraMap) and self.images == other.images

    def __repr__(self):
        return "MiuraMap(" + ", ".join(str(im) for im in self.images) + ")"


def substitute(p, images, eps2_factor=None):
    """Replace each ``u^gamma_k`` by ``dx^k`` of the image of ``u^gamma``.

    ``images`` is a MiuraMap or a sequence with one entry per variable of ``p``
    (``None`` keeps the variable; only allowed when ranks agree).  The result
    lives in the images' context.  ``eps2_factor`` realizes eps -> sqrt(c) eps:
    a term with eps^(2g) picks up ``c^g``.
    """
    if isinstance(images, MiuraMap):
        images = images.images
    images = list(images)
    if len(images) != p.ctx.N:
        raise ValueError(f"need {p.ctx.N} images, got {len(images)}")
    targets = [im.ctx for im in images if im is not None]
    ctx = targets[0] if targets else p.ctx
    for t in targets:
        if t != ctx:
            raise ContextMismatch("substitution images must share a context")
    for a, im in enumerate(images, start=1):
        if im is None:
            if ctx.N != p.ctx.N:
                raise ValueError("identity entries need equal ranks")
            images[a - 1] = DiffPoly.var(ctx, a)
    if eps2_factor is not None and not isinstance(eps2_factor, ParamRational):
        eps2_factor = ParamRational.const(ctx.N, eps2_factor)
    if eps2_factor is not None:
        eps2_factor = eps2_factor.embed(ctx.N)

    derivs = {}
    powers = {}

    def image(a, d):
        if (a, d) not in derivs:
            derivs[(a, d)] = images[a - 1] if d == 0 else dx(image(a, d - 1))
        return derivs[(a, d)]

    def power(a, d, e):
        if (a, d, e) not in powers:
            powers[(a, d, e)] = image(a, d) if e == 1 else power(a, d, e - 1) * image(a, d)
        return powers[(a, d, e)]

    acc = {}
    for (eps, udeg, factors), c in p._raw.items():
        if eps > ctx.Emax:
            continue
        coeff = ParamRational._wrap(p.ctx.N, c).embed(ctx.N)
        if eps2_factor is not None:
            if eps % 2:
                raise ValueError("eps rescaling needs even eps powers")
            coeff = coeff * eps2_factor ** (eps // 2)
        if not coeff:
            continue
        term = DiffPoly._wrap(ctx, {(eps, 0, ()): dict(coeff.terms)})
        for a, d, e in factors:
            term = term * power(a, d, e)
            if term.is_zero():
                break
        kernels.dp_add_scaled(acc, term._raw, None)
    return DiffPoly._wrap(ctx, acc)


def flow_apply(F, flows):
    """Evolutionary derivative ``sum_{gamma,k} dF/du^gamma_k * dx^k Q^gamma``.

    ``flows[gamma-1]`` is ``Q^gamma = du^gamma/dt`` (``None`` for a zero flow).
    If every flow lacks u-degree-0 terms the result is exact up to the cutoffs.
    """
    flows = list(flows)
    if len(flows) != F.ctx.N:
        raise ValueError(f"need {F.ctx.N} flows, got {len(flows)}")
    for Qg in flows:
        if Qg is not None:
            _check_same(F, Qg)
    out = DiffPoly.zero(F.ctx)
    cache = {}
    for a, k in sorted(F.variables()):
        Qg = flows[a - 1]
        if Qg is None or Qg.is_zero():
            continue
        if (a, k) not in cache:
            cache[(a, k)] = Qg if k == 0 else dx(cache.get((a, k - 1)) or dx_power(Qg, k - 1))
        out = out + pderiv(F, a, k) * cache[(a, k)]
    return out


def _linear_part(m):
    """Constant matrix A with image_alpha = sum_beta A[alpha][beta] u^beta + (higher grading)."""
    N = m.ctx.N
    A = [[Q(0)] * N for _ in range(N)]
    for alpha, im in enumerate(m.images):
        for (eps, udeg, factors), c in im._raw.items():
            if udeg == 0:
                raise ValueError(f"image of u{alpha + 1} has a u-degree-0 term")
            if eps == 0 and udeg == 1:
                (b, d, _), = factors
                if d != 0:
                    raise ValueError("linear part contains derivative terms; not invertible order by order")
                cp = ParamRational._wrap(N, c)
                if not cp.is_constant():
                    raise ValueError("linear part must have constant coefficients")
                A[alpha][b - 1] = cp.constant_value()
    return A


def _invert_matrix(A):
    n = len(A)
    M = [list(row) + [Q(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            raise ValueError("linear part of Miura map is singular")
        M[col], M[piv] = M[piv], M[col]
        inv = Q(1) / M[col][col]
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [row[n:] for row in M]


def invert_miura(m):
    """Order-by-order inverse in the joint (u-degree + eps-power) grading."""
    ctx = m.ctx
    N = ctx.N
    A = _linear_part(m)
    Ainv = _invert_matrix(A)
    xs = [DiffPoly.var(ctx, b) for b in range(1, N + 1)]
    nonlinear = [
        im - sum((xs[b] * A[a][b] for b in range(N) if A[a][b]), DiffPoly.zero(ctx))
        for a, im in enumerate(m.images)
    ]

    def apply_Ainv(vec):
        return [
            sum((vec[b] * Ainv[a][b] for b in range(N) if Ainv[a][b]), DiffPoly.zero(ctx))
            for a in range(N)
        ]

    current = apply_Ainv(xs)
    for _ in range(ctx.Dmax + ctx.Emax + 2):
        corr = [substitute(nl, current) for nl in nonlinear]
        new = apply_Ainv([xs[a] - corr[a] for a in range(N)])
        if new == current:
            return MiuraMap(current)
        current = new
    raise RuntimeError("Miura inversion failed to stabilize")  # pragma: no cover


# -- formal x-integration -------------------------------------------------------
def _monomials(N, udeg, order):
    """All factor tuples with given u-degree and differential order."""
    jets = [(a, d) for a in range(1, N + 1) for d in range(order + 1)]
    out = []
    for combo in combinations_with_replacement(jets, udeg):
        if sum(d for _, d in combo) != order:
            continue
        counts = {}
        for j in combo:
            counts[j] = counts.get(j, 0) + 1
        out.append(tuple(sorted((a, d, e) for (a, d), e in counts.items())))
    return out


def integrate_x(p):
    """The unique ``P`` without constant term such that ``dx(P) == p``.

    Solves the linear system on each graded piece; raises ``ValueError`` if
    ``p`` is not a total x-derivative.
    """
    ctx = p.ctx
    groups = {}
    for key, c in p._raw.items():
        groups.setdefault((key[0], key[1], _diff_order(key)), {})[key[2]] = c
    result = DiffPoly.zero(ctx)
    for (eps, udeg, order), rhs in sorted(groups.items()):
        if order == 0 or udeg == 0:
            raise ValueError("not a total x-derivative: term of differential order 0")
        cands = _monomials(ctx.N, udeg, order - 1)
        images = [dx(DiffPoly._wrap(ctx, {(eps, udeg, f): {(0,) * (ctx.N + 1): Q(1)}})) for f in cands]
        rows = sorted({k[2] for im in images for k in im._raw} | set(rhs))
        index = {r: i for i, r in enumerate(rows)}
        matrix = [[Q(0)] * len(cands) for _ in rows]
        for j, im in enumerate(images):
            for k, c in im._raw.items():
                matrix[index[k[2]]][j] = next(iter(c.values()))
        vec = [ParamRational._wrap(ctx.N, dict(rhs.get(r, {}))) for r in rows]
        sol = _solve(matrix, vec, ctx.N)
        for f, c in zip(cands, sol):
            if c:
                result = result + DiffPoly._wrap(ctx, {(eps, udeg, f): dict(c.terms)})
    return result


def _solve(matrix, vec, nparams):
    rows, cols = len(matrix), len(matrix[0]) if matrix else 0
    M = [list(r) for r in matrix]
    b = list(vec)
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        b[r], b[piv] = b[piv], b[r]
        inv = Q(1) / M[r][c]
        M[r] = [x * inv for x in M[r]]
        b[r] = b[r] * inv
        for i in range(rows):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
                b[i] = b[i] - b[r] * f
        pivots.append(c)
        r += 1
    for i in range(r, rows):
        if b[i]:
            raise ValueError("not a total x-derivative")
    sol = [ParamRational.zero(nparams)] * cols
    for i, c in enumerate(pivots):
        sol[c] = b[i]
    return sol
