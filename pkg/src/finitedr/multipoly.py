"""Exact polynomials in multiplicity symbols a_1..a_n and the monomial symmetric basis.

>>> p = (3 * msym((2,), 2) + 4 * msym((1, 1), 2)) / 24
>>> print(coef_extract(p, (1, 1)))
1/6
>>> msym_str(p)
'1/8*m(2) + 1/6*m(1,1)'
"""
from itertools import permutations

from ._rational import Q, as_rational, format_rational


class NotSymmetric(ValueError):
    pass


class MultiPoly:
    """Sparse polynomial ``{exponent vector: rational}`` in ``nvars`` symbols."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        out = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != nvars or any(x < 0 for x in e):
                raise ValueError(f"bad exponent vector {e} for {nvars} variables")
            out[e] = out.get(e, 0) + as_rational(c)
        self.terms = {e: c for e, c in out.items() if c}

    @classmethod
    def _wrap(cls, nvars, terms):
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj.terms = terms
        return obj

    @classmethod
    def const(cls, nvars, c):
        c = as_rational(c)
        return cls._wrap(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def var(cls, nvars, i):
        """The symbol ``a_i`` (1-based)."""
        e = [0] * nvars
        e[i - 1] = 1
        return cls._wrap(nvars, {tuple(e): Q(1)})

    @classmethod
    def linear(cls, coeffs):
        """Linear form ``sum coeffs[i] a_{i+1}``."""
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            if c:
                e = [0] * n
                e[i] = 1
                terms[tuple(e)] = Q(c)
        return cls._wrap(n, terms)

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ValueError("different numbers of variables")
            return other
        return MultiPoly.const(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MultiPoly._wrap(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._wrap(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = as_rational(other)
            if not c:
                return MultiPoly.zero(self.nvars)
            return MultiPoly._wrap(self.nvars, {e: v * c for e, v in self.terms.items()})
        other = self._coerce(other)
        out = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        return MultiPoly._wrap(self.nvars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (Q(1) / as_rational(other))

    def __pow__(self, k):
        out = MultiPoly.const(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    @classmethod
    def zero(cls, nvars):
        return cls._wrap(nvars, {})

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        try:
            return self == MultiPoly.const(self.nvars, other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def degrees(self):
        return {sum(e) for e in self.terms}

    def is_homogeneous(self, degree=None):
        degs = self.degrees()
        if not degs:
            return True
        return len(degs) == 1 and (degree is None or degs == {degree})

    def is_symmetric(self):
        return all(
            self.terms.get(tuple(p)) == c for e, c in self.terms.items() for p in set(permutations(e))
        )

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, Q(0))

    def __str__(self):
        if not self.terms:
            return "0"
        chunks = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(
                (f"a{i}" if k == 1 else f"a{i}^{k}") for i, k in enumerate(e, start=1) if k
            )
            cs = format_rational(c)
            chunks.append(cs if not mono else mono if c == 1 else f"{cs}*{mono}")
        return " + ".join(chunks).replace("+ -", "- ")

    def __repr__(self):
        return f"MultiPoly({self})"


def _partition(lam):
    lam = tuple(int(x) for x in lam if x)
    if any(x < 0 for x in lam):
        raise ValueError("partition parts must be positive")
    return tuple(sorted(lam, reverse=True))


def msym(lam, n):
    """Monomial symmetric function ``m_lam(a_1..a_n)``."""
    lam = _partition(lam)
    if len(lam) > n:
        raise ValueError(f"partition {lam} longer than {n} variables")
    base = lam + (0,) * (n - len(lam))
    return MultiPoly._wrap(n, {p: Q(1) for p in set(permutations(base))})


def coef_extract(p, k):
    k = tuple(k)
    if len(k) != p.nvars:
        raise ValueError("exponent vector length mismatch")
    return p.terms.get(k, Q(0))


def set_var_zero(p, i):
    """Substitute ``a_i = 0`` and drop that variable."""
    if not 1 <= i <= p.nvars:
        raise ValueError(f"index {i} out of range")
    j = i - 1
    return MultiPoly._wrap(
        p.nvars - 1, {e[:j] + e[j + 1:]: c for e, c in p.terms.items() if e[j] == 0}
    )


def substitute_linear(p, images, nvars=None):
    """Compose ``p`` with ``a_i -> images[i-1]``.

    ``images`` are MultiPolys (typically linear forms) in a common variable set,
    or integer coefficient lists accepted by :meth:`MultiPoly.linear`.
    """
    if len(images) != p.nvars:
        raise ValueError(f"need {p.nvars} images")
    images = [im if isinstance(im, MultiPoly) else MultiPoly.linear(im) for im in images]
    if nvars is None:
        nvars = images[0].nvars if images else 0
    out = MultiPoly.zero(nvars)
    powers = {}
    for e, c in p.terms.items():
        term = MultiPoly.const(nvars, c)
        for i, k in enumerate(e):
            if k:
                if (i, k) not in powers:
                    powers[(i, k)] = images[i] ** k
                term = term * powers[(i, k)]
        out = out + term
    return out


def to_msym(p):
    """Coordinates in the m_lambda basis; raises :class:`NotSymmetric` otherwise.

    Uses repeated leading-term subtraction.
    """
    rest = p
    out = {}
    while rest.terms:
        lead = max(rest.terms)
        lam = _partition(lead)
        c = rest.terms[lead]
        if tuple(sorted(lead, reverse=True)) != lead:
            raise NotSymmetric(f"{p} is not symmetric")
        out[lam] = c
        rest = rest - msym(lam, p.nvars) * c
    return dict(sorted(out.items(), key=lambda kv: (-sum(kv[0]), [-x for x in kv[0]])))


def from_msym(coeffs, n):
    out = MultiPoly.zero(n)
    for lam, c in coeffs.items():
        out = out + msym(lam, n) * c
    return out


def msym_str(p):
    """Debug rendering in the m_lambda basis."""
    parts = []
    for lam, c in to_msym(p).items():
        name = "m(" + ",".join(map(str, lam)) + ")" if lam else "1"
        parts.append(f"{format_rational(c)}*{name}")
    return " + ".join(parts) or "0"
