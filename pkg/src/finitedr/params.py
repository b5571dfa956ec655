"""Polynomials over Q in the formal parameters xi, G^1, ..., G^N.

An exponent vector has length N+1: position 0 is the power of xi, positions
1..N the powers of G^1..G^N.
"""
from ._rational import Q, as_rational, format_rational
from . import kernels


class ParamRational:
    """Immutable sparse polynomial in ``xi, G^1..G^N`` with exact rational coefficients.

    >>> N = 2
    >>> p = ParamRational.xi(N) * ParamRational.G(N, 2) + 1
    >>> str(p)
    '1 + xi*G2'
    """

    __slots__ = ("terms", "nparams")

    def __init__(self, nparams, terms=None):
        self.nparams = nparams
        out = {}
        if terms:
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != nparams + 1:
                    raise ValueError(f"exponent vector {e} has wrong length for N={nparams}")
                if any(x < 0 for x in e):
                    raise ValueError(f"negative exponent in {e}")
                c = as_rational(c)
                if c:
                    out[e] = out.get(e, 0) + c
        self.terms = {e: c for e, c in out.items() if c}

    @classmethod
    def _wrap(cls, nparams, terms):
        # trusted constructor: terms already canonical (no zeros, tuple keys)
        obj = cls.__new__(cls)
        obj.nparams = nparams
        obj.terms = terms
        return obj

    @classmethod
    def const(cls, nparams, value):
        value = as_rational(value)
        if not value:
            return cls._wrap(nparams, {})
        return cls._wrap(nparams, {(0,) * (nparams + 1): value})

    @classmethod
    def zero(cls, nparams):
        return cls._wrap(nparams, {})

    @classmethod
    def one(cls, nparams):
        return cls.const(nparams, 1)

    @classmethod
    def xi(cls, nparams):
        return cls._wrap(nparams, {(1,) + (0,) * nparams: Q(1)})

    @classmethod
    def G(cls, nparams, i):
        if not 1 <= i <= nparams:
            raise ValueError(f"G index {i} out of range 1..{nparams}")
        e = [0] * (nparams + 1)
        e[i] = 1
        return cls._wrap(nparams, {tuple(e): Q(1)})

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, ParamRational):
            if other.nparams != self.nparams:
                raise ValueError("parameter rings of different rank")
            return other
        return ParamRational.const(self.nparams, other)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return ParamRational._wrap(self.nparams, kernels.pr_add(self.terms, other.terms))

    __radd__ = __add__

    def __neg__(self):
        return ParamRational._wrap(self.nparams, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, ParamRational):
            try:
                c = as_rational(other)
            except TypeError:
                return NotImplemented
            if not c:
                return ParamRational.zero(self.nparams)
            return ParamRational._wrap(self.nparams, {e: v * c for e, v in self.terms.items()})
        other = self._coerce(other)
        return ParamRational._wrap(self.nparams, kernels.pr_mul(self.terms, other.terms))

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = as_rational(other)
        return self * (Q(1) / c)

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative powers are not polynomial")
        out = ParamRational.one(self.nparams)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, ParamRational):
            return self.terms == other.terms
        try:
            return self.terms == ParamRational.const(self.nparams, other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    # -- inspection ---------------------------------------------------------
    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        """Value of a constant polynomial; raises if parameters appear."""
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get((0,) * (self.nparams + 1), Q(0))

    def degree_in_xi(self):
        return max((e[0] for e in self.terms), default=-1)

    def sorted_terms(self):
        return sorted(self.terms.items())

    def evaluate(self, xi=None, G=None):
        """Substitute numeric values for some parameters; returns a ParamRational."""
        out = {}
        for e, c in self.terms.items():
            e = list(e)
            if xi is not None:
                c = c * as_rational(xi) ** e[0]
                e[0] = 0
            if G is not None:
                for i, g in enumerate(G, start=1):
                    if g is not None:
                        c = c * as_rational(g) ** e[i]
                        e[i] = 0
            e = tuple(e)
            out[e] = out.get(e, 0) + c
        return ParamRational(self.nparams, out)

    def embed(self, nparams):
        """Re-express in a parameter ring of another rank (dropped G's must be absent)."""
        if nparams == self.nparams:
            return self
        out = {}
        for e, c in self.terms.items():
            if nparams < self.nparams and any(e[nparams + 1:]):
                raise ValueError(f"{self} uses G beyond rank {nparams}")
            head = tuple(e[: nparams + 1])
            out[head + (0,) * (nparams + 1 - len(head))] = c
        return ParamRational._wrap(nparams, out)

    # -- serialization ------------------------------------------------------
    def to_json(self):
        return [
            {"xi": e[0], "G": list(e[1:]), "q": format_rational(c, always_fraction=True)}
            for e, c in self.sorted_terms()
        ]

    @classmethod
    def from_json(cls, nparams, data):
        terms = {}
        for item in data:
            e = (item["xi"],) + tuple(item["G"])
            terms[e] = terms.get(e, 0) + as_rational(item["q"])
        return cls(nparams, terms)

    def _monomial_str(self, e):
        parts = []
        if e[0]:
            parts.append("xi" if e[0] == 1 else f"xi^{e[0]}")
        for i, k in enumerate(e[1:], start=1):
            if k:
                parts.append(f"G{i}" if k == 1 else f"G{i}^{k}")
        return "*".join(parts)

    def __str__(self):
        if not self.terms:
            return "0"
        chunks = []
        for e, c in self.sorted_terms():
            mono = self._monomial_str(e)
            if not mono:
                chunks.append(format_rational(c))
            elif c == 1:
                chunks.append(mono)
            elif c == -1:
                chunks.append("-" + mono)
            else:
                chunks.append(f"{format_rational(c)}*{mono}")
        return " + ".join(chunks).replace("+ -", "- ")

    def __repr__(self):
        return f"ParamRational({self})"
