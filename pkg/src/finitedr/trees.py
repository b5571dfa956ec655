"""Rooted stable trees with labeled legs, their decorations and edge balance.

Vertices are integers ``0..V-1`` with ``0`` the root; ``parent[v]`` is ``None``
only for the root.  Legs are labeled ``1..nLegs``; leg 1 sits at the root and
leg 2 marks the distinguished vertex (the one carrying psi_2^d).

>>> t = StableTree((0, 1), (None, 0), {1: 0, 2: 0, 3: 1})
>>> t.degree(), t.valence(0), t.valence(1)
(2, 3, 2)
>>> t.is_stable()
True
"""
from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product


@dataclass(frozen=True)
class StableTree:
    genus: tuple
    parent: tuple
    legs: dict = field(hash=False)

    def __post_init__(self):
        object.__setattr__(self, "genus", tuple(self.genus))
        object.__setattr__(self, "parent", tuple(self.parent))
        if len(self.genus) != len(self.parent):
            raise ValueError("genus and parent lists differ in length")
        if self.parent[0] is not None or any(p is None for p in self.parent[1:]):
            raise ValueError("vertex 0 must be the unique root")
        for v, p in enumerate(self.parent[1:], start=1):
            if not 0 <= p < v:
                raise ValueError("parents must precede children")
        if self.legs.get(1, 0) != 0:
            raise ValueError("leg 1 must sit at the root")

    @property
    def nvertices(self):
        return len(self.genus)

    @property
    def nlegs(self):
        return len(self.legs)

    def total_genus(self):
        return sum(self.genus)

    def children(self, v):
        return [c for c in range(1, self.nvertices) if self.parent[c] == v]

    def legs_at(self, v):
        return sorted(leg for leg, w in self.legs.items() if w == v)

    def nedges(self, v):
        """``|E[v]|``: edges incident to v."""
        return len(self.children(v)) + (v != 0)

    def valence(self, v):
        return len(self.legs_at(v)) + self.nedges(v)

    def level(self, v):
        out = 1
        while self.parent[v] is not None:
            v = self.parent[v]
            out += 1
        return out

    def degree(self):
        return max(self.level(v) for v in range(self.nvertices))

    def distinguished(self):
        return self.legs.get(2)

    def is_stable(self):
        return all(2 * g - 2 + self.valence(v) > 0 for v, g in enumerate(self.genus))

    def coarse_ok(self, d):
        """``g(v) + |E[v]| <= 3 + delta d`` at every vertex."""
        vt = self.distinguished()
        return all(
            g + self.nedges(v) <= 3 + (d if v == vt else 0) for v, g in enumerate(self.genus)
        )

    def subtree_legs(self, v):
        out = list(self.legs_at(v))
        for c in self.children(v):
            out.extend(self.subtree_legs(c))
        return sorted(out)

    def canonical(self, extra=None):
        """Isomorphism-invariant key; ``extra(v)`` adds per-vertex decoration."""

        def key(v):
            return (
                self.genus[v],
                extra(v) if extra else None,
                tuple(self.legs_at(v)),
                tuple(sorted(key(c) for c in self.children(v))),
            )

        return key(0)

    def __eq__(self, other):
        return isinstance(other, StableTree) and self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())


def validate_tree(t, N, d):
    """Independent checker for an emitted tree; returns a list of violations."""
    problems = []
    if not t.is_stable():
        problems.append("unstable vertex")
    if t.degree() > N:
        problems.append("degree exceeds rank")
    if not t.coarse_ok(d):
        problems.append("vertex bound violated")
    seen = {0}
    for v in range(1, t.nvertices):
        if t.parent[v] not in seen:
            problems.append("disconnected")
        seen.add(v)
    if sorted(t.legs) != list(range(1, t.nlegs + 1)):
        problems.append("legs not labeled 1..n")
    return problems


# -- shapes ------------------------------------------------------------------------
def _shapes(depth, max_children, root=True):
    """Unlabeled rooted trees as nested sorted tuples of children, depth <= ``depth``."""
    if depth == 1:
        return [()]
    subs = _shapes(depth - 1, max_children, False)
    limit = max_children if root else max_children - 1
    out = [()]
    for k in range(1, limit + 1):
        for combo in combinations_with_replacement(range(len(subs)), k):
            out.append(tuple(sorted(subs[i] for i in combo)))
    return sorted(set(out))


def _flatten(shape):
    parent = [None]

    def walk(node, me):
        for child in node:
            parent.append(me)
            walk(child, len(parent) - 1)

    walk(shape, 0)
    return parent


def _genus_splits(total, k, caps):
    if k == 0:
        if total == 0:
            yield ()
        return
    for g in range(min(total, caps[0]) + 1):
        for rest in _genus_splits(total - g, k - 1, caps[1:]):
            yield (g,) + rest


def enumerate_trees(N, g, nLegs, d):
    """Isomorphism classes of stable trees with labeled legs, deg <= N, and the vertex bound.

    Each class is yielded once (canonical dedup).
    """
    if 2 * g + nLegs - 2 <= 0:
        return
    seen = set()
    for shape in _shapes(N, 3 + d):
        parent = _flatten(shape)
        V = len(parent)
        nedges = [sum(1 for p in parent if p == v) + (v != 0) for v in range(V)]
        if V - 1 > g + nLegs:
            continue
        caps = [3 + d - e for e in nedges]
        if min(caps) < 0:
            continue
        for genus in _genus_splits(g, V, caps):
            for places in product(range(V), repeat=nLegs - 1):
                legs = {1: 0}
                legs.update({leg: v for leg, v in zip(range(2, nLegs + 1), places)})
                t = StableTree(genus, parent, legs)
                if not t.coarse_ok(d) or not t.is_stable():
                    continue
                key = t.canonical()
                if key not in seen:
                    seen.add(key)
                    yield t


# -- decorated trees ---------------------------------------------------------------------
@dataclass
class DecoratedTree:
    """A stable tree plus labels, psi choices and the R/G weight.

    ``leg_index[leg]`` is the covector (leg 1) or vector index of the input;
    ``rpsi[leg]`` is 1 when the R-matrix psi was chosen at that leg.
    """

    tree: StableTree
    labels: tuple
    leg_index: dict
    rpsi: dict
    d: int = 0
    weight: object = None

    def psi(self, leg):
        return self.rpsi.get(leg, 0) + (self.d if leg == 2 else 0)

    def labels_increasing(self):
        t = self.tree
        return all(self.labels[v] > self.labels[t.parent[v]] for v in range(1, t.nvertices))

    def canonical(self):
        return self.tree.canonical(
            lambda v: (self.labels[v], tuple((leg, self.rpsi.get(leg, 0)) for leg in self.tree.legs_at(v)))
        )

    def vertex_points(self, v, nvars, edge_forms=None):
        """Points at ``v`` as ``(multiplicity coefficients, psi exponent)`` pairs."""
        t = self.tree
        if edge_forms is None:
            edge_forms = balance_multiplicities(t, nvars)
        pts = [(leg_multiplicity(leg, nvars), self.psi(leg)) for leg in t.legs_at(v)]
        if v != 0:
            pts.append((tuple(-x for x in edge_forms[v]), 0))
        for c in t.children(v):
            pts.append((edge_forms[c], 0))
        return pts

    def to_json(self, nvars=None):
        t = self.tree
        if nvars is None:
            nvars = max(t.nlegs - 2, 0)
        forms = balance_multiplicities(t, nvars)
        return {
            "vertices": [
                {"genus": t.genus[v], "label": self.labels[v], "level": t.level(v), "parent": t.parent[v]}
                for v in range(t.nvertices)
            ],
            "legs": [
                {"leg": leg, "vertex": t.legs[leg], "index": self.leg_index[leg], "psi": self.psi(leg)}
                for leg in sorted(t.legs)
            ],
            "edges": [{"child": c, "multiplicity": list(forms[c])} for c in range(1, t.nvertices)],
            "weight": None if self.weight is None else str(self.weight),
        }


def leg_multiplicity(leg, nvars):
    """Leg 1: minus the sum; leg 2: zero; leg j+2: a_j."""
    if leg == 1:
        return (-1,) * nvars
    if leg == 2:
        return (0,) * nvars
    return tuple(int(i == leg - 3) for i in range(nvars))


def balance_multiplicities(t, nvars):
    """Edge forms: ``forms[c]`` is the sum of leg multiplicities in the subtree of ``c``.

    The parent-side half-edge carries ``forms[c]`` and the child side its negative,
    which makes every vertex balanced.
    """
    forms = {}
    for c in range(1, t.nvertices):
        total = [0] * nvars
        for leg in t.subtree_legs(c):
            for i, x in enumerate(leg_multiplicity(leg, nvars)):
                total[i] += x
        forms[c] = tuple(total)
    return forms


def dimension_ok(dt, v):
    """``sum of psi exponents at v == g(v) - 3 + n(v)`` (top degree of lambda_g DR_g)."""
    t = dt.tree
    psi = sum(dt.psi(leg) for leg in t.legs_at(v))
    return psi == t.genus[v] - 3 + t.valence(v)


# -- finiteness lemma -----------------------------------------------------------------------
def genus_bound(N, d):
    if N < 2:
        raise ValueError("genus bound is stated for N >= 2")
    if d < 0:
        raise ValueError("d must be nonnegative")
    return (d + 3) * 2 ** (N - 1)


def coarse_shape_genus(parent, d):
    """Largest total genus allowed on a leg-free shape by the vertex bound (None if infeasible)."""
    V = len(parent)
    nedges = [sum(1 for p in parent if p == v) + (v != 0) for v in range(V)]
    base = [3 - e for e in nedges]
    best = None
    for vt in range(V):
        caps = [b + (d if v == vt else 0) for v, b in enumerate(base)]
        if min(caps) < 0:
            continue
        total = sum(caps)
        best = total if best is None else max(best, total)
    return best


def lemma_scan(N, d):
    """Exhaustive scan over shapes of depth <= N; returns (max genus, a maximizing parent list)."""
    best, arg = -1, None
    for shape in _shapes(N, 3 + d):
        parent = _flatten(shape)
        g = coarse_shape_genus(parent, d)
        if g is not None and g > best:
            best, arg = g, parent
    return best, arg


def extremal_tree(N, d):
    """Root of genus 0 with 3+d children, internal vertices with 2 children, genus-2 leaves."""
    parent = [None]
    frontier = [0]
    for level in range(2, N + 1):
        nxt = []
        for v in frontier:
            for _ in range(3 + d if v == 0 else 2):
                parent.append(v)
                nxt.append(len(parent) - 1)
        frontier = nxt
    V = len(parent)
    kids = [sum(1 for p in parent if p == v) for v in range(V)]
    genus = [2 if (kids[v] == 0 and v != 0) else 0 for v in range(V)]
    if V == 1:
        genus = [3 + d]
    return StableTree(genus, parent, {1: 0, 2: 0})
