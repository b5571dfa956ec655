"""The family (Id + R1 z) c^{triv,G} evaluated on decorated trees.

Conventions (R1 strictly upper triangular with R1^2 = 0):

* a vertex labelled ``l`` with genus ``g`` contributes ``(G^l)^g``;
* an edge from parent ``p`` to child ``c`` contributes ``R1[p, c]`` (so ``p < c``);
* leg 1 with covector index ``alpha`` sits at the root, either without psi (root
  label ``alpha``) or with psi and factor ``-R1[alpha, l]`` (root label ``l``);
* a vector leg of index ``gamma`` sits at a vertex labelled ``gamma`` without psi,
  or at a vertex labelled ``l`` with psi and factor ``-R1[l, gamma]``.

>>> spec = FamilySpec.rank2()
>>> check_nilpotent(spec)
True
>>> print(vertex_value((1, 1, 1), 2, spec))
G1^2
"""
from dataclasses import dataclass
from itertools import combinations_with_replacement, product

from .params import ParamRational
from .trees import DecoratedTree, StableTree, dimension_ok


@dataclass(frozen=True)
class FamilySpec:
    """Rank ``N``, vertex weights ``G`` and the nilpotent matrix ``R1`` (sparse dict)."""

    N: int
    G: tuple
    R1: tuple  # sorted ((i, j), ParamRational) pairs, 1-based

    def __post_init__(self):
        if len(self.G) != self.N:
            raise ValueError("need one G entry per index")
        for (i, j), _ in self.R1:
            if not 1 <= i < j <= self.N:
                raise ValueError(f"R1 entry ({i},{j}) is not strictly upper triangular")

    @classmethod
    def make(cls, N, R1=None, G=None):
        """``R1``: dict {(i, j): value}; values are ParamRationals or rationals."""
        coerce = lambda x: x.embed(N) if isinstance(x, ParamRational) else ParamRational.const(N, x)
        if G is None:
            G = [ParamRational.G(N, i) for i in range(1, N + 1)]
        G = tuple(coerce(x) for x in G)
        entries = tuple(sorted(((i, j), coerce(v)) for (i, j), v in (R1 or {}).items() if coerce(v)))
        return cls(N, G, entries)

    @classmethod
    def rank2(cls, xi=None, G=None):
        """``R1 = xi E_12`` with symbolic xi and G unless numeric values are given."""
        x = ParamRational.xi(2) if xi is None else ParamRational.const(2, xi)
        return cls.make(2, {(1, 2): x}, G)

    @property
    def nparams(self):
        return self.N

    def r1(self, i, j):
        for key, v in self.R1:
            if key == (i, j):
                return v
        return ParamRational.zero(self.N)

    def r1_dict(self):
        return dict(self.R1)

    def successors(self, i):
        """Labels j with R1[i, j] != 0."""
        return [j for (a, j), _ in self.R1 if a == i]


def check_nilpotent(spec):
    """True iff R1 squared vanishes symbolically."""
    R = spec.r1_dict()
    for i in range(1, spec.N + 1):
        for j in range(1, spec.N + 1):
            total = ParamRational.zero(spec.N)
            for k in range(1, spec.N + 1):
                a, b = R.get((i, k)), R.get((k, j))
                if a is not None and b is not None:
                    total = total + a * b
            if total:
                return False
    return True


def vertex_value(labels, genus, spec):
    """``(G^i)^g`` if every label equals ``i``, else 0."""
    labels = list(labels)
    if not labels:
        raise ValueError("vertex needs at least one label")
    if any(x != labels[0] for x in labels):
        return ParamRational.zero(spec.N)
    return spec.G[labels[0] - 1] ** genus


def leg_options(index, spec):
    """Placements of a vector leg: (vertex label, psi, factor)."""
    out = [(index, 0, ParamRational.one(spec.N))]
    for (l, j), v in spec.R1:
        if j == index:
            out.append((l, 1, -v))
    return out


def root_options(alpha, spec):
    """Placements of the covector leg: (root label, psi, factor)."""
    out = [(alpha, 0, ParamRational.one(spec.N))]
    for (i, l), v in spec.R1:
        if i == alpha:
            out.append((l, 1, -v))
    return out


def enumerate_decorations(t, alpha, beta, legVectors, spec, d=0):
    """All labelings of ``t`` with nonzero weight (dimension not imposed).

    ``legVectors`` are the indices of legs 3..n+2.  Since psi choices are forced by
    the labels, a decoration is the same thing as a vertex labeling.
    """
    index = {1: alpha, 2: beta}
    index.update({leg: a for leg, a in zip(range(3, t.nlegs + 1), legVectors)})
    if len(index) != t.nlegs:
        raise ValueError("one vector index per leg 3..n+2 required")
    V = t.nvertices
    for labels in product(range(1, spec.N + 1), repeat=V):
        weight = ParamRational.one(spec.N)
        for v in range(V):
            weight = weight * vertex_value([labels[v]], t.genus[v], spec)
            if v:
                weight = weight * spec.r1(labels[t.parent[v]], labels[v])
        if not weight:
            continue
        rpsi = {}
        for leg, v in t.legs.items():
            lab = labels[v]
            if leg == 1:
                opts = {l: (p, f) for l, p, f in root_options(alpha, spec)}
            else:
                opts = {l: (p, f) for l, p, f in leg_options(index[leg], spec)}
            if lab not in opts:
                weight = None
                break
            rpsi[leg], f = opts[lab]
            weight = weight * f
        if weight:
            yield DecoratedTree(t, tuple(labels), dict(index), rpsi, d, weight)


def is_admissible(dt):
    """Dimension constraint at every vertex."""
    return all(dimension_ok(dt, v) for v in range(dt.tree.nvertices))


# -- fast route used by the assembly ------------------------------------------------------
def _subtrees(label, gtot, spec, d, maxdepth, cache):
    """Canonical (label, genus, children) subtrees of total genus ``gtot``, non-root."""
    key = (label, gtot, maxdepth)
    if key in cache:
        return cache[key]
    out = []
    child_pool = []
    if maxdepth > 1:
        for lc in spec.successors(label):
            for h in range(gtot + 1):
                child_pool.extend(_subtrees(lc, h, spec, d, maxdepth - 1, cache))
    for k in range(0, 3 + d):
        for combo in combinations_with_replacement(range(len(child_pool)), k):
            kids = tuple(sorted(child_pool[i] for i in combo))
            gv = gtot - sum(_total_genus(c) for c in kids)
            if gv < 0 or gv + k + 1 > 3 + d:
                continue
            out.append((label, gv, kids))
    cache[key] = out
    return out


def _total_genus(node):
    return node[1] + sum(_total_genus(c) for c in node[2])


def skeletons(alpha, g, spec, d):
    """Labelled genus trees (root label allowed by the covector leg), total genus ``g``."""
    cache = {}
    out = []
    for root_label, _, _ in root_options(alpha, spec):
        pool = []
        for lc in spec.successors(root_label):
            for h in range(g + 1):
                pool.extend(_subtrees(lc, h, spec, d, spec.N - 1, cache))
        for k in range(0, 4 + d):
            for combo in combinations_with_replacement(range(len(pool)), k):
                kids = tuple(sorted(pool[i] for i in combo))
                gv = g - sum(_total_genus(c) for c in kids)
                if gv < 0 or gv + k > 3 + d:
                    continue
                out.append((root_label, gv, kids))
    return sorted(set(out))


def _flatten(node):
    labels, genus, parent = [], [], []

    def walk(nd, par):
        me = len(labels)
        labels.append(nd[0])
        genus.append(nd[1])
        parent.append(par)
        for c in nd[2]:
            walk(c, me)

    walk(node, None)
    return labels, genus, parent


def decorated_trees(alpha, beta, d, vectors, g, spec):
    """Admissible decorated trees for the inputs (alpha; beta, vectors) in total genus g.

    Leg placements are constrained by the exact count of psi-free legs per vertex,
    ``3 + delta d - g(v) - |E[v]|``.  Trees are emitted once per isomorphism class.
    """
    index = [alpha, beta] + list(vectors)
    nlegs = len(index)
    out = []
    seen = set()
    for skel in skeletons(alpha, g, spec, d):
        labels, genus, parent = _flatten(skel)
        V = len(labels)
        nedges = [sum(1 for p in parent if p == v) + (v != 0) for v in range(V)]
        root_opt = {l: (p, f) for l, p, f in root_options(alpha, spec)}
        if labels[0] not in root_opt:
            continue
        psi1, f1 = root_opt[labels[0]]
        base_w = f1
        for v in range(V):
            base_w = base_w * spec.G[labels[v] - 1] ** genus[v]
            if v:
                base_w = base_w * spec.r1(labels[parent[v]], labels[v])
        if not base_w:
            continue
        opts = []
        for leg in range(2, nlegs + 1):
            o = []
            for lab, p, f in leg_options(index[leg - 1], spec):
                o.extend((v, p, f) for v in range(V) if labels[v] == lab)
            opts.append(o)
        for vt, p2, f2 in opts[0]:
            caps = [3 + (d if v == vt else 0) - genus[v] - nedges[v] for v in range(V)]
            if min(caps) < 0:
                continue
            free = [0] * V
            free[0] += 1 - psi1
            free[vt] += 1 - p2
            if any(free[v] > caps[v] for v in range(V)):
                continue
            place = {1: (0, psi1), 2: (vt, p2)}
            for combo in _assign(opts[1:], caps, free, 3, place, f2):
                placement, w = combo
                legs = {leg: v for leg, (v, _) in placement.items()}
                rpsi = {leg: p for leg, (_, p) in placement.items()}
                t = StableTree(tuple(genus), tuple(parent), legs)
                dt = DecoratedTree(t, tuple(labels), {i + 1: a for i, a in enumerate(index)}, rpsi, d, base_w * w)
                key = dt.canonical()
                if key in seen:
                    continue
                seen.add(key)
                out.append(dt)
    return out


def _assign(opts, caps, free, leg, place, weight):
    """Backtracking over leg placements with exact psi-free capacities."""
    if not opts:
        if free == caps:
            yield dict(place), weight
        return
    slack = sum(c - f for c, f in zip(caps, free))
    if slack > len(opts):
        return
    for v, p, f in opts[0]:
        if p == 0:
            if free[v] >= caps[v]:
                continue
            free[v] += 1
        place[leg] = (v, p)
        yield from _assign(opts[1:], caps, free, leg + 1, place, weight * f)
        del place[leg]
        if p == 0:
            free[v] -= 1


# -- figure families -------------------------------------------------------------------
def has_legless_subtree(dt):
    t = dt.tree
    return any(not t.subtree_legs(c) for c in range(1, t.nvertices))


def family_key(dt):
    """Shape of a decorated tree with the number of psi-decorated vector legs forgotten.

    Per vertex: (genus, label, covector leg state, leg-2 state, number of psi-free
    vector legs, sorted child keys); states are None, 'plain' or 'psi'.
    """
    t = dt.tree

    def state(leg, v):
        if t.legs.get(leg) != v:
            return None
        return "psi" if dt.rpsi.get(leg, 0) else "plain"

    def key(v):
        plain = sum(1 for leg in t.legs_at(v) if leg >= 3 and not dt.rpsi.get(leg, 0))
        return (
            t.genus[v],
            dt.labels[v],
            state(1, v),
            state(2, v),
            plain,
            tuple(sorted((key(c) for c in t.children(v)), key=repr)),
        )

    return key(0)


def figure_families(alpha, beta, d, g, spec, nmax=6, include_legless=False):
    """Distinct family keys over all inputs with at most ``nmax`` vector legs."""
    fams = set()
    for n in range(nmax + 1):
        for vectors in combinations_with_replacement(range(1, spec.N + 1), n):
            for dt in decorated_trees(alpha, beta, d, vectors, g, spec):
                if include_legless or not has_legless_subtree(dt):
                    fams.add(family_key(dt))
    return sorted(fams, key=repr)
