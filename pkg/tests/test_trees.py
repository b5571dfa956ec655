import pytest

from finitedr.trees import (
    DecoratedTree,
    StableTree,
    balance_multiplicities,
    coarse_shape_genus,
    enumerate_trees,
    extremal_tree,
    genus_bound,
    lemma_scan,
    validate_tree,
)


def test_tree_basics():
    t = StableTree((0, 1, 2), (None, 0, 1), {1: 0, 2: 2, 3: 1})
    assert t.level(2) == 3 and t.degree() == 3
    assert t.nedges(1) == 2 and t.valence(1) == 3
    assert t.subtree_legs(1) == [2, 3]
    with pytest.raises(ValueError):
        StableTree((0, 0), (None, 0), {1: 1, 2: 0})
    with pytest.raises(ValueError):
        StableTree((0, 0), (0, None), {1: 0})


@pytest.mark.parametrize("N,g,n,d", [(1, 1, 3, 0), (2, 1, 3, 0), (2, 2, 3, 1), (3, 1, 3, 0)])
def test_enumerated_trees_are_valid_and_distinct(N, g, n, d):
    trees = list(enumerate_trees(N, g, n, d))
    assert trees
    assert all(validate_tree(t, N, d) == [] for t in trees)
    assert all(t.total_genus() == g and t.nlegs == n for t in trees)
    assert len({t.canonical() for t in trees}) == len(trees)


def test_no_tree_beyond_genus_bound():
    assert genus_bound(2, 0) == 6
    for nlegs in (2, 3):
        assert list(enumerate_trees(2, 6, nlegs, 0))
        assert not list(enumerate_trees(2, 7, nlegs, 0))


@pytest.mark.parametrize("N,d", [(2, 0), (2, 1), (3, 0), (3, 1)])
def test_lemma_scan_and_extremal_tree(N, d):
    best, parent = lemma_scan(N, d)
    assert best == genus_bound(N, d)
    ext = extremal_tree(N, d)
    assert ext.degree() == N and ext.coarse_ok(d)
    assert ext.total_genus() == best
    assert len(ext.children(0)) == 3 + d
    assert coarse_shape_genus(list(ext.parent), d) == best


def test_genus_bound_errors():
    with pytest.raises(ValueError):
        genus_bound(1, 0)
    with pytest.raises(ValueError):
        genus_bound(2, -1)


@pytest.mark.parametrize("N,g,n", [(2, 1, 4), (3, 1, 4), (2, 2, 3)])
def test_edge_balance(N, g, n):
    nvars = n - 2
    for t in enumerate_trees(N, g, n, 0):
        dt = DecoratedTree(t, (1,) * t.nvertices, {}, {}, 0)
        forms = balance_multiplicities(t, nvars)
        for v in range(t.nvertices):
            pts = dt.vertex_points(v, nvars, forms)
            assert all(sum(col) == 0 for col in zip(*(p for p, _ in pts)))
