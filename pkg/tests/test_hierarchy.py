import pytest

from finitedr.diffpoly import DiffPoly, TruncationContext, dx, invert_miura, substitute
from finitedr.drcycle import UnsupportedPattern
from finitedr.fcohft import FamilySpec
from finitedr.hierarchy import (
    FlowTable,
    assemble_P,
    assemble_table,
    check_commutativity,
    golden_P110,
    golden_P120_contributions,
    kdv_rescaled,
    miura_flows,
    special_miura,
    theorem_flows,
    trivial_rank1,
)
from finitedr.laxkdv import kdv_P
from finitedr.params import ParamRational

SPEC = FamilySpec.rank2()
CTX = TruncationContext(2, 6, 4)
xi, G1, G2 = ParamRational.xi(2), ParamRational.G(2, 1), ParamRational.G(2, 2)


@pytest.fixture(scope="module")
def table():
    return assemble_table([(a, b, 0) for a in (1, 2) for b in (1, 2)], SPEC, CTX)


def test_p2_sector():
    ctx1 = TruncationContext(1, 6, 4)
    for d in range(3):
        assert assemble_P(2, 1, d, SPEC, CTX).is_zero()
        assert assemble_P(2, 2, d, SPEC, CTX) == kdv_rescaled(kdv_P(d, ctx1), CTX)


def test_p110_closed_form_and_coefficients():
    P = assemble_P(1, 1, 0, SPEC, CTX)
    assert P == golden_P110(SPEC, CTX).truncate(Emax=4)
    assert P.coeff(2, ((2, 2, 1),)) == xi * (G2 - G1) / 24
    assert P.max_eps() == 2


def test_golden_degenerates_at_xi_zero():
    spec0 = FamilySpec.rank2(xi=0)
    assert golden_P110(spec0, CTX) == DiffPoly.var(CTX, 1)
    assert assemble_P(1, 1, 0, spec0, CTX) == DiffPoly.var(CTX, 1)


def test_p120_contributions():
    contribs = golden_P120_contributions(SPEC, CTX)
    assert [c.genus for c in contribs].count(0) == 6
    assert sorted(t for c in contribs if c.genus == 1 for t in c.trees) == list(range(1, 10))
    assert [c.genus for c in contribs].count(2) == 6
    assert contribs[0].poly == DiffPoly.var(CTX, 2) ** 2 * (-xi / 2)
    total = sum((c.poly for c in contribs), DiffPoly.zero(CTX))
    P = assemble_P(1, 2, 0, SPEC, CTX)
    assert P == total
    assert P.max_eps() == 4


def test_genus_parts_by_breakdown():
    P, parts = assemble_P(1, 2, 0, SPEC, CTX, breakdown=True)
    assert sum(parts.values(), DiffPoly.zero(CTX)) == P
    for g in (0, 1, 2):
        want = sum((c.poly for c in golden_P120_contributions(SPEC, CTX) if c.genus == g), DiffPoly.zero(CTX))
        assert P.eps_part(2 * g) == want.eps_part(2 * g)


def test_homogeneity_of_assembled_densities(table):
    for P in table.values():
        for (eps, udeg, factors), _ in P._raw.items():
            assert eps % 2 == 0
            assert sum(d * e for _, d, e in factors) == eps


def test_orbit_and_labeled_agree():
    ctx = TruncationContext(2, 4, 4)
    for key in [(1, 1, 0), (1, 2, 0), (2, 2, 1)]:
        assert assemble_P(*key, SPEC, ctx, mode="orbit") == assemble_P(*key, SPEC, ctx, mode="labeled")
    with pytest.raises(ValueError):
        assemble_P(1, 1, 0, SPEC, ctx, mode="bogus")


def test_theorem_flows(table):
    got = miura_flows(table, special_miura(SPEC, CTX))
    want = theorem_flows(SPEC, CTX)
    for key in want:
        assert got[key] == want[key]
    assert got[(2, 1, 0)].is_zero()
    assert got[(2, 2, 0)] == DiffPoly.var(CTX, 2, 1)


def test_special_miura_round_trip():
    m = special_miura(SPEC, CTX)
    inv = invert_miura(m)
    for a in (1, 2):
        u = DiffPoly.var(CTX, a)
        assert substitute(substitute(u, m.images), inv.images) == u


def test_commutativity_and_negative_control(table):
    report = check_commutativity(table, [((1, 0), (2, 0)), ((1, 0), (1, 0))])
    assert all(c["status"] == "pass" for c in report["checks"])
    assert all(c["certified_udeg"] >= 4 and c["certified_eps"] >= 4 for c in report["checks"])
    broken = FlowTable(CTX, dict(table))
    broken[(1, 2, 0)] = table[(1, 2, 0)] + DiffPoly.var(CTX, 1) ** 3 * xi
    report = check_commutativity(broken, [((1, 0), (2, 0))])
    assert any(c["status"] == "fail" for c in report["checks"])


def test_rank_one_table_is_kdv():
    ctx = TruncationContext(1, 6, 4)
    t = trivial_rank1(ctx, dmax=2)
    for d in range(3):
        assert t[(1, 1, d)] == kdv_P(d, ctx)


def test_unsupported_pattern_carries_tree():
    spec1 = FamilySpec.make(1, {}, [1])
    with pytest.raises(UnsupportedPattern) as info:
        assemble_P(1, 1, 3, spec1, TruncationContext(1, 3, 6))
    assert "tree" in info.value.context and info.value.query.genus == 3


def test_assembly_preconditions():
    with pytest.raises(ValueError):
        assemble_P(1, 1, 0, SPEC, TruncationContext(1, 4, 2))
    with pytest.raises(ValueError):
        assemble_P(1, 1, -1, SPEC, CTX)
    bad = FamilySpec.make(3, {(1, 2): 1, (2, 3): 1})
    with pytest.raises(ValueError):
        assemble_P(1, 1, 0, bad, TruncationContext(3, 2, 2))


def test_flow_table_json(table):
    data = table.to_json()
    assert data["kind"] == "P" and len(data["entries"]) == 4
    assert DiffPoly.from_json(data["entries"][0]["poly"]) == table[(1, 1, 0)]
    assert table.flow(1, 1, 0) == dx(table[(1, 1, 0)])
