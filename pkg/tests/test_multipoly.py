import pytest

from finitedr.multipoly import (
    MultiPoly,
    NotSymmetric,
    coef_extract,
    from_msym,
    msym,
    msym_str,
    set_var_zero,
    substitute_linear,
    to_msym,
)


def test_msym_members():
    p = msym((2, 1), 3)
    assert len(p.terms) == 6
    assert coef_extract(p, (2, 0, 1)) == 1
    assert coef_extract(p, (1, 1, 1)) == 0
    with pytest.raises(ValueError):
        msym((1, 1, 1), 2)


def test_to_msym_rejects_asymmetric():
    a1 = MultiPoly.var(2, 1)
    with pytest.raises(NotSymmetric):
        to_msym(a1 * a1)


def test_msym_round_trip_and_str():
    p = from_msym({(4,): 1, (2, 2): 5}, 3)
    assert to_msym(p) == {(4,): 1, (2, 2): 5}
    assert msym_str(p) == "1*m(4) + 5*m(2,2)"
    assert msym_str(MultiPoly.zero(2)) == "0"


def test_set_var_zero_and_substitute():
    p = msym((1, 1), 3)
    assert set_var_zero(p, 3) == msym((1, 1), 2)
    # a_1 -> a_1 + a_2, a_2 -> -a_2
    q = substitute_linear(MultiPoly.var(2, 1) * MultiPoly.var(2, 2), [[1, 1], [0, -1]])
    a1, a2 = MultiPoly.var(2, 1), MultiPoly.var(2, 2)
    assert q == -(a1 * a2) - a2 * a2


def test_arithmetic():
    a1 = MultiPoly.var(2, 1)
    assert (a1 + 1) ** 2 == a1 * a1 + a1 * 2 + 1
    assert (a1 - a1).is_homogeneous()
    assert str(a1 * a1 / 2 - 3) == "1/2*a1^2 - 3"
    with pytest.raises(ValueError):
        MultiPoly(2, {(1,): 1})
