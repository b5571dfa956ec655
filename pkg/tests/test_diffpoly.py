import pytest

from finitedr._rational import Q, format_rational, parse_rational
from finitedr.diffpoly import (
    ContextMismatch,
    DiffPoly,
    MiuraMap,
    TruncationContext,
    dx,
    dx_power,
    expand_inverse,
    flow_apply,
    integrate_x,
    invert_miura,
    pderiv,
    substitute,
)
from finitedr.params import ParamRational

CTX = TruncationContext(2, 6, 4)
u1, u2 = DiffPoly.var(CTX, 1), DiffPoly.var(CTX, 2)
xi = ParamRational.xi(2)


def test_rational_helpers():
    assert parse_rational(" -3/6 ") == Q(-1, 2)
    assert format_rational(Q(4, 2)) == "2"
    assert format_rational(Q(4, 2), always_fraction=True) == "2/1"
    with pytest.raises(ZeroDivisionError):
        parse_rational("1/0")


def test_no_stored_zeros_and_duplicate_factors_merge():
    p = u1 * u2 - u2 * u1
    assert p.is_zero() and len(p) == 0
    m = DiffPoly(CTX, {(0, ((1, 0, 1), (1, 0, 1))): 3})
    assert m == u1 * u1 * 3


def test_truncation_is_enforced():
    p = u1 ** 7
    assert p.is_zero()
    assert (DiffPoly.eps(CTX, 2) * DiffPoly.eps(CTX, 4)).is_zero()
    assert (u1 ** 3 + u1).truncate(Dmax=2) == u1


def test_context_mismatch():
    other = DiffPoly.var(TruncationContext(2, 4, 4), 1)
    with pytest.raises(ContextMismatch):
        u1 + other


def test_dx_examples():
    assert dx(u1 * u1) == u1 * DiffPoly.var(CTX, 1, 1) * 2
    assert dx(DiffPoly.const(CTX, 5)).is_zero()
    assert dx_power(u2, 3) == DiffPoly.var(CTX, 2, 3)


def test_pderiv():
    p = u1 * u1 * DiffPoly.var(CTX, 2, 2)
    assert pderiv(p, 1, 0) == u1 * DiffPoly.var(CTX, 2, 2) * 2
    assert pderiv(p, 2, 2) == u1 * u1
    assert pderiv(p, 2, 1).is_zero()


def test_expand_inverse_example():
    q = u2 * u2 * xi
    one = DiffPoly.one(CTX)
    assert (one + q) * expand_inverse(q, 1) == one
    with pytest.raises(ValueError):
        expand_inverse(one, 1)


def test_expand_inverse_terms():
    inv = expand_inverse(u2 * xi, 2)
    assert inv.coeff(0, ((2, 0, 1),)) == xi * -2
    assert inv.coeff(0, ((2, 0, 2),)) == xi * xi * 3


def test_substitute_and_eps_factor():
    ctx1 = TruncationContext(1, 6, 4)
    p = DiffPoly.var(ctx1, 1, 2) * DiffPoly.eps(ctx1, 2)
    out = substitute(p, [u2], eps2_factor=ParamRational.G(2, 2))
    assert out == DiffPoly.var(CTX, 2, 2) * DiffPoly.eps(CTX, 2) * ParamRational.G(2, 2)
    assert substitute(u1 * u2, [None, u1]) == u1 * u1


def test_flow_apply_on_variable_is_flow():
    F = [u1 * u2, DiffPoly.var(CTX, 1, 1)]
    assert flow_apply(u1, F) == F[0]
    assert flow_apply(DiffPoly.var(CTX, 2, 1), F) == dx(F[1])


def test_invert_identity_and_triangular():
    ident = MiuraMap.identity(CTX)
    assert invert_miura(ident) == ident
    m = MiuraMap([u1 + u2 * u2 * xi / 2, u2])
    inv = invert_miura(m)
    assert inv.images[0] == u1 - u2 * u2 * xi / 2
    assert inv.images[1] == u2


def test_invert_rejects_singular():
    with pytest.raises(ValueError):
        invert_miura(MiuraMap([u1 + u2, u1 + u2]))


def test_integrate_x():
    p = u1 * u1 * DiffPoly.var(CTX, 2, 1) * xi + DiffPoly.var(CTX, 1, 3) * DiffPoly.eps(CTX, 2)
    assert dx(integrate_x(dx(p))) == dx(p)
    with pytest.raises(ValueError):
        integrate_x(u1 * u1)


def test_json_round_trip_and_str():
    p = u1 * xi - DiffPoly.var(CTX, 2, 4) * DiffPoly.eps(CTX, 2) / 3
    assert DiffPoly.from_json(p.to_json()) == p
    assert str(p) == "xi*u1 - 1/3*eps^2*u2_4"
    assert str(DiffPoly.zero(CTX)) == "0"


def test_params_evaluate_and_json():
    G1 = ParamRational.G(2, 1)
    p = (xi + 1) * G1 * G1
    assert p.evaluate(xi=2, G=[3, None]) == ParamRational.const(2, 27)
    assert ParamRational.from_json(2, p.to_json()) == p
    assert str(p) == "G1^2 + xi*G1^2"
    assert (ParamRational.one(2) * u1) == u1
