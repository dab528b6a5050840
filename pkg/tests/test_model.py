import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hurwitz_npoint.model import (
    ModelCache,
    ModelSpec,
    S_coeff,
    S_series,
    apply_S_of_QD,
    gamma,
    inv_S2_coeff,
    inv_S_coeff,
    lagrange_burmann_sides,
    phi_m,
    principal_identity_sides,
    psi_derivative_at_zero,
    x_series,
)
from hurwitz_npoint.series import SeriesContext, coeff, coeffs_by, derivative, embed, exp_series, invert_unit, zdz

from conftest import random_rational, random_spec


def geometric(ctx, power):
    """1/(1 - z)^power in a one-variable context."""
    return invert_unit(ctx.one() - ctx.var(ctx.z_names[0])) ** power


# -- S --------------------------------------------------------------------

def test_S_coefficients():
    assert S_coeff(0) == 1
    assert S_coeff(1) == Fraction(1, 24)
    assert S_coeff(2) == Fraction(1, 1920)
    assert [inv_S_coeff(k) for k in range(3)] == [1, Fraction(-1, 24), Fraction(7, 5760)]
    assert [inv_S2_coeff(k) for k in range(3)] == [1, Fraction(-1, 12), Fraction(1, 240)]


def test_uS_is_sinh():
    ctx = SeriesContext(1, 9, z_names=("u",))
    u = ctx.var("u")
    s = S_series(u)
    assert all(s.coefficient((k,)) == 0 for k in range(1, 9, 2))
    sinh = exp_series(u.scale(Fraction(1, 2))) - exp_series(u.scale(Fraction(-1, 2)))
    assert u * s == sinh


def test_S_inverse_powers():
    ctx = SeriesContext(1, 8, z_names=("u",))
    u = ctx.var("u")
    assert S_series(u) * S_series(u, power=-1) == ctx.one()
    assert S_series(u, power=-2) * S_series(u) ** 2 == ctx.one()


# -- change of variables -----------------------------------------------------

def test_cache_examples(usual, trivial):
    c = ModelCache(usual, 6)
    z = c.z
    assert c.X == z * exp_series(-z)
    assert c.Q == c.vctx.one() - z
    c0 = ModelCache(trivial, 6)
    assert c0.X == c0.z and c0.Q == c0.vctx.one()


@pytest.mark.parametrize("seed", range(5))
def test_Q_is_log_derivative_of_X(seed):
    spec = random_spec(seed, y1_one=True)
    c = ModelCache(spec, 7)
    # Q = z X'/X; X = z e^{-psi}, so compare X Q with z X'
    assert c.X * c.Q == zdz(c.X, "z")


def test_x_series_matches_cache():
    spec = random_spec(11)
    X = x_series(spec, 6)
    assert embed(ModelCache(spec, 6).X, X.ctx) == X


def test_apply_D_examples(usual):
    out = SeriesContext(1, 7)
    c = ModelCache(usual, 7)
    X = c.at("X", out, 1)
    assert c.apply_D(X, 1) == X
    assert c.apply_D(out.const(5), 1) == out.zero()
    z = out.var("z1")
    f = (z * geometric(out, 1)).scale(Fraction(1, 24))
    assert c.apply_D(f, 1) == (z * geometric(out, 3)).scale(Fraction(1, 24))
    assert c.apply_D_inverse(z, 1) == z - (z * z).scale(Fraction(1, 2))


@pytest.mark.parametrize("seed", range(4))
def test_D_inverse_roundtrip(seed):
    spec = random_spec(seed)
    out = SeriesContext(1, 6)
    c = ModelCache(spec, 6)
    f = out.from_dict({(k,): k * k - 3 for k in range(1, 7)})
    assert c.apply_D(c.apply_D_inverse(f, 1), 1) == f


def test_D_inverse_residue(trivial):
    c = ModelCache(trivial, 4)
    out = SeriesContext(1, 4)
    assert c.apply_D_inverse(out.var("z1"), 1) == out.var("z1")
    with pytest.raises(ValueError):
        c.apply_D_inverse(out.one(), 1)


def test_apply_S_of_QD():
    ctx = SeriesContext(1, 5, hbar=(0, 2), aux=("u1",))
    z = ctx.var("z1")
    assert apply_S_of_QD(z, 1, "u1") == z + (ctx.var("u1") ** 2 * ctx.var("hbar") ** 2 * z).scale(Fraction(1, 24))
    ctx0 = SeriesContext(1, 5, hbar=(0, 0), aux=("u1",))
    f = ctx0.from_dict({(2,): 3, (4,): 1})
    assert apply_S_of_QD(f, 1, "u1") == f


# -- L_r and phi_m -------------------------------------------------------------

def _ypoly(ctx, coeffs):
    return ctx.from_dict({(k,): c for k, c in enumerate(coeffs) if c})


def test_L_low_orders():
    spec = random_spec(3)
    c = ModelCache(spec, 6, hbar_cap=2)
    L0 = c.L_y(0)
    yctx = L0.ctx
    v, hb = yctx.var("v"), yctx.var("hbar")
    psi = _ypoly(yctx, spec.psi_list)
    d1, d2 = derivative(psi, "y"), derivative(derivative(psi, "y"), "y")
    assert L0 == yctx.one() + ((v ** 3 - v) * d2 * hb ** 2).scale(Fraction(1, 24))
    L1 = c.L_y(1)
    assert coeffs_by(L1, "hbar")[0] == v * d1
    for r in range(4):
        assert coeffs_by(c.L_y(r), "v").get(0, yctx.zero()) == (yctx.one() if r == 0 else yctx.zero())


def test_L_recursion():
    spec = random_spec(5)
    c = ModelCache(spec, 5, hbar_cap=4)
    yctx = c.L_y(0).ctx
    v = yctx.var("v")
    dpsi = derivative(_ypoly(yctx, spec.psi_list), "y")
    for r in range(3):
        nxt = derivative(c.L_y(r), "y") + v * dpsi * c.L_y(r)
        # the y-window shrinks by one per derivative; compare below it
        lim = yctx.order - r - 1
        a = {k: x for k, x in nxt.to_dict().items() if k[0][0] <= lim}
        b = {k: x for k, x in c.L_y(r + 1).to_dict().items() if k[0][0] <= lim}
        assert a == b


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_phi_m_equals_exp_times_L0(m):
    spec = random_spec(7)
    cap, order = 4, 5
    c = ModelCache(spec, order, hbar_cap=cap)
    phi = phi_m(spec, m, order, cap)
    L0 = c.L_y(0)
    # L_0 at v = m
    at_m = L0.ctx.zero()
    for j, part in coeffs_by(L0, "v").items():
        at_m = at_m + part.scale(Fraction(m) ** j)
    at_m = embed(at_m, phi.ctx)
    psi = _ypoly(phi.ctx, spec.psi_list)
    assert phi == exp_series(psi.scale(m)) * at_m


def test_phi_basic(usual):
    assert phi_m(usual, 0, 4, 2) == SeriesContext(1, 4, hbar=(0, 2), z_names=("y",)).one()
    p1 = phi_m(usual, 1, 4, 2)
    assert p1 == exp_series(p1.ctx.var("y"))
    assert phi_m(usual, 3, 4, 4) * phi_m(usual, -3, 4, 4) == SeriesContext(1, 4, hbar=(0, 4), z_names=("y",)).one()


# -- gamma ----------------------------------------------------------------------

def test_gamma_identities():
    ctx = SeriesContext(3, 6)
    for i, j in ((1, 2), (3, 1), (2, 3)):
        assert gamma(ctx, i, j, -1) + gamma(ctx, j, i, -1) == ctx.const(-1)
        for k in range(3):
            assert gamma(ctx, i, j, k) == gamma(ctx, j, i, k).scale((-1) ** k)
    assert zdz(gamma(ctx, 1, 2, -1), 1) == gamma(ctx, 1, 2)
    with pytest.raises(ValueError):
        gamma(ctx, 1, 1)


def test_gamma_is_the_rational_function():
    # (z1 - z2)^2 gamma_{12} = z1 z2
    ctx = SeriesContext(2, 6)
    z1, z2 = ctx.var("z1"), ctx.var("z2")
    lhs = (z1 - z2) ** 2 * gamma(ctx, 1, 2)
    assert {k: c for k, c in lhs.to_dict().items() if sum(k[0]) <= 6} == {((1, 1), 0, ()): 1}


# -- psi derivatives -----------------------------------------------------------------

def test_psi_derivative_at_zero(usual):
    assert psi_derivative_at_zero(usual, 1) == 1
    assert psi_derivative_at_zero(usual, 2) == 0
    mono = ModelSpec(tuple(Fraction(1, k) for k in range(1, 7)), (1,))
    assert [mono.psi_derivative_at_zero(k) for k in range(1, 7)] == [1, 1, 2, 6, 24, 120]
    with pytest.warns(UserWarning):
        assert mono.psi_derivative_at_zero(9) == 0
    with pytest.raises(ValueError):
        mono.psi_derivative_at_zero(0)


def test_missing_inputs():
    spec = ModelSpec((1, 1), (1,))
    assert spec.missing_inputs(4, 1, 1)
    assert not ModelSpec((1,), (1,), psi_exact=True, y_exact=True).missing_inputs(6, 2, 3)


# -- identities ---------------------------------------------------------------------

@settings(max_examples=8)
@given(st.integers(0, 10 ** 6))
def test_lagrange_burmann_property(seed):
    spec = random_spec(seed)
    rng = random.Random(seed)
    c = ModelCache(spec, 6)
    H = c.vctx.from_dict({(k,): random_rational(rng) for k in range(0, 7) if rng.random() < 0.7})
    lhs, rhs = lagrange_burmann_sides(c, H)
    assert lhs == rhs


@settings(max_examples=5)
@given(st.integers(0, 10 ** 6))
def test_principal_identity_property(seed):
    spec = random_spec(seed)
    rng = random.Random(seed)
    c = ModelCache(spec, 6, hbar_cap=4)
    H = c.vctx.from_dict({((a,), 0, (("u", b),)): random_rational(rng)
                          for a in range(6) for b in range(4) if rng.random() < 0.4})
    lhs, rhs = principal_identity_sides(c, H)
    assert lhs == rhs


def test_build_cache_and_L_series(usual, trivial):
    from hurwitz_npoint.model import L_series, build_cache
    from hurwitz_npoint.series import SeriesContext

    ctx = SeriesContext(1, 6, hbar=(0, 2), z_names=("z",))
    c = build_cache(usual, ctx)
    z = c.vctx.var("z")
    assert c.Q == c.vctx.one() - z
    assert c.X.coefficient((3,)) == Fraction(1, 2)
    c0 = build_cache(trivial, ctx)
    assert c0.X == c0.vctx.var("z") and c0.Q == c0.vctx.one()
    L1 = L_series(c, 1)
    assert coeff(coeff(L1, "hbar", 0), "v", 1) == c.psi_deriv(1)
    assert not coeff(L1, "v", 0)
    tctx = SeriesContext(2, 6, hbar=(0, 2), aux=("u1", "u2", "v"))
    assert L_series(c, 0, 2, tctx).coefficient((0, 0)) == 1
