import pytest
import sympy
from hypothesis import given, settings, strategies as st

from ramif import (CharForm, FDecomposedWitt, HomValue, Poly, ResidueForm, Ring, TLaurent, WittVector,
                   additive_decompose, as_member, build_model, charform_omega, charform_witt, delta, model_for,
                   omega_fas_member, oracle_charform, psi_extract)
from ramif.dilatation import FiberWitt, precision_policy
from ramif.errors import MembershipError, NonAdditiveError, PrecisionError
from ramif.harness import _rng, random_form

from helpers import form, mono, space


def dt_pole(p, e, d=1):
    sp = space(p, d)
    return form(sp, 1, {("dt",): mono(sp.ring, -e, prec=8)})


def test_unit_series():
    m = build_model(3, 1, 2, 1)
    tau = Poly.variable(m.ring, "tau")
    u = m.unit
    assert u.coefficient(0) == Poly.constant(m.ring, 1)
    assert u.coefficient(1) == -tau
    assert u.coefficient(2) == tau ** 2


def test_coordinate_difference():
    m = build_model(5, 2, 3, 1)
    z = TLaurent(m.base_ring, {1: 1}, 10)
    dl = delta(m, z)
    assert dl.t_exponents() == [3]
    assert dl.coefficient(3) == Poly.variable(m.ring, "tau")
    x = TLaurent(m.base_ring, {0: Poly.variable(m.base_ring, "x1")}, 10)
    assert delta(m, x).coefficient(3) == Poly.variable(m.ring, "tau_x1")


def test_pullback_of_dz():
    m = build_model(5, 1, 3, 1)
    img = m.p2_basis((0,))
    tau = Poly.variable(m.ring, "tau")
    assert img.terms[(0,)].coefficient(0) == Poly.constant(m.ring, 1)
    assert img.terms[(0,)].coefficient(2) == tau * 3
    assert img.terms[(m.space.position("tau"),)].t_exponents() == [3]


def test_inverse_coordinate_n2():
    m = build_model(3, 1, 2, 1)
    dl = delta(m, TLaurent(m.base_ring, {-1: 1}, 10))
    want = (m.unit * TLaurent(m.ring, {0: -Poly.variable(m.ring, "tau")}, m.precision))
    assert dl.agrees_with(want)
    assert dl.valuation() >= 0


def test_inverse_coordinate_n1():
    m = build_model(3, 1, 1, 1)
    dl = delta(m, TLaurent(m.base_ring, {-1: 1}, 10))
    assert not as_member(m, TLaurent(m.base_ring, {-1: 1}, 10))
    assert dl.valuation() == -1


def test_regular_stays_regular():
    sp = space(3, 2)
    w = form(sp, 1, {("dx1",): mono(sp.ring, 2, (3,), prec=8)})
    for n in (1, 2, 4):
        assert as_member(model_for(w, n), w)


def test_forms_examples():
    assert as_member(model_for(dt_pole(3, 3), 3), dt_pole(3, 3))
    # level 2 bounds dt/t^2 (difference -tau^2 dt + dtau + O(t)) but not dt/t^3 (2 tau dt/t^2 + dtau/t)
    assert as_member(model_for(dt_pole(3, 2), 2), dt_pole(3, 2))
    assert not as_member(model_for(dt_pole(3, 3), 2), dt_pole(3, 3))
    assert as_member(model_for(dt_pole(3, 1), 1), dt_pole(3, 1))
    assert not as_member(model_for(dt_pole(3, 2), 1), dt_pole(3, 2))


def test_integral_witt_is_member():
    r = Ring(3, ("x1",))
    a = WittVector(3, [TLaurent(r, {0: Poly.variable(r, "x1")}, 20), TLaurent(r, {2: 1}, 20)])
    for n in (1, 2, 3):
        assert as_member(model_for(a, n), a)


def test_psi_and_charform_dt_t3():
    w = dt_pole(3, 3)
    m = model_for(w, 3)
    psi = psi_extract(m, delta(m, w))
    assert psi == ResidueForm(m.ring, 1, {(0,): 1}, m.fiber_coords)
    add = additive_decompose(m, psi)
    assert dict(add.parts)["t"].dpart == ResidueForm.function(Poly.constant(m.base_ring, 1))
    r = m.base_ring
    want = CharForm(3, {"t": HomValue(ResidueForm.zero(r, 1), ResidueForm.function(Poly.constant(r, 1)))})
    assert oracle_charform(m, w) == want


def test_psi_vanishes_below():
    w = dt_pole(3, 2)  # already bounded at level 3
    m = model_for(w, 4)
    psi = psi_extract(m, delta(m, w))
    assert not psi
    sp = space(5, 2)
    reg = form(sp, 1, {("dx1",): mono(sp.ring, 1, prec=8)})
    m = model_for(reg, 3)
    assert not psi_extract(m, delta(m, reg))
    assert oracle_charform(m, reg).is_zero()


def test_additive_decompose_shapes():
    m = build_model(3, 2, 3, 1)
    ring = m.ring
    tau = Poly.variable(ring, "tau")
    x = Poly.variable(ring, "x1")
    gamma = FiberWitt(3, (tau ** 3 * x,))
    parts = dict(additive_decompose(m, gamma).parts)
    assert parts["t"].frob_dict() == {1: ResidueForm.function(Poly.variable(m.base_ring, "x1"))}
    with pytest.raises(NonAdditiveError):
        additive_decompose(m, FiberWitt(3, (tau ** 2 * x,)))


def test_witt_p2_level2_oracle():
    r = Ring(2, ("x1",))
    a = WittVector(2, [TLaurent(r, {-2: Poly.variable(r, "x1")}, 40)])
    got = oracle_charform(model_for(a, 2), a)
    assert got == charform_witt(FDecomposedWitt({0: a}), 2)


def test_witt_frobenius_twist_oracle():
    r = Ring(3, ())
    beta = WittVector(3, [TLaurent(r, {-1: 1}, 40), TLaurent.zero(r, 40)])
    a = beta.frobenius()
    assert not as_member(model_for(a, 3), a)
    assert as_member(model_for(a, 4), a)
    assert oracle_charform(model_for(a, 4), a) == charform_witt(FDecomposedWitt({1: beta}), 4)


def test_non_member_charform_raises():
    with pytest.raises(MembershipError):
        oracle_charform(model_for(dt_pole(3, 3), 2), dt_pole(3, 3))


def test_model_validation():
    with pytest.raises(PrecisionError):
        delta(build_model(3, 1, 2, 1), dt_pole(3, 3))
    with pytest.raises(ValueError):
        build_model(3, 1, 0, 1)


def test_guard_env(monkeypatch):
    base = precision_policy(3, 2, 3)
    monkeypatch.setenv("RAMIF_PRECISION_GUARD", "7")
    assert precision_policy(3, 2, 3) == base + 7


# -- an independent expansion with sympy for f(z) dz on a curve -------------------------------

def _sympy_member(p, n, e, c=1):
    """Is c z^-e dz bounded at level n?  Expand p2* - p1* by the binomial series in t."""
    t, tau, dtau = sympy.symbols("t tau dtau")
    K = e // max(n - 1, 1) + 3
    ser = sum(sympy.binomial(-e, k) * (t ** (n - 1) * tau) ** k for k in range(K + 1))
    zimg = t ** -e * ser
    dt_coef = sympy.expand(c * zimg * (1 + n * t ** (n - 1) * tau) - c * t ** -e)
    dtau_coef = sympy.expand(c * zimg * t ** n)
    for expr in (dt_coef, dtau_coef):
        for term in sympy.Add.make_args(expr):
            coeff, rest = term.as_coeff_Mul()
            et = sympy.degree(rest * t ** 50, t) - 50
            if et < 0 and int(coeff) % p:
                return False
    return True


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(2, 5), st.integers(1, 6))
def test_oracle_matches_binomial_expansion(p, n, e):
    w = dt_pole(p, e)
    assert as_member(model_for(w, n), w) == _sympy_member(p, n, e)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3, 5]), st.integers(1, 2), st.integers(1, 6))
def test_oracle_agrees_with_closed_form(seed, p, j, n):
    w = random_form(_rng(seed, "oracle"), space(p, 2), j)
    m = model_for(w, n)
    member = as_member(m, w)
    assert member == omega_fas_member(w, n, p)
    if member and n >= 2:
        assert oracle_charform(m, w) == charform_omega(w, n, p)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3, 5]), st.integers(1, 2))
def test_monotone_in_level(seed, p, j):
    w = random_form(_rng(seed, "mono"), space(p, 2), j)
    seq = [as_member(model_for(w, n), w) for n in range(1, 7)]
    assert seq == sorted(seq)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]), st.integers(2, 5))
def test_precision_independent(seed, p, n):
    w = random_form(_rng(seed, "prec"), space(p, 2), 1)
    m = model_for(w, n)
    big = model_for(w, n, m.precision + 5)
    assert as_member(m, w) == as_member(big, w)
    if as_member(m, w):
        assert oracle_charform(m, w) == oracle_charform(big, w)
