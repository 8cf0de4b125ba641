import pytest
import sympy
from hypothesis import given, settings, strategies as st

from ramif import (DiffForm, FDecomposedWitt, Fd, FormSpace, Poly, Ring, TLaurent, WittVector, bk_log_member, charform_h1,
                   charform_witt, fsat_member, matsuda_conductor, matsuda_member)
from ramif.errors import MembershipError
from ramif.forms import CharForm, HomValue, ResidueForm
from ramif.harness import _rng, random_decomposition, random_witt
from ramif.witt import bk_conductor, decomposed_fsat_bound, fsat_conductor, restrict_to_curve_witt, universal_polynomials


def wv(p, comps, ring=None, prec=40):
    ring = ring or Ring(p, ())
    out = []
    for c in comps:
        if isinstance(c, TLaurent):
            out.append(c)
        elif c == 0:
            out.append(TLaurent.zero(ring, prec))
        else:
            e, coef = c
            out.append(TLaurent.monomial(ring, e, coef, prec))
    return WittVector(p, out)


def _sympy_second_component(p, op):
    """S_1 / P_1 from the ghost equation w_1 = x_0^p + p x_1, solved over Q."""
    x0, x1, y0, y1 = sympy.symbols("x0 x1 y0 y1")
    w0 = lambda a0: a0  # noqa: E731
    w1 = lambda a0, a1: a0 ** p + p * a1  # noqa: E731
    if op == "add":
        s0 = w0(x0) + w0(y0)
        target = w1(x0, x1) + w1(y0, y1)
    else:
        s0 = w0(x0) * w0(y0)
        target = w1(x0, x1) * w1(y0, y1)
    s1 = sympy.expand((target - s0 ** p) / p)
    return sympy.Poly(s1, x0, x1, y0, y1).as_dict()


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("op", ["add", "mul"])
def test_universal_polynomials_match_sympy(p, op):
    ours = universal_polynomials(p, 2, op)[1]
    # our variable order: X0, X1, Y0, Y1
    got = {tuple(exps): c for c, exps in ours}
    want = {tuple(k): int(v) for k, v in _sympy_second_component(p, op).items()}
    assert got == want


def test_char_two_carry():
    a = wv(2, [(0, 1), 0])
    s = a + a
    assert s.components[0].is_zero()
    assert s.components[1] == TLaurent.monomial(Ring(2, ()), 0, 1, 40)


def test_additive_identities():
    a = wv(3, [(-1, 1), (-2, 2)])
    z = WittVector.zero(3, 2, Ring(3, ()), 40)
    assert (a + z).agrees_with(a)
    assert (a - a).is_zero()


def test_teichmuller_verschiebung_frobenius():
    r = Ring(3, ("x1",))
    x = TLaurent(r, {0: Poly.variable(r, "x1")}, 20)
    tm = WittVector.teichmuller(x, 3, 3)
    assert tm.components[0] == x and tm.components[1].is_zero() and tm.components[2].is_zero()
    a = wv(3, [(-1, 1), (-2, 1), (1, 2)], r)
    va = a.verschiebung()
    assert va.components[0].is_zero() and va.components[1:] == a.components[:2]
    f = wv(3, [(-1, 1), 0]).frobenius()
    assert f.components[0].t_exponents() == [-3] and f.components[1].is_zero()


def test_ghost_examples():
    q = Ring(0, ("x", "y"))
    x = TLaurent(q, {0: Poly.variable(q, "x")}, 10)
    y = TLaurent(q, {0: Poly.variable(q, "y")}, 10)
    g = WittVector(2, [x, y]).ghost()
    assert g[0] == x
    assert g[1] == x * x + y * 2
    zero = WittVector.zero(2, 2, q, 10).ghost()
    assert all(c.is_zero() for c in zero)


def test_matsuda_examples():
    a = wv(3, [(-1, 1), 0])
    assert not matsuda_member(a, 3)
    assert matsuda_member(a, 4)
    assert matsuda_member(wv(2, [0, (-2, 1)]), 2)
    assert not matsuda_member(wv(2, [(-1, 1), 0]), 2)
    assert bk_log_member(a, 3)


def test_fsat_example():
    a = wv(3, [(-1, 1), 0]).frobenius()
    assert matsuda_conductor(a) == 9
    assert fsat_member(a, 4)
    assert not fsat_member(a, 3)
    assert fsat_member(wv(3, [(2, 1), (0, 1)]), 1)


def test_fd_examples():
    r = Ring(3, ("x1",))
    f = TLaurent(r, {-2: Poly.variable(r, "x1")}, 10)
    assert Fd(WittVector(3, [f])).agrees_with(DiffForm.function(FormSpace(r), f).d())
    got = Fd(wv(3, [(-1, 1), 0]))
    c = got.terms[(0,)]
    assert c.t_exponents() == [-4] and c.coefficient(-4).constant_term() == 2
    assert Fd(WittVector.zero(3, 2, Ring(3, ()), 10)).is_zero()


def _fn(ring, c):
    return ResidueForm.function(Poly.constant(ring, c) if not isinstance(c, Poly) else c)


def test_charform_witt_p3():
    r0 = Ring(3, ())
    x = FDecomposedWitt({0: wv(3, [(-1, 1), 0])})
    want = CharForm(4, {"t": HomValue(_fn(r0, 2), None)}, family="witt", witt_length=2)
    assert charform_witt(x, 4) == want


def _p2_example():
    r = Ring(2, ("x1",))
    xs = Poly.variable(r, "x1")
    beta = WittVector(2, [TLaurent(r, {-2: xs}, 40)])
    return r, xs, FDecomposedWitt({0: beta})


def test_charform_witt_p2_level2():
    r, xs, x = _p2_example()
    zero = ResidueForm.zero(r, 0)
    want = CharForm(2, {"x1": HomValue(_fn(r, 1), None), "t": HomValue(zero, None, ((1, _fn(r, xs)),))},
                    family="witt", witt_length=1)
    assert charform_witt(x, 2) == want
    h1 = charform_h1(charform_witt(x, 2))
    assert h1.entries["x1"].plain == _fn(r, 1)
    assert h1.entries["t"].plain == _fn(r, xs)
    assert not h1.entries["t"].frob


def test_charform_witt_kernel():
    x = FDecomposedWitt({0: wv(3, [(-1, 1), 0])})
    assert charform_witt(x, 5).is_zero()
    with pytest.raises(MembershipError):
        charform_witt(x, 3)


def test_h1_linear():
    r, xs, x = _p2_example()
    cf = charform_witt(x, 2)
    assert charform_h1(CharForm(2, {}, "witt", 1)).is_zero()
    doubled = CharForm(2, {k: h + h for k, h in cf.entries.items()}, "witt", 1)
    assert charform_h1(doubled).is_zero()  # char 2


def test_restrict_witt():
    r = Ring(3, ("x1",))
    a = WittVector(3, [TLaurent(r, {-1: Poly.variable(r, "x1")}, 30), TLaurent.zero(r, 30)])
    phi = {"x1": TLaurent(Ring(3, ()), {2: 1}, 30)}
    got = restrict_to_curve_witt(a, phi)
    assert got.components[0].t_exponents() == [1]
    assert got.is_integral()
    assert fsat_conductor(got) == 0


# -- properties --------------------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]), st.integers(1, 3))
def test_ghost_is_homomorphism(seed, p, n):
    rng = _rng(seed, "ghost")
    q = Ring(0, ("x1",))
    a, b = random_witt(rng, p, n, q, -2, 2), random_witt(rng, p, n, q, -2, 2)
    for res, op in ((a + b, lambda u, v: u + v), (a * b, lambda u, v: u * v), (a - b, lambda u, v: u - v)):
        for u, v, w in zip(a.ghost(), b.ghost(), res.ghost()):
            assert op(u, v).agrees_with(w)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]), st.integers(1, 3))
def test_fv_and_projection(seed, p, n):
    rng = _rng(seed, "fv")
    r = Ring(p, ("x1",))
    a = random_witt(rng, p, n, r, -2, 2, 400)
    b = random_witt(rng, p, n, r, -2, 2, 400)
    assert a.verschiebung().frobenius().agrees_with(a.times(p))
    assert (a.frobenius() * b).verschiebung().agrees_with(a * b.verschiebung())


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3, 5]), st.integers(1, 3), st.integers(1, 9))
def test_filtration_sandwich(seed, p, n, r):
    a = random_witt(_rng(seed, "sandwich"), p, n, Ring(p, ("x1",)))
    if bk_log_member(a, r - 1):
        assert matsuda_member(a, r)
    if matsuda_member(a, r):
        assert bk_log_member(a, r)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3, 5]), st.integers(1, 3))
def test_conductors_ordered(seed, p, n):
    a = random_witt(_rng(seed, "cond"), p, n, Ring(p, ("x1",)))
    assert bk_conductor(a) <= matsuda_conductor(a) <= bk_conductor(a) + 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]), st.integers(1, 2))
def test_fsat_monotone_and_bounded(seed, p, n):
    x = random_decomposition(_rng(seed, "fsat"), p, n, Ring(p, ("x1",)))
    a = x.recombine()
    bound = decomposed_fsat_bound(x)
    seq = [fsat_member(a, r) for r in range(1, 7)]
    assert all(not seq[i] or seq[i + 1] for i in range(5))
    if 1 <= bound <= 6:
        assert seq[bound - 1]
