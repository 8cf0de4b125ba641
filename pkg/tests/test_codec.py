import json

import pytest
from hypothesis import given, settings, strategies as st

from ramif import FDecomposedWitt, Poly, Ring, TLaurent, WittVector, charform_omega, charform_witt, omega_conductor
from ramif import codec
from ramif.errors import SchemaError
from ramif.harness import _rng, random_decomposition, random_form

from helpers import form, space


def roundtrip(value, ring=None):
    text = codec.dumps(codec.encode(value, ring))
    return codec.loads(text)


def test_form_roundtrip():
    sp = space(5, 2)
    x = Poly.variable(sp.ring, "x1")
    w = form(sp, 1, {("dt",): TLaurent(sp.ring, {-3: x}, 8), ("dx1",): TLaurent(sp.ring, {-2: x ** 2}, 8)})
    assert roundtrip(w) == w


def test_witt_roundtrip():
    r = Ring(3, ("x1",))
    a = WittVector(3, [TLaurent(r, {-1: Poly.variable(r, "x1")}, 20), TLaurent(r, {2: 1}, 20)])
    assert roundtrip(a) == a


def test_rational_roundtrip():
    from fractions import Fraction
    q = Ring(0, ("x1",))
    f = TLaurent(q, {-1: Poly(q, {(1,): Fraction(-3, 4)})}, 5)
    doc = codec.encode(f)
    assert doc["value"]["terms"][0]["poly"][0]["coef"] == "-3/4"
    assert roundtrip(f) == f


def test_wrong_characteristic_rejected():
    sp = space(5, 2)
    w = form(sp, 1, {("dt",): TLaurent(sp.ring, {-3: 1}, 8)})
    text = codec.dumps(codec.encode(w))
    with pytest.raises(SchemaError):
        codec.loads(text, char=3)


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(schema="ramif/0"),
    lambda d: d.update(extra=1),
    lambda d: d.update(kind="nope"),
    lambda d: d["value"]["terms"][0]["coef"].update(surprise=True),
    lambda d: d["value"]["terms"][0]["coef"]["terms"][0]["poly"][0]["exponents"].update(x1=1.5),
    lambda d: d["value"]["terms"][0]["coef"]["terms"][0]["poly"][0]["exponents"].update(y=1),
    lambda d: d.update(characteristic=4),
    lambda d: d.update(characteristic="5"),
])
def test_strict_decoding(mutate):
    sp = space(5, 2)
    w = form(sp, 1, {("dt",): TLaurent(sp.ring, {-3: 1}, 8)})
    doc = json.loads(codec.dumps(codec.encode(w)))
    mutate(doc)
    with pytest.raises((SchemaError, ValueError)):
        codec.decode(doc)


def test_malformed_json():
    with pytest.raises(SchemaError):
        codec.loads("{not json")


def test_empty_charform_needs_ring():
    sp = space(3, 2)
    w = form(sp, 1, {("dt",): TLaurent(sp.ring, {-1: 1}, 8)})
    cf = charform_omega(w, 2, 3)
    assert cf.is_zero()
    with pytest.raises(ValueError):
        codec.encode(cf)
    assert roundtrip(cf, sp.ring) == cf


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3, 5]), st.integers(1, 2))
def test_form_and_charform_roundtrip(seed, p, j):
    w = random_form(_rng(seed, "codec"), space(p, 2), j)
    assert roundtrip(w) == w
    cf = charform_omega(w, max(omega_conductor(w, p), 2), p)
    assert roundtrip(cf, w.space.ring) == cf


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]), st.integers(1, 2))
def test_decomposition_roundtrip(seed, p, wl):
    x = random_decomposition(_rng(seed, "codec-w"), p, wl, Ring(p, ("x1",)))
    assert roundtrip(x) == x
    r = max(decomposed_bound(x), 2)
    cf = charform_witt(x, r)
    assert roundtrip(cf, x.ring) == cf


def decomposed_bound(x: FDecomposedWitt):
    from ramif.witt import decomposed_fsat_bound
    return decomposed_fsat_bound(x)
