"""Strict JSON encoding for the domain values.

Every document carries a schema tag, the characteristic and the divisor
variable list; payloads refer to variables by name.  Decoding rejects
unknown fields, non-integer exponents and characteristic mismatches.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .algebra import Poly, Ring, TLaurent
from .errors import RamifError, SchemaError
from .forms import CharForm, DiffForm, FormSpace, HomValue, ResidueForm
from .witt import FDecomposedWitt, WittVector

SCHEMA = "ramif/1"
KINDS = ("poly", "series", "form", "witt", "fwitt", "residue", "charform")


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _int(x, what):
    if isinstance(x, bool) or not isinstance(x, int):
        raise SchemaError(f"{what} must be an integer, got {x!r}")
    return x


def _keys(obj, required, optional=(), what="object"):
    if not isinstance(obj, dict):
        raise SchemaError(f"{what} must be a JSON object")
    keys = set(obj)
    missing = set(required) - keys
    extra = keys - set(required) - set(optional)
    if missing:
        raise SchemaError(f"{what} is missing {sorted(missing)}")
    if extra:
        raise SchemaError(f"{what} has unknown fields {sorted(extra)}")


def _list(x, what):
    if not isinstance(x, list):
        raise SchemaError(f"{what} must be a list")
    return x


# -- coefficients and polynomials ---------------------------------------------------

def _enc_coef(c):
    if isinstance(c, Fraction) and c.denominator != 1:
        return f"{c.numerator}/{c.denominator}"
    return int(c)


def _dec_coef(x, ring: Ring):
    if isinstance(x, str) and ring.char == 0:
        try:
            return Fraction(x)
        except ValueError:
            raise SchemaError(f"bad rational coefficient {x!r}") from None
    c = _int(x, "coefficient")
    if ring.char and not 0 <= c < ring.char:
        raise SchemaError(f"coefficient {c} is not a residue mod {ring.char}")
    return c


def enc_poly(f: Poly) -> list:
    names = f.ring.variables
    out = []
    for exps, c in f.terms().items():
        out.append({"exponents": {v: e for v, e in zip(names, exps) if e}, "coef": _enc_coef(c)})
    return out


def dec_poly(obj, ring: Ring) -> Poly:
    terms = {}
    for t in _list(obj, "poly"):
        _keys(t, ("exponents", "coef"), what="poly term")
        ex = t["exponents"]
        if not isinstance(ex, dict):
            raise SchemaError("exponents must be an object")
        exps = [0] * ring.nvars
        for v, e in ex.items():
            if v not in ring.variables:
                raise SchemaError(f"unknown variable {v!r}")
            e = _int(e, "exponent")
            if e < 0:
                raise SchemaError(f"negative exponent {e}")
            exps[ring.index(v)] = e
        exps = tuple(exps)
        if exps in terms:
            raise SchemaError(f"duplicate monomial {ex}")
        c = _dec_coef(t["coef"], ring)
        if c == 0:
            raise SchemaError("zero coefficients are not stored")
        terms[exps] = c
    return Poly(ring, terms)


def enc_series(f: TLaurent) -> dict:
    return {"pole_bound": f.pole_bound(), "precision": f.prec,
            "terms": [{"t_exp": e, "poly": enc_poly(c)} for e, c in f.items()]}


def dec_series(obj, ring: Ring) -> TLaurent:
    _keys(obj, ("pole_bound", "precision", "terms"), what="series")
    M = _int(obj["pole_bound"], "pole_bound")
    N = _int(obj["precision"], "precision")
    if M < 0 or N < 0:
        raise SchemaError("pole_bound and precision must be >= 0")
    terms = {}
    for t in _list(obj["terms"], "series terms"):
        _keys(t, ("t_exp", "poly"), what="series term")
        e = _int(t["t_exp"], "t_exp")
        if e < -M or e >= N:
            raise SchemaError(f"t-exponent {e} outside [-{M}, {N})")
        if e in terms:
            raise SchemaError(f"duplicate t-exponent {e}")
        terms[e] = dec_poly(t["poly"], ring)
    return TLaurent(ring, terms, N)


# -- forms --------------------------------------------------------------------------

def enc_form(w: DiffForm) -> dict:
    b = w.space.basis
    return {"degree": w.degree,
            "terms": [{"basis": [b[i] for i in k], "coef": enc_series(c)} for k, c in sorted(w.terms.items())]}


def _basis_key(names, basis, degree, what):
    if not isinstance(names, list) or len(names) != degree:
        raise SchemaError(f"{what} basis must list {degree} names")
    try:
        idx = [basis.index(n) for n in names]
    except ValueError:
        raise SchemaError(f"unknown basis element in {names}") from None
    if idx != sorted(set(idx)):
        raise SchemaError(f"basis {names} must be strictly increasing in {list(basis)}")
    return tuple(idx)


def dec_form(obj, ring: Ring) -> DiffForm:
    _keys(obj, ("degree", "terms"), what="form")
    j = _int(obj["degree"], "degree")
    space = FormSpace(ring)
    if not 0 <= j <= space.dim:
        raise SchemaError(f"degree {j} out of range")
    terms = {}
    for t in _list(obj["terms"], "form terms"):
        _keys(t, ("basis", "coef"), what="form term")
        k = _basis_key(t["basis"], space.basis, j, "form")
        if k in terms:
            raise SchemaError(f"duplicate basis {t['basis']}")
        terms[k] = dec_series(t["coef"], ring)
    return DiffForm(space, j, terms)


def enc_residue(f: ResidueForm) -> dict:
    b = f.basis
    return {"degree": f.degree,
            "terms": [{"basis": [b[i] for i in k], "coef": enc_poly(c)} for k, c in sorted(f.terms.items())]}


def dec_residue(obj, ring: Ring) -> ResidueForm:
    _keys(obj, ("degree", "terms"), what="residue form")
    j = _int(obj["degree"], "degree")
    basis = tuple("d" + v for v in ring.variables)
    # a zero part of a top-degree characteristic form sits one degree above the divisor
    if not 0 <= j <= len(basis) + 1 or (j > len(basis) and obj["terms"]):
        raise SchemaError(f"degree {j} out of range")
    terms = {}
    for t in _list(obj["terms"], "residue terms"):
        _keys(t, ("basis", "coef"), what="residue term")
        k = _basis_key(t["basis"], basis, j, "residue")
        if k in terms:
            raise SchemaError("duplicate basis")
        terms[k] = dec_poly(t["coef"], ring)
    return ResidueForm(ring, j, terms)


# -- Witt vectors ---------------------------------------------------------------------

def enc_witt(a: WittVector) -> dict:
    return {"p": a.p, "n": a.n, "components": [enc_series(c) for c in a.components]}


def dec_witt(obj, ring: Ring, p_expected=None) -> WittVector:
    _keys(obj, ("p", "n", "components"), what="witt")
    p = _int(obj["p"], "p")
    n = _int(obj["n"], "n")
    comps = _list(obj["components"], "components")
    if n < 1 or len(comps) != n:
        raise SchemaError(f"Witt length {n} does not match {len(comps)} components")
    if ring.char not in (0, p):
        raise SchemaError(f"Witt prime {p} does not match characteristic {ring.char}")
    if p_expected is not None and p != p_expected:
        raise SchemaError(f"Witt prime {p} but {p_expected} expected")
    try:
        return WittVector(p, [dec_series(c, ring) for c in comps])
    except RamifError as e:
        raise SchemaError(str(e)) from None


def enc_fwitt(x: FDecomposedWitt) -> list:
    return [{"j": j, "witt": enc_witt(b)} for j, b in x.parts.items()]


def dec_fwitt(obj, ring: Ring) -> FDecomposedWitt:
    parts = {}
    for t in _list(obj, "decomposition"):
        _keys(t, ("j", "witt"), what="decomposition part")
        j = _int(t["j"], "j")
        if j < 0 or j in parts:
            raise SchemaError(f"bad or duplicate Frobenius index {j}")
        parts[j] = dec_witt(t["witt"], ring)
    if not parts:
        raise SchemaError("empty decomposition")
    try:
        return FDecomposedWitt(parts)
    except ValueError as e:
        raise SchemaError(str(e)) from None


# -- characteristic forms -----------------------------------------------------------------

def enc_charform(cf: CharForm) -> dict:
    entries = []
    order = {"t": -1}
    for name, h in sorted(cf.entries.items(), key=lambda kv: (order.get(kv[0], 0), kv[0])):
        entries.append({"index": name, "plain": enc_residue(h.plain),
                        "dpart": None if h.dpart is None else enc_residue(h.dpart),
                        "frob": [{"s": s, "form": enc_residue(f)} for s, f in h.frob]})
    return {"level": cf.level, "family": cf.family, "witt_length": cf.witt_length, "entries": entries}


def dec_charform(obj, ring: Ring) -> CharForm:
    _keys(obj, ("level", "family", "witt_length", "entries"), what="charform")
    level = _int(obj["level"], "level")
    family = obj["family"]
    if family not in ("omega", "witt", "h1"):
        raise SchemaError(f"unknown charform family {family!r}")
    wl = obj["witt_length"]
    if wl is not None:
        wl = _int(wl, "witt_length")
    entries = {}
    allowed = ("t",) + ring.variables
    for e in _list(obj["entries"], "entries"):
        _keys(e, ("index", "plain", "dpart", "frob"), what="charform entry")
        name = e["index"]
        if name not in allowed or name in entries:
            raise SchemaError(f"bad or duplicate index {name!r}")
        frob = []
        for f in _list(e["frob"], "frob parts"):
            _keys(f, ("s", "form"), what="frob part")
            s = _int(f["s"], "s")
            if s < 1:
                raise SchemaError("Frobenius exponents in frob parts are >= 1")
            frob.append((s, dec_residue(f["form"], ring)))
        dpart = None if e["dpart"] is None else dec_residue(e["dpart"], ring)
        entries[name] = HomValue(dec_residue(e["plain"], ring), dpart, tuple(frob))
    return CharForm(level, entries, family=family, witt_length=wl)


# -- documents -------------------------------------------------------------------------------

_ENCODERS = {"poly": enc_poly, "series": enc_series, "form": enc_form, "witt": enc_witt,
             "fwitt": enc_fwitt, "residue": enc_residue, "charform": enc_charform}


def kind_of(value) -> str:
    for kind, cls in (("poly", Poly), ("series", TLaurent), ("form", DiffForm), ("witt", WittVector),
                      ("fwitt", FDecomposedWitt), ("residue", ResidueForm), ("charform", CharForm)):
        if isinstance(value, cls):
            return kind
    raise TypeError(f"cannot encode {type(value).__name__}")


def _ring_of(value) -> Ring:
    if isinstance(value, DiffForm):
        return value.space.ring
    if isinstance(value, CharForm):
        for h in value.entries.values():
            return h.plain.ring
        return None
    return value.ring


def encode(value, ring: Ring | None = None) -> dict:
    kind = kind_of(value)
    ring = _ring_of(value) or ring
    if ring is None:
        raise ValueError("an empty characteristic form needs an explicit ring")
    return {"schema": SCHEMA, "characteristic": ring.char, "variables": list(ring.variables),
            "kind": kind, "value": _ENCODERS[kind](value)}


def decode(doc, char: int | None = None, kind: str | None = None):
    _keys(doc, ("schema", "characteristic", "variables", "kind", "value"), what="document")
    if doc["schema"] != SCHEMA:
        raise SchemaError(f"schema {doc['schema']!r} is not {SCHEMA!r}")
    p = _int(doc["characteristic"], "characteristic")
    if char is not None and p != char:
        raise SchemaError(f"document characteristic {p} but {char} expected")
    names = doc["variables"]
    if not isinstance(names, list) or not all(isinstance(v, str) and v.isidentifier() for v in names):
        raise SchemaError("variables must be a list of identifiers")
    try:
        ring = Ring(p, names)
    except (RamifError, ValueError) as e:
        raise SchemaError(str(e)) from None
    k = doc["kind"]
    if k not in KINDS:
        raise SchemaError(f"unknown kind {k!r}")
    if kind is not None and k not in ((kind,) if isinstance(kind, str) else kind):
        raise SchemaError(f"expected a {kind} document, got {k}")
    v = doc["value"]
    if k == "poly":
        return dec_poly(v, ring)
    if k == "series":
        return dec_series(v, ring)
    if k == "form":
        return dec_form(v, ring)
    if k == "witt":
        return dec_witt(v, ring)
    if k == "fwitt":
        return dec_fwitt(v, ring)
    if k == "residue":
        return dec_residue(v, ring)
    return dec_charform(v, ring)


def loads(text: str, char: int | None = None, kind=None):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"malformed JSON: {e}") from None
    return decode(doc, char, kind)
