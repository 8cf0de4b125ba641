"""Small constructors shared by the test modules."""

from ramif import DiffForm, FormSpace, Poly, TLaurent


def poly(ring, terms):
    """terms: {exponent tuple: coefficient}"""
    return Poly(ring, {tuple(k): v for k, v in terms.items()})


def mono(ring, e, exps=None, c=1, prec=None):
    exps = exps or (0,) * ring.nvars
    return TLaurent.monomial(ring, e, Poly(ring, {tuple(exps): c}), prec)


def xvar(ring, name="x1", power=1):
    return Poly.variable(ring, name, power)


def form(space, degree, named):
    """named: {("dt", "dx1"): series}"""
    return DiffForm.from_named(space, degree, named)


def space(p, d):
    return FormSpace.base(p, d)
