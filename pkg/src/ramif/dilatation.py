"""Local chart of the dilatation of X x X along nD, by explicit substitution.

Ambient variables: t, the divisor coordinates x_i, tau, and tau_<x_i>.
The two projections act by

    p1*: z -> t,             z_i -> x_i
    p2*: z -> t + t^n tau,   z_i -> x_i + t^n tau_<x_i>

and a section a is bounded by nD iff p2*a - p1*a has no negative t-powers.
For n >= 2 the unit 1 + tau t^(n-1) is inverted as a truncated series.  For
n = 1 the unit 1 + tau does not depend on t, so its inverse is carried as an
extra variable w with w (1 + tau) = 1 and everything stays exact.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .algebra import Poly, Ring, TLaurent
from .errors import MembershipError, NonAdditiveError, PrecisionError
from .forms import S_MAX, CharForm, DiffForm, FormSpace, HomValue, ResidueForm, default_names
from .witt import WittVector

GUARD_ENV = "RAMIF_PRECISION_GUARD"


def precision_guard() -> int:
    raw = os.environ.get(GUARD_ENV, "0").strip() or "0"
    try:
        g = int(raw)
    except ValueError:
        raise ValueError(f"{GUARD_ENV} must be an integer, got {raw!r}") from None
    if g < 0:
        raise ValueError(f"{GUARD_ENV} must be >= 0")
    return g


def precision_policy(p: int, n: int, max_pole: int, witt_length: int = 1) -> int:
    base = p if p else 1
    return (n + 1) * max_pole * base ** (witt_length - 1) + 4 + precision_guard()


def tau_name(var: str) -> str:
    return f"tau_{var}"


class DilatationModel:
    """Immutable description of one chart; substitution images are memoized."""

    def __init__(self, p, d, n, max_pole, witt_length, precision, names):
        self.p = p
        self.d = d
        self.n = n
        self.max_pole = max_pole
        self.witt_length = witt_length
        self.precision = precision
        self.names = tuple(names)
        self.base_ring = Ring(p, self.names)
        self.base_space = FormSpace(self.base_ring)
        coords = self.names + ("tau",) + tuple(tau_name(v) for v in self.names)
        self.exact_unit = n == 1
        extra = ("w",) if self.exact_unit else ()
        self.ring = Ring(p, coords + extra)
        self.space = FormSpace(self.ring, coords)
        self.fiber_coords = coords
        N = precision
        tau = Poly.variable(self.ring, "tau")
        if self.exact_unit:
            self.unit = None
        else:
            self.unit = TLaurent(self.ring, {0: 1, n - 1: tau}, N).unit_inverse()
        self._t_cache: dict = {}
        self._x_cache: dict = {}
        self._form_cache: dict = {}
        self._x_images = {v: TLaurent(self.ring, {0: Poly.variable(self.ring, v),
                                                   n: Poly.variable(self.ring, tau_name(v))}, N)
                          for v in self.names}
        self._one_forms = self._build_one_forms()

    def __repr__(self):
        return (f"DilatationModel(p={self.p}, d={self.d}, n={self.n}, M={self.max_pole}, "
                f"witt_length={self.witt_length}, N={self.precision})")

    # -- substitution images ---------------------------------------------------
    def _series(self, terms):
        return TLaurent(self.ring, terms, self.precision)

    def t_image(self, e: int) -> TLaurent:
        """p2*(z^e)."""
        if e in self._t_cache:
            return self._t_cache[e]
        n, N = self.n, self.precision
        tau = Poly.variable(self.ring, "tau")
        if self.exact_unit:
            if e >= 0:
                img = TLaurent(self.ring, {e: (tau + 1) ** e}, N)
            else:
                img = TLaurent(self.ring, {e: Poly.variable(self.ring, "w", -e)}, N)
        elif e >= 0:
            img = (self._series({0: 1, n - 1: tau}) ** e).shift(e).truncate(N)
        else:
            img = (self.unit ** (-e)).shift(e)
        self._t_cache[e] = img
        return img

    def _x_power(self, v, a):
        key = (v, a)
        if key not in self._x_cache:
            self._x_cache[key] = self._x_images[v] ** a
        return self._x_cache[key]

    def _p2_poly(self, poly: Poly) -> TLaurent:
        acc = TLaurent.zero(self.ring, self.precision)
        for exps, c in poly.terms().items():
            term = self._series({0: c})
            for v, a in zip(self.names, exps):
                if a:
                    term = term * self._x_power(v, a)
            acc = acc + term
        return acc

    def _check_input(self, f: TLaurent):
        if f.ring != self.base_ring:
            raise ValueError(f"input ring {f.ring} does not match the model ({self.base_ring})")
        if f.pole_bound() > self.max_pole:
            raise PrecisionError(f"pole {f.pole_bound()} exceeds the model bound {self.max_pole}")

    def p1(self, f: TLaurent) -> TLaurent:
        self._check_input(f)
        return f.embed(self.ring).truncate(self.precision)

    def p2(self, f: TLaurent) -> TLaurent:
        self._check_input(f)
        acc = TLaurent.zero(self.ring, min(f.prec, self.precision))
        for e, poly in f.items():
            if e >= self.precision:
                continue
            acc = acc + self.t_image(e) * self._p2_poly(poly)
        return acc

    def _build_one_forms(self):
        n = self.n
        sp = self.space
        tau = Poly.variable(self.ring, "tau")
        out = {0: DiffForm(sp, 1, {(0,): self._series({0: 1}) + self._series({n - 1: tau * n}),
                                   (sp.position("tau"),): self._series({n: 1})})}
        for v in self.names:
            tv = Poly.variable(self.ring, tau_name(v))
            i = sp.position(v)
            terms = {(i,): self._series({0: 1}), (sp.position(tau_name(v)),): self._series({n: 1})}
            terms[(0,)] = self._series({n - 1: tv * n})
            out[i] = DiffForm(sp, 1, terms)
        return out

    def p2_basis(self, k: tuple) -> DiffForm:
        """p2* of the basis monomial dz_K (indices of the base space)."""
        if k not in self._form_cache:
            acc = DiffForm(self.space, 0, {(): self._series({0: 1})})
            for i in k:
                acc = acc.wedge(self._one_forms[i])
            self._form_cache[k] = acc
        return self._form_cache[k]

    def p1_form(self, omega: DiffForm) -> DiffForm:
        return DiffForm(self.space, omega.degree, {k: self.p1(c) for k, c in omega.terms.items()})

    def p2_form(self, omega: DiffForm) -> DiffForm:
        acc = DiffForm(self.space, omega.degree)
        for k, c in omega.terms.items():
            acc = acc + self.p2_basis(k).scale(self.p2(c))
        return acc


def build_model(p: int, d: int, n: int, max_pole: int, witt_length: int = 1, precision: int | None = None,
                names=None) -> DilatationModel:
    if n < 1:
        raise ValueError("dilatation level must be >= 1")
    if max_pole < 0:
        raise ValueError("pole bound must be >= 0")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    names = default_names(d) if names is None else tuple(names)
    if len(names) != d - 1:
        raise ValueError(f"dimension {d} needs {d - 1} divisor variables")
    N = precision_policy(p, n, max_pole, witt_length) if precision is None else precision
    if N < max_pole * max(p, 1) ** (witt_length - 1) + 1:
        raise PrecisionError(f"precision {N} cannot hold the pole part")
    return DilatationModel(p, d, n, max_pole, witt_length, N, names)


def model_for(a, n: int, precision: int | None = None) -> DilatationModel:
    """Smallest model able to hold input a at level n."""
    if isinstance(a, DiffForm):
        ring, pole, wl = a.space.ring, a.pole_bound(), 1
    elif isinstance(a, WittVector):
        ring, pole, wl = a.ring, a.pole_bound(), a.n
    else:
        ring, pole, wl = a.ring, a.pole_bound(), 1
    return build_model(ring.char, ring.nvars + 1, n, pole, wl, precision, ring.variables)


# -- the difference and its regularity ----------------------------------------

def delta(model: DilatationModel, a):
    """p2*a - p1*a over the ambient ring."""
    if isinstance(a, DiffForm):
        if a.space != model.base_space:
            raise ValueError("form does not live on the model's base space")
        out = model.p2_form(a) - model.p1_form(a)
        prec = out.prec
    elif isinstance(a, WittVector):
        if a.n > model.witt_length:
            raise PrecisionError(f"Witt length {a.n} exceeds the model's {model.witt_length}")
        q = WittVector(a.p, [model.p2(c) for c in a.components])
        r = WittVector(a.p, [model.p1(c) for c in a.components])
        out = q - r
        prec = out.prec
    elif isinstance(a, TLaurent):
        out = model.p2(a) - model.p1(a)
        prec = out.prec
    else:
        raise TypeError(f"unsupported input {type(a).__name__}")
    if prec < 1:
        raise PrecisionError("precision exhausted before the constant term")
    return out


def _clear_unit(poly: Poly, ring: Ring) -> Poly:
    """Multiply by (1 + tau)^D and use w (1 + tau) = 1; zero iff poly is zero in C."""
    wi = ring.index("w")
    D = poly.degree("w")
    if D <= 0:
        return poly
    one_tau = Poly.variable(ring, "tau") + 1
    acc = Poly.zero(ring)
    for exps, c in poly.terms().items():
        k = exps[wi]
        rest = list(exps)
        rest[wi] = 0
        acc = acc + Poly(ring, {tuple(rest): c}) * one_tau ** (D - k)
    return acc


def _series_regular(model, s: TLaurent) -> bool:
    if not model.exact_unit:
        return s.valuation() >= 0
    for e, c in s.items():
        if e < 0 and _clear_unit(c, model.ring):
            return False
    return True


def is_regular(model: DilatationModel, dl) -> bool:
    if isinstance(dl, DiffForm):
        return all(_series_regular(model, c) for c in dl.terms.values())
    if isinstance(dl, WittVector):
        return all(_series_regular(model, c) for c in dl.components)
    return _series_regular(model, dl)


def as_member(model: DilatationModel, a) -> bool:
    return is_regular(model, delta(model, a))


# -- psi and the additive decomposition ------------------------------------------

@dataclass(frozen=True)
class FiberWitt:
    """Witt vector over the fiber ring k[x, tau, tau_i] (components as Poly)."""

    p: int
    components: tuple


def psi_extract(model: DilatationModel, dl):
    if model.n < 2:
        raise ValueError("psi is defined for level n >= 2")
    if not is_regular(model, dl):
        raise MembershipError("difference is not regular; psi undefined")
    if isinstance(dl, DiffForm):
        terms = {}
        for k, c in dl.terms.items():
            if 0 in k:
                continue
            terms[tuple(i - 1 for i in k)] = c.coefficient(0)
        return ResidueForm(model.ring, dl.degree, terms, model.fiber_coords)
    if isinstance(dl, WittVector):
        return FiberWitt(dl.p, tuple(c.coefficient(0) for c in dl.components))
    return dl.coefficient(0)


@dataclass(frozen=True)
class AdditiveElement:
    """Per pole-basis index: the tau_i, dtau_i and tau_i^(p^s) parts."""

    family: str
    degree: int
    parts: tuple  # ((index name, HomValue), ...)


def _tau_power(model, tau_exps):
    """(basis position, s) when the tau-monomial is tau_i^(p^s), else None."""
    nz = [(i, e) for i, e in enumerate(tau_exps) if e]
    if len(nz) != 1:
        return None
    i, e = nz[0]
    s = 0
    p = model.p
    while p and e % p == 0:
        e //= p
        s += 1
    if e != 1 or s > S_MAX:
        return None
    return i, s


def _index_names(model):
    return ("t",) + model.names


def additive_decompose(model: DilatationModel, gamma) -> AdditiveElement:
    m = len(model.names)
    base = model.base_ring
    names = _index_names(model)
    if isinstance(gamma, ResidueForm):
        j = gamma.degree
        zero_j = ResidueForm.zero(base, j)
        zero_a = ResidueForm.zero(base, j - 1)
        acc = {}

        def add(name, hv):
            acc[name] = acc[name] + hv if name in acc else hv

        for k, poly in gamma.terms.items():
            dx = tuple(i for i in k if i < m)
            dtau = tuple(i - m for i in k if i >= m)
            for exps, c in poly.terms().items():
                xpart = Poly(base, {exps[:m]: c})
                texps = exps[m:]
                if not dtau:
                    hit = _tau_power(model, texps)
                    if hit is None:
                        raise NonAdditiveError(f"term {poly} d{k} is not additive in tau")
                    i, s = hit
                    f = ResidueForm(base, j, {dx: xpart})
                    add(names[i], HomValue(f, zero_a) if s == 0 else HomValue(zero_j, zero_a, ((s, f),)))
                elif len(dtau) == 1 and not any(texps):
                    # k is sorted with dtau last, so the term reads alpha ^ dtau_i
                    add(names[dtau[0]], HomValue(zero_j, ResidueForm(base, j - 1, {dx: xpart})))
                else:
                    raise NonAdditiveError(f"term {poly} d{k} is not additive in tau")
        return AdditiveElement("omega", j, tuple(sorted(acc.items())))
    if isinstance(gamma, FiberWitt):
        comps = gamma.components
        if any(comps[:-1]):
            raise NonAdditiveError("psi has nonzero components below V^{n-1}")
        last = comps[-1]
        wl = len(comps)
    elif isinstance(gamma, Poly):
        last = gamma
        wl = 1
    else:
        raise TypeError(f"unsupported fiber element {type(gamma).__name__}")
    acc = {}
    zero0 = ResidueForm.zero(base, 0)
    for exps, c in last.terms().items():
        hit = _tau_power(model, exps[m:])
        if hit is None:
            raise NonAdditiveError(f"monomial {exps} is not additive in tau")
        i, s = hit
        f = ResidueForm.function(Poly(base, {exps[:m]: c}))
        hv = HomValue(f, None) if s == 0 else HomValue(zero0, None, ((s, f),))
        name = names[i]
        acc[name] = acc[name] + hv if name in acc else hv
    return AdditiveElement(f"witt:{wl}", 0, tuple(sorted(acc.items())))


def chi(model: DilatationModel, elem: AdditiveElement) -> CharForm:
    if elem.family == "omega":
        return CharForm(model.n, dict(elem.parts))
    wl = int(elem.family.split(":")[1])
    return CharForm(model.n, dict(elem.parts), family="witt", witt_length=wl)


def oracle_charform(model: DilatationModel, a) -> CharForm:
    if model.n < 2:
        raise ValueError("characteristic forms live at level n >= 2")
    dl = delta(model, a)
    if not is_regular(model, dl):
        raise MembershipError(f"input is not bounded by {model.n}D")
    return chi(model, additive_decompose(model, psi_extract(model, dl)))
