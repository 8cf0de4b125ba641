"""Differential forms on the local model k[x_1..x_{d-1}]((t)) and their residues on D = {t = 0}.

A form of degree j is stored as {K: coefficient} where K is a sorted tuple
of basis indices.  The basis of a FormSpace is dt followed by d(v) for each
coordinate variable v; ring variables without a basis entry (the auxiliary
unit used by the dilatation model) cannot be differentiated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import INF, Poly, Ring, TLaurent
from .errors import MembershipError

S_MAX = 4


def merge_indices(k1: tuple, k2: tuple):
    """Sign and sorted union of two sorted index tuples; (0, None) on overlap."""
    if set(k1) & set(k2):
        return 0, None
    inv = sum(1 for a in k1 for b in k2 if a > b)
    return (-1) ** inv, tuple(sorted(k1 + k2))


def default_names(dim: int) -> tuple:
    return tuple(f"x{i}" for i in range(1, dim))


class FormSpace:
    """Ordered 1-form basis dt, d(coords...) over a coefficient ring."""

    __slots__ = ("ring", "coords", "basis", "_pos")

    def __init__(self, ring: Ring, coords=None):
        self.ring = ring
        coords = tuple(ring.variables if coords is None else coords)
        for c in coords:
            ring.index(c)
        self.coords = ("t",) + coords
        self.basis = tuple("d" + c for c in self.coords)
        self._pos = {c: i for i, c in enumerate(self.coords)}

    @classmethod
    def base(cls, char: int, dim: int, names=None):
        names = default_names(dim) if names is None else tuple(names)
        if len(names) != dim - 1:
            raise ValueError(f"dimension {dim} needs {dim - 1} divisor variables")
        return cls(Ring(char, names))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def position(self, coord: str) -> int:
        return self._pos[coord]

    def residue_ring(self) -> Ring:
        return self.ring

    def __eq__(self, other):
        return isinstance(other, FormSpace) and self.ring == other.ring and self.coords == other.coords

    def __hash__(self):
        return hash((self.ring, self.coords))

    def __repr__(self):
        return f"FormSpace({self.ring.char}, {list(self.basis)})"


class DiffForm:
    """Homogeneous form of degree j with TLaurent coefficients."""

    __slots__ = ("space", "degree", "terms")

    def __init__(self, space: FormSpace, degree: int, terms=None):
        self.space = space
        self.degree = degree
        out = {}
        for k, c in (terms or {}).items():
            k = tuple(k)
            if len(k) != degree or list(k) != sorted(set(k)):
                raise ValueError(f"bad basis subset {k} for degree {degree}")
            if any(i < 0 or i >= space.dim for i in k):
                raise ValueError(f"basis index out of range in {k}")
            if not isinstance(c, TLaurent):
                raise TypeError("coefficients must be TLaurent")
            if c.ring != space.ring:
                raise ValueError("coefficient ring does not match the form space")
            if c:
                out[k] = c
        self.terms = out

    @classmethod
    def function(cls, space, f: TLaurent):
        return cls(space, 0, {(): f})

    @classmethod
    def basis_form(cls, space, coord: str, prec: int = 64):
        one = TLaurent(space.ring, {0: 1}, prec)
        return cls(space, 1, {(space.position(coord),): one})

    @classmethod
    def from_named(cls, space, degree, named: dict):
        """Build from {("dt", "dx1"): series} with any basis order."""
        acc = cls(space, degree)
        for names, c in named.items():
            idx = [space.basis.index(n) for n in names]
            if len(set(idx)) != len(idx):
                continue
            inv = sum(1 for a in range(len(idx)) for b in range(a + 1, len(idx)) if idx[a] > idx[b])
            acc = acc + cls(space, degree, {tuple(sorted(idx)): c if inv % 2 == 0 else -c})
        return acc

    def _check(self, other):
        if not isinstance(other, DiffForm) or other.space != self.space:
            raise ValueError("forms live in different spaces")
        if other.degree != self.degree:
            raise ValueError(f"degree mismatch {self.degree} vs {other.degree}")

    def _clean(self, terms):
        obj = DiffForm.__new__(DiffForm)
        obj.space = self.space
        obj.degree = self.degree
        obj.terms = {k: c for k, c in terms.items() if c}
        return obj

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return self._clean(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self._clean({k: -c for k, c in self.terms.items()})

    def scale(self, f) -> "DiffForm":
        """Multiply by a function (TLaurent) or scalar."""
        return self._clean({k: c * f for k, c in self.terms.items()})

    def wedge(self, other: "DiffForm") -> "DiffForm":
        if other.space != self.space:
            raise ValueError("forms live in different spaces")
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                sign, k = merge_indices(k1, k2)
                if not sign:
                    continue
                prod = c1 * c2
                if sign < 0:
                    prod = -prod
                out[k] = out[k] + prod if k in out else prod
        res = DiffForm.__new__(DiffForm)
        res.space = self.space
        res.degree = self.degree + other.degree
        res.terms = {k: c for k, c in out.items() if c}
        return res

    def d(self) -> "DiffForm":
        sp = self.space
        out: dict = {}
        for k, c in self.terms.items():
            parts = [(0, c.derivative_t())]
            for i, v in enumerate(sp.coords[1:], start=1):
                parts.append((i, c.partial(v)))
            for i, dc in parts:
                if not dc:
                    continue
                sign, kk = merge_indices((i,), k)
                if not sign:
                    continue
                dc = dc if sign > 0 else -dc
                out[kk] = out[kk] + dc if kk in out else dc
        for v in sp.ring.variables:
            if v not in sp.coords and any(c.partial(v) for c in self.terms.values()):
                raise ValueError(f"variable {v} has no differential in this space")
        res = DiffForm.__new__(DiffForm)
        res.space = sp
        res.degree = self.degree + 1
        res.terms = {k: c for k, c in out.items() if c}
        return res

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def valuation(self):
        return min((c.valuation() for c in self.terms.values()), default=INF)

    def pole_bound(self) -> int:
        v = self.valuation()
        return 0 if v == INF or v >= 0 else -v

    @property
    def prec(self):
        return min((c.prec for c in self.terms.values()), default=INF)

    def coefficient(self, names) -> TLaurent:
        k = tuple(sorted(self.space.basis.index(n) for n in names))
        return self.terms.get(k, TLaurent.zero(self.space.ring, 0))

    def truncate(self, prec):
        return self._clean({k: c.truncate(prec) for k, c in self.terms.items()})

    def agrees_with(self, other) -> bool:
        if other.space != self.space or other.degree != self.degree:
            return False
        keys = set(self.terms) | set(other.terms)
        zero = TLaurent.zero(self.space.ring, 1 << 30)
        return all(self.terms.get(k, zero).agrees_with(other.terms.get(k, zero)) for k in keys)

    def __eq__(self, other):
        if not isinstance(other, DiffForm):
            return NotImplemented
        return self.space == other.space and self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.space, self.degree, frozenset(self.terms.items())))

    def __repr__(self):
        return f"DiffForm({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for k, c in sorted(self.terms.items()):
            b = "^".join(self.space.basis[i] for i in k)
            out.append(f"({c})" + (f" {b}" if b else ""))
        return " + ".join(out)


class ResidueForm:
    """Form with Poly coefficients on a t-free, dt-free basis.

    On D the basis is dx_1..dx_{d-1}; the dilatation fiber uses the larger
    basis dx_i, dtau, dtau_i.  Basis entries are d(v) for listed coordinates.
    """

    __slots__ = ("ring", "coords", "degree", "terms")

    def __init__(self, ring: Ring, degree: int, terms=None, coords=None):
        self.ring = ring
        self.coords = tuple(ring.variables if coords is None else coords)
        self.degree = degree
        out = {}
        for k, c in (terms or {}).items():
            k = tuple(k)
            if len(k) != degree or list(k) != sorted(set(k)):
                raise ValueError(f"bad basis subset {k} for degree {degree}")
            if not isinstance(c, Poly):
                c = Poly.constant(ring, c)
            if c.ring != ring:
                raise ValueError("coefficient ring mismatch")
            if c:
                out[k] = out[k] + c if k in out else c
        self.terms = {k: c for k, c in out.items() if c}

    @classmethod
    def zero(cls, ring, degree, coords=None):
        return cls(ring, degree, {}, coords)

    @classmethod
    def function(cls, f: Poly, coords=None):
        return cls(f.ring, 0, {(): f}, coords)

    @property
    def basis(self):
        return tuple("d" + c for c in self.coords)

    def _new(self, degree, terms):
        obj = ResidueForm.__new__(ResidueForm)
        obj.ring = self.ring
        obj.coords = self.coords
        obj.degree = degree
        obj.terms = {k: c for k, c in terms.items() if c}
        return obj

    def _check(self, other):
        if not isinstance(other, ResidueForm) or other.ring != self.ring or other.coords != self.coords:
            raise ValueError("residue forms on different bases")
        if other.degree != self.degree:
            raise ValueError(f"degree mismatch {self.degree} vs {other.degree}")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return self._new(self.degree, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self._new(self.degree, {k: -c for k, c in self.terms.items()})

    def scale(self, f) -> "ResidueForm":
        return self._new(self.degree, {k: c * f for k, c in self.terms.items()})

    def wedge(self, other) -> "ResidueForm":
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                sign, k = merge_indices(k1, k2)
                if sign:
                    prod = c1 * c2 * sign
                    out[k] = out[k] + prod if k in out else prod
        return self._new(self.degree + other.degree, out)

    def d(self) -> "ResidueForm":
        out: dict = {}
        for k, c in self.terms.items():
            for i, v in enumerate(self.coords):
                dc = c.partial(v)
                if not dc:
                    continue
                sign, kk = merge_indices((i,), k)
                if sign:
                    dc = dc * sign
                    out[kk] = out[kk] + dc if kk in out else dc
        return self._new(self.degree + 1, out)

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, ResidueForm):
            return NotImplemented
        return (self.ring == other.ring and self.coords == other.coords
                and self.degree == other.degree and self.terms == other.terms)

    def __hash__(self):
        return hash((self.ring, self.coords, self.degree, frozenset(self.terms.items())))

    def __repr__(self):
        return f"ResidueForm({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for k, c in sorted(self.terms.items()):
            b = "^".join("d" + self.coords[i] for i in k)
            cs = str(c)
            if not b:
                out.append(cs)
            elif cs == "1":
                out.append(b)
            else:
                out.append(f"({cs}) {b}")
        return " + ".join(out)


@dataclass(frozen=True)
class HomValue:
    """plain + (dpart . d) + sum_s frob[s] . Frob^s, kept as a formal sum.

    For Witt vectors the parts are functions (degree 0) read as V^{n-1} c F^s,
    with plain the s = 0 summand and dpart unused.
    """

    plain: ResidueForm
    dpart: ResidueForm | None = None
    frob: tuple = field(default_factory=tuple)  # sorted ((s, ResidueForm), ...)

    def __post_init__(self):
        frob = tuple(sorted((s, f) for s, f in dict(self.frob).items() if f))
        object.__setattr__(self, "frob", frob)

    def frob_dict(self) -> dict:
        return dict(self.frob)

    def is_zero(self) -> bool:
        return not self.plain and not self.dpart and not self.frob

    def __add__(self, other: "HomValue") -> "HomValue":
        frob = self.frob_dict()
        for s, f in other.frob:
            frob[s] = frob[s] + f if s in frob else f
        if self.dpart is None:
            dpart = other.dpart
        elif other.dpart is None:
            dpart = self.dpart
        else:
            dpart = self.dpart + other.dpart
        return HomValue(self.plain + other.plain, dpart, tuple(frob.items()))

    def __str__(self):
        parts = []
        if self.plain:
            parts.append(f"[{self.plain}]")
        if self.dpart:
            parts.append(f"([{self.dpart}]*d)")
        for s, f in self.frob:
            parts.append(f"([{f}]*Frob^{s})")
        return " + ".join(parts) or "0"


class CharForm:
    """sum_i (dz_i / t^level)|_D (x) entries[i], over i in {t, x_1, ...}."""

    __slots__ = ("level", "entries", "family", "witt_length")

    def __init__(self, level: int, entries: dict, family: str = "omega", witt_length: int | None = None):
        self.level = level
        self.family = family
        self.witt_length = witt_length
        self.entries = {i: h for i, h in entries.items() if not h.is_zero()}

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, CharForm):
            return NotImplemented
        return (self.level == other.level and self.family == other.family
                and self.witt_length == other.witt_length and self.entries == other.entries)

    def __hash__(self):
        return hash((self.level, self.family, frozenset(self.entries.items())))

    def __repr__(self):
        return f"CharForm({self})"

    def __str__(self):
        if not self.entries:
            return "0"
        return " + ".join(f"d{i}/t^{self.level} (x) {h}" for i, h in sorted(self.entries.items()))


# -- filtrations ---------------------------------------------------------------

def pole_membership(omega: DiffForm, n: int, mode: str = "plain") -> bool:
    if n < 0:
        raise ValueError("level must be >= 0")
    if mode == "plain":
        return all(c.valuation() >= -n for c in omega.terms.values())
    if mode != "log":
        raise ValueError(f"unknown mode {mode!r}")
    # omega = eta ^ dt/t + rho: a dt-term c dt^dx_K contributes eta = +-t c dx_K
    for k, c in omega.terms.items():
        bound = -n if 0 in k else -(n - 1)
        if c.valuation() < bound:
            return False
    return True


def omega_fas_member(omega: DiffForm, n: int, p: int) -> bool:
    if n == 0:
        return pole_membership(omega, 0, "plain")
    if p > 0 and n % p == 0:
        return pole_membership(omega, n, "plain")
    return pole_membership(omega, n, "log")


def omega_conductor(omega: DiffForm, p: int) -> int:
    n = 0
    top = omega.pole_bound() + 1
    while n <= top:
        if omega_fas_member(omega, n, p):
            return n
        n += 1
    raise AssertionError("conductor search did not terminate")


# -- Koszul contraction, xi and the closed-form characteristic form ---------------

def _residue_coords(space: FormSpace) -> tuple:
    return space.coords[1:]


def koszul_partial(omega: DiffForm, n: int) -> list:
    """[(coordinate name, ResidueForm of degree j-1)], zero entries dropped."""
    if not pole_membership(omega, n, "plain"):
        raise MembershipError(f"form is not in Omega^j({n}D)")
    sp = omega.space
    ring = sp.ring
    coords = _residue_coords(sp)
    j = omega.degree
    acc: dict = {}
    for k, c in omega.terms.items():
        fbar = c.coefficient(-n)
        if not fbar:
            continue
        for s, i in enumerate(k):
            rest = k[:s] + k[s + 1:]
            if 0 in rest:
                continue
            rk = tuple(r - 1 for r in rest)
            term = ResidueForm(ring, j - 1, {rk: fbar * (-1) ** s}, coords)
            name = sp.coords[i]
            acc[name] = acc[name] + term if name in acc else term
    order = {c: i for i, c in enumerate(sp.coords)}
    return [(i, f) for i, f in sorted(acc.items(), key=lambda kv: order[kv[0]]) if f]


def xi(beta: ResidueForm, alpha: ResidueForm, j: int | None = None) -> HomValue:
    j = beta.degree if j is None else j
    if beta.degree != j or alpha.degree != j - 1:
        raise ValueError(f"xi needs degrees ({j}, {j - 1}), got ({beta.degree}, {alpha.degree})")
    sign = 1 if (j - 1) % 2 == 0 else -1
    return HomValue(beta + alpha.d(), alpha if sign > 0 else -alpha)


def charform_omega(omega: DiffForm, n: int, p: int) -> CharForm:
    if n < 2:
        raise ValueError("characteristic forms live at level n >= 2")
    if not omega_fas_member(omega, n, p):
        raise MembershipError(f"form is not in the level-{n} filtration (p={p})")
    sp = omega.space
    ring = sp.ring
    coords = _residue_coords(sp)
    j = omega.degree
    betas = dict(koszul_partial(omega.d(), n))
    alphas = dict(koszul_partial(omega, n))
    entries = {}
    for name in sp.coords:
        beta = betas.get(name, ResidueForm.zero(ring, j, coords))
        alpha = alphas.get(name, ResidueForm.zero(ring, j - 1, coords))
        entries[name] = xi(beta, alpha, j)
    if n == 2 and p == 2:
        if not pole_membership(omega, 2, "plain"):
            raise MembershipError("t^2 * omega must be regular")
        res = {}
        for k, c in omega.terms.items():
            if 0 in k:
                continue
            res[tuple(i - 1 for i in k)] = c.coefficient(-2)
        extra = HomValue(ResidueForm.zero(ring, j, coords), ResidueForm.zero(ring, j - 1, coords),
                         ((1, ResidueForm(ring, j, res, coords)),))
        entries["t"] = entries["t"] + extra
    return CharForm(n, entries)


def diagonal_decomposition(beta: ResidueForm):
    """gamma_i (degree j-1) and delta_i (degree j) with q2*beta - q1*beta = sum gamma_i dtheta_i + theta_i delta_i mod J^2."""
    j = beta.degree
    gam = {v: ResidueForm.zero(beta.ring, j - 1, beta.coords) for v in beta.coords}
    dlt = {v: ResidueForm.zero(beta.ring, j, beta.coords) for v in beta.coords}
    for k, f in beta.terms.items():
        for s, i in enumerate(k, start=1):
            rest = k[:s - 1] + k[s:]
            sign = (-1) ** (j - s)
            gam[beta.coords[i]] = gam[beta.coords[i]] + ResidueForm(beta.ring, j - 1, {rest: f * sign}, beta.coords)
        for v in beta.coords:
            df = f.partial(v)
            if df:
                dlt[v] = dlt[v] + ResidueForm(beta.ring, j, {k: df}, beta.coords)
    return gam, dlt


# -- curves ----------------------------------------------------------------------

def curve_space(char: int) -> FormSpace:
    return FormSpace(Ring(char, ()))


def substitute_series(f: TLaurent, images: dict, target: Ring) -> TLaurent:
    """Replace each coordinate variable v by images[v] (series over target); t stays."""
    ring = f.ring
    names = ring.variables
    cache: dict = {}

    def power(v, e):
        key = (v, e)
        if key not in cache:
            cache[key] = images[v] ** e
        return cache[key]

    total = None
    for e, coeff in f.items():
        exact = f.prec - e
        acc = TLaurent.zero(target, exact)
        for exps, c in coeff.terms().items():
            term = TLaurent(target, {0: c}, exact)
            for v, a in zip(names, exps):
                if a:
                    term = term * power(v, a)
            acc = acc + term
        acc = acc.shift(e)
        total = acc if total is None else total + acc
    if total is None:
        return TLaurent.zero(target, f.prec)
    return total.truncate(f.prec)


def restrict_to_curve(omega: DiffForm, phi: dict) -> DiffForm:
    """Pull back along x_i = phi_i(t); the result lives on k((t)) with basis dt."""
    sp = omega.space
    target = Ring(sp.ring.char, ())
    out_space = FormSpace(target)
    images = {}
    for v in sp.coords[1:]:
        if v not in phi:
            raise ValueError(f"no image for {v}")
        s = phi[v]
        if s.ring != target:
            raise ValueError("curve parametrization must have constant coefficients")
        if s.valuation() < 1:
            raise ValueError("curve must pass through the origin (valuation >= 1)")
        images[v] = s
    dimages = {0: None}
    for i, v in enumerate(sp.coords[1:], start=1):
        dimages[i] = images[v].derivative_t()
    acc = DiffForm(out_space, omega.degree)
    for k, c in omega.terms.items():
        if len(k) > 1:
            continue  # only dt survives on a curve
        g = substitute_series(c, images, target)
        if k == ():
            acc = acc + DiffForm(out_space, 0, {(): g})
            continue
        i = k[0]
        coeff = g if i == 0 else g * dimages[i]
        acc = acc + DiffForm(out_space, 1, {(0,): coeff})
    return acc
