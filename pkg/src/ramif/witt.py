"""p-typical Witt vectors with truncated Laurent series components.

Ring laws come from universal polynomials built over Z by the ghost
recursion; in characteristic p they are reduced mod p before evaluation.
"""

from __future__ import annotations

from functools import lru_cache

from .algebra import INF, Poly, Ring, TLaurent, is_prime
from .errors import CharacteristicError, MembershipError, WittExactnessError
from .forms import CharForm, DiffForm, FormSpace, HomValue, ResidueForm, pole_membership, substitute_series

MAX_UNIVERSAL_LENGTH = 4


@lru_cache(maxsize=None)
def universal_polynomials(p: int, n: int, op: str) -> tuple:
    """Components 0..n-1 of the universal law op in {add, sub, mul}.

    Each component is a tuple of (integer coefficient, exponent tuple) over
    the variables X_0..X_{n-1}, Y_0..Y_{n-1}.
    """
    if n > MAX_UNIVERSAL_LENGTH:
        raise ValueError(f"Witt length {n} exceeds {MAX_UNIVERSAL_LENGTH}")
    if op not in ("add", "sub", "mul"):
        raise ValueError(f"unknown Witt operation {op!r}")
    names = [f"X{i}" for i in range(n)] + [f"Y{i}" for i in range(n)]
    ring = Ring(0, names)
    X = [Poly.variable(ring, f"X{i}") for i in range(n)]
    Y = [Poly.variable(ring, f"Y{i}") for i in range(n)]

    def ghost(v, i):
        return sum((v[j] ** (p ** (i - j)) * p ** j for j in range(i + 1)), Poly.zero(ring))

    comps = []
    for i in range(n):
        gx, gy = ghost(X, i), ghost(Y, i)
        target = gx + gy if op == "add" else gx - gy if op == "sub" else gx * gy
        for j, u in enumerate(comps):
            target = target - u ** (p ** (i - j)) * p ** j
        q = p ** i
        terms = target.terms()
        for c in terms.values():
            if c % q:
                raise WittExactnessError(f"ghost recursion not divisible by {q} (p={p}, i={i}, op={op})")
        comps.append(Poly(ring, {e: c // q for e, c in terms.items()}))
    return tuple(tuple((c, e) for e, c in u.terms().items()) for u in comps)


def _evaluate(poly_terms, args, p):
    ring = args[0].ring
    prec = min(a.prec for a in args)
    cache: dict = {}

    def power(i, e):
        key = (i, e)
        if key not in cache:
            cache[key] = args[i] ** e
        return cache[key]

    acc = None
    for c, exps in poly_terms:
        if p:
            c %= p
            if not c:
                continue
        term = None
        for i, e in enumerate(exps):
            if e:
                f = power(i, e)
                term = f if term is None else term * f
        if term is None:
            term = TLaurent(ring, {0: c}, prec)
        elif c != 1:
            term = term * c
        acc = term if acc is None else acc + term
    return TLaurent.zero(ring, prec) if acc is None else acc


class WittVector:
    """(a_0, ..., a_{n-1}) = sum_i V^i [a_i]; immutable."""

    __slots__ = ("p", "components")

    def __init__(self, p: int, components):
        if not is_prime(p):
            raise CharacteristicError(f"Witt prime must be prime, got {p}")
        comps = tuple(components)
        if not comps:
            raise ValueError("Witt vectors need length >= 1")
        ring = comps[0].ring
        for c in comps:
            if not isinstance(c, TLaurent):
                raise TypeError("components must be TLaurent")
            if c.ring != ring:
                raise ValueError("components must share a coefficient ring")
        if ring.char not in (0, p):
            raise CharacteristicError(f"components over char {ring.char} but Witt prime {p}")
        self.p = p
        self.components = comps

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def ring(self) -> Ring:
        return self.components[0].ring

    @property
    def prec(self) -> int:
        return min(c.prec for c in self.components)

    @classmethod
    def zero(cls, p, n, ring, prec):
        return cls(p, [TLaurent.zero(ring, prec)] * n)

    @classmethod
    def teichmuller(cls, x: TLaurent, n: int, p: int):
        return cls(p, [x] + [TLaurent.zero(x.ring, x.prec)] * (n - 1))

    def _check(self, other):
        if not isinstance(other, WittVector):
            raise TypeError("expected a Witt vector")
        if other.p != self.p or other.n != self.n:
            raise ValueError(f"Witt mismatch: (p={self.p}, n={self.n}) vs (p={other.p}, n={other.n})")
        if other.ring != self.ring:
            raise ValueError("Witt vectors over different rings")

    def _law(self, other, op):
        self._check(other)
        n, p = self.n, self.p
        laws = universal_polynomials(p, n, op)
        args = list(self.components) + list(other.components)
        char = self.ring.char
        return WittVector(p, [_evaluate(laws[i], args, char) for i in range(n)])

    def __add__(self, other):
        return self._law(other, "add")

    def __sub__(self, other):
        return self._law(other, "sub")

    def __mul__(self, other):
        return self._law(other, "mul")

    def __neg__(self):
        return WittVector.zero(self.p, self.n, self.ring, self.prec) - self

    def times(self, k: int) -> "WittVector":
        """k-fold sum (k >= 0)."""
        acc = WittVector.zero(self.p, self.n, self.ring, self.prec)
        for _ in range(k):
            acc = acc + self
        return acc

    def verschiebung(self, k: int = 1) -> "WittVector":
        z = TLaurent.zero(self.ring, self.prec)
        k = min(k, self.n)
        return WittVector(self.p, [z] * k + list(self.components[: self.n - k]))

    def frobenius(self, j: int = 1) -> "WittVector":
        if self.ring.char != self.p:
            raise CharacteristicError("componentwise Frobenius needs characteristic p components")
        return WittVector(self.p, [c.frobenius_power(j) for c in self.components])

    def ghost(self) -> list:
        if self.ring.char != 0:
            raise CharacteristicError("ghost components need a characteristic 0 context")
        p = self.p
        out = []
        for i in range(self.n):
            acc = None
            for j in range(i + 1):
                term = self.components[j] ** (p ** (i - j)) * (p ** j)
                acc = term if acc is None else acc + term
            out.append(acc)
        return out

    def map_components(self, fn) -> "WittVector":
        return WittVector(self.p, [fn(c) for c in self.components])

    def truncate(self, prec):
        return self.map_components(lambda c: c.truncate(prec))

    def valuations(self) -> list:
        return [c.valuation() for c in self.components]

    def pole_bound(self) -> int:
        return max(c.pole_bound() for c in self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def is_integral(self) -> bool:
        return all(c.valuation() >= 0 for c in self.components)

    def agrees_with(self, other) -> bool:
        return self.n == other.n and all(a.agrees_with(b) for a, b in zip(self.components, other.components))

    def __eq__(self, other):
        if not isinstance(other, WittVector):
            return NotImplemented
        return self.p == other.p and self.components == other.components

    def __hash__(self):
        return hash((self.p, self.components))

    def __repr__(self):
        return f"WittVector(p={self.p}, {self})"

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.components) + ")"


class FDecomposedWitt:
    """sum_j F^j(beta_j), kept as the presented decomposition."""

    __slots__ = ("parts",)

    def __init__(self, parts: dict):
        parts = {int(j): b for j, b in parts.items()}
        if not parts:
            raise ValueError("empty decomposition")
        ref = next(iter(parts.values()))
        for j, b in parts.items():
            if j < 0:
                raise ValueError("Frobenius exponents are >= 0")
            if b.p != ref.p or b.n != ref.n or b.ring != ref.ring:
                raise ValueError("decomposition parts must share p, length and ring")
        self.parts = dict(sorted(parts.items()))

    @property
    def p(self):
        return next(iter(self.parts.values())).p

    @property
    def n(self):
        return next(iter(self.parts.values())).n

    @property
    def ring(self):
        return next(iter(self.parts.values())).ring

    def recombine(self) -> WittVector:
        acc = None
        for j, b in self.parts.items():
            f = b.frobenius(j) if j else b
            acc = f if acc is None else acc + f
        return acc

    def __eq__(self, other):
        return isinstance(other, FDecomposedWitt) and self.parts == other.parts

    def __repr__(self):
        return "FDecomposedWitt(" + ", ".join(f"F^{j}{b}" for j, b in self.parts.items()) + ")"


# -- filtrations -------------------------------------------------------------------

def ord_p(r: int, p: int):
    if r == 0:
        return INF
    k = 0
    while r % p == 0:
        r //= p
        k += 1
    return k


def matsuda_member(a: WittVector, r: int) -> bool:
    if r < 0:
        raise ValueError("r must be >= 0")
    n, p = a.n, a.p
    m = min(n, ord_p(r, p))
    special = n - 1 - m
    for i, c in enumerate(a.components):
        v = c.valuation()
        if v == INF:
            continue
        bound = -r + 1 if i == special else -r
        if p ** (n - 1 - i) * v < bound:
            return False
    return True


def bk_log_member(a: WittVector, r: int) -> bool:
    if r < 0:
        raise ValueError("r must be >= 0")
    n, p = a.n, a.p
    return all(c.valuation() == INF or p ** (n - 1 - i) * c.valuation() >= -r
               for i, c in enumerate(a.components))


def _search(pred, a: WittVector) -> int:
    top = a.p ** (a.n - 1) * a.pole_bound() + 1
    for r in range(top + 1):
        if pred(a, r):
            return r
    raise AssertionError("conductor search did not terminate")


def matsuda_conductor(a: WittVector) -> int:
    return _search(matsuda_member, a)


def bk_conductor(a: WittVector) -> int:
    return _search(bk_log_member, a)


def fsat_member(a: WittVector, r: int, precision: int | None = None) -> bool:
    """Membership in sum_j F^j(fil_r), decided by the dilatation oracle."""
    if r == 0:
        return a.is_integral()
    from .dilatation import as_member, build_model
    model = build_model(a.p, a.ring.nvars + 1, r, a.pole_bound(), witt_length=a.n, precision=precision,
                        names=a.ring.variables)
    return as_member(model, a)


def fsat_conductor(a: WittVector, precision: int | None = None) -> int:
    top = matsuda_conductor(a)
    for r in range(top):
        if fsat_member(a, r, precision):
            return r
    return top


def decomposed_fsat_bound(x: FDecomposedWitt) -> int:
    return max(matsuda_conductor(b) for b in x.parts.values())


# -- differentials and characteristic forms -----------------------------------------

def Fd(a: WittVector) -> DiffForm:
    """F^{n-1} d(a) = sum_i a_i^{p^{n-1-i} - 1} da_i."""
    if a.ring.char != a.p:
        raise CharacteristicError("F^{n-1}d needs characteristic p components")
    space = FormSpace(a.ring)
    acc = DiffForm(space, 1)
    n, p = a.n, a.p
    for i, c in enumerate(a.components):
        if not c:
            continue
        da = DiffForm.function(space, c).d()
        e = p ** (n - 1 - i) - 1
        acc = acc + (da.scale(c ** e) if e else da)
    return acc


def _function(poly: Poly) -> ResidueForm:
    return ResidueForm.function(poly)


def charform_witt(x: FDecomposedWitt, r: int) -> CharForm:
    if r < 2:
        raise ValueError("characteristic forms live at level r >= 2")
    p, n = x.p, x.n
    ring = x.ring
    acc: dict = {}

    def add(name, s, poly):
        if not poly:
            return
        part = HomValue(_function(poly), None) if s == 0 else \
            HomValue(ResidueForm.zero(ring, 0), None, ((s, _function(poly)),))
        acc[name] = acc[name] + part if name in acc else part

    for j, b in x.parts.items():
        if not matsuda_member(b, r):
            raise MembershipError(f"decomposition part F^{j} is not in fil_{r}")
        omega = Fd(b)
        if not pole_membership(omega, r, "plain"):
            raise AssertionError("F^{n-1}d left the expected pole bound")
        sp = omega.space
        for k, c in omega.terms.items():
            add(sp.coords[k[0]], j, c.coefficient(-r).frobenius_power(j) if j else c.coefficient(-r))
        if p == 2 and r == 2:
            last = b.components[-1]
            if last.valuation() < -2:
                raise MembershipError("t^2 a_{n-1} must be regular")
            alpha = last.coefficient(-2)
            add("t", j + 1, alpha.frobenius_power(j) if j else alpha)
    return CharForm(r, acc, family="witt", witt_length=n)


def charform_h1(cf: CharForm) -> CharForm:
    """Forget V^{n-1} and send every F^s to 1."""
    out = {}
    for name, h in cf.entries.items():
        total = h.plain
        for _, f in h.frob:
            total = total + f
        out[name] = HomValue(total, None)
    return CharForm(cf.level, out, family="h1", witt_length=cf.witt_length)


def restrict_to_curve_witt(a: WittVector, phi: dict) -> WittVector:
    target = Ring(a.ring.char, ())
    for v in a.ring.variables:
        if v not in phi:
            raise ValueError(f"no image for {v}")
        if phi[v].valuation() < 1:
            raise ValueError("curve must pass through the origin (valuation >= 1)")
    return a.map_components(lambda c: substitute_series(c, phi, target))
