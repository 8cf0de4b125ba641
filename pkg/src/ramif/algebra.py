"""Exact sparse polynomials over F_p or Q and truncated Laurent series in t.

Monomials are stored as packed integers: exponent i lives in bits
[32*i, 32*i + 32).  Adding two keys multiplies the monomials, which keeps
the inner multiplication loop down to one integer addition per pair.
Series keys carry the (biased) t-exponent in the top field.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import CharacteristicError, NotAUnitError, PrecisionError

INF = math.inf

_SHIFT = 32
_MASK = (1 << _SHIFT) - 1
_TBIAS = 1 << 30


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _pack(exps) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e < 0 or e > _MASK:
            raise ValueError(f"exponent out of range: {e}")
        key |= e << (_SHIFT * i)
    return key


def _unpack(key: int, m: int) -> tuple:
    return tuple((key >> (_SHIFT * i)) & _MASK for i in range(m))


def _normalize(d: dict, p: int) -> dict:
    if p:
        return {k: c % p for k, c in d.items() if c % p}
    return {k: c for k, c in d.items() if c}


def _mul_dicts(a: dict, b: dict, p: int, offset: int = 0, limit=None) -> dict:
    """Sparse convolution; keys >= limit are dropped (after removing offset)."""
    if len(a) > len(b):
        a, b = b, a
    out: dict = {}
    get = out.get
    if limit is None:
        for ka, ca in a.items():
            for kb, cb in b.items():
                k = ka + kb - offset
                out[k] = get(k, 0) + ca * cb
    else:
        bl = sorted(b.items())
        for ka, ca in a.items():
            bound = limit - ka + offset
            for kb, cb in bl:
                if kb >= bound:
                    break
                k = ka + kb - offset
                out[k] = get(k, 0) + ca * cb
    return _normalize(out, p)


def _add_dicts(a: dict, b: dict, p: int, sign: int = 1) -> dict:
    out = dict(a)
    for k, c in b.items():
        out[k] = out.get(k, 0) + sign * c
    return _normalize(out, p)


class Ring:
    """Coefficient ring k[x_1..x_m] with k = F_p or Q (char 0)."""

    __slots__ = ("char", "variables", "_hash")

    def __init__(self, char: int, variables=()):
        char = int(char)
        if char != 0 and not is_prime(char):
            raise CharacteristicError(f"characteristic must be 0 or prime, got {char}")
        variables = tuple(variables)
        if len(set(variables)) != len(variables) or "t" in variables:
            raise ValueError(f"bad variable list {variables}")
        self.char = char
        self.variables = variables
        self._hash = hash((char, variables))

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def index(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise ValueError(f"unknown variable {var!r}") from None

    def coef(self, c):
        """Normalize a scalar into the coefficient field."""
        p = self.char
        if isinstance(c, bool):
            c = int(c)
        if p:
            if isinstance(c, Fraction):
                if c.denominator % p == 0:
                    raise ZeroDivisionError(f"denominator divisible by {p}")
                return c.numerator * pow(c.denominator, -1, p) % p
            return int(c) % p
        if isinstance(c, Fraction):
            return c.numerator if c.denominator == 1 else c
        if isinstance(c, int):
            return c
        raise TypeError(f"unsupported coefficient {c!r}")

    def inv(self, c):
        if not c:
            raise ZeroDivisionError("inverse of zero")
        if self.char:
            return pow(c, -1, self.char)
        return Fraction(1) / c if isinstance(c, int) else 1 / c

    def __eq__(self, other):
        return isinstance(other, Ring) and self.char == other.char and self.variables == other.variables

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Ring({self.char}, {list(self.variables)})"


def _fmt_coef(c) -> str:
    return str(c)


def _fmt_monomial(names, exps) -> str:
    parts = []
    for n, e in zip(names, exps):
        if e == 1:
            parts.append(n)
        elif e:
            parts.append(f"{n}^{e}")
    return "*".join(parts)


class Poly:
    """Sparse polynomial; immutable."""

    __slots__ = ("ring", "_d")

    def __init__(self, ring: Ring, terms=None):
        self.ring = ring
        d = {}
        m = ring.nvars
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != m:
                raise ValueError(f"exponent vector {exps} does not match {ring.variables}")
            k = _pack(exps)
            d[k] = d.get(k, 0) + ring.coef(c)
        self._d = _normalize(d, ring.char)

    @classmethod
    def _raw(cls, ring, d):
        obj = cls.__new__(cls)
        obj.ring = ring
        obj._d = d
        return obj

    @classmethod
    def zero(cls, ring):
        return cls._raw(ring, {})

    @classmethod
    def constant(cls, ring, c):
        c = ring.coef(c)
        return cls._raw(ring, {0: c} if c else {})

    @classmethod
    def variable(cls, ring, name, power=1):
        i = ring.index(name)
        return cls._raw(ring, {power << (_SHIFT * i): 1})

    @classmethod
    def monomial(cls, ring, exps, c=1):
        return cls(ring, {tuple(exps): c})

    def terms(self) -> dict:
        m = self.ring.nvars
        return {_unpack(k, m): c for k, c in sorted(self._d.items())}

    def is_zero(self) -> bool:
        return not self._d

    def __bool__(self):
        return bool(self._d)

    def is_constant(self) -> bool:
        return not self._d or (len(self._d) == 1 and 0 in self._d)

    def constant_term(self):
        return self._d.get(0, 0)

    def __len__(self):
        return len(self._d)

    def _lift(self, other):
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        return Poly.constant(self.ring, other)

    def __add__(self, other):
        other = self._lift(other)
        return Poly._raw(self.ring, _add_dicts(self._d, other._d, self.ring.char))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        return Poly._raw(self.ring, _add_dicts(self._d, other._d, self.ring.char, -1))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return Poly._raw(self.ring, _normalize({k: -c for k, c in self._d.items()}, self.ring.char))

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = self.ring.coef(other)
            return Poly._raw(self.ring, _normalize({k: v * c for k, v in self._d.items()}, self.ring.char))
        other = self._lift(other)
        return Poly._raw(self.ring, _mul_dicts(self._d, other._d, self.ring.char))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.constant(self.ring, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self._d == other._d
        if isinstance(other, (int, Fraction)):
            return self == Poly.constant(self.ring, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self._d.items())))

    def degree(self, var=None) -> int:
        """Total degree, or degree in one variable; -1 for zero."""
        if not self._d:
            return -1
        m = self.ring.nvars
        if var is None:
            return max(sum(_unpack(k, m)) for k in self._d)
        i = self.ring.index(var)
        return max((k >> (_SHIFT * i)) & _MASK for k in self._d)

    def partial(self, var: str) -> "Poly":
        i = self.ring.index(var)
        shift = _SHIFT * i
        one = 1 << shift
        out = {}
        for k, c in self._d.items():
            e = (k >> shift) & _MASK
            if e:
                out[k - one] = c * e
        return Poly._raw(self.ring, _normalize(out, self.ring.char))

    def frobenius_power(self, j: int = 1) -> "Poly":
        p = self.ring.char
        if not p:
            raise CharacteristicError("Frobenius needs positive characteristic")
        q = p ** j
        m = self.ring.nvars
        out = {}
        for k, c in self._d.items():
            out[_pack(tuple(e * q for e in _unpack(k, m)))] = c
        return Poly._raw(self.ring, out)

    def pth_root(self):
        """Unique p-th root if every exponent is divisible by p, else None."""
        p = self.ring.char
        if not p:
            raise CharacteristicError("p-th roots need positive characteristic")
        m = self.ring.nvars
        out = {}
        for k, c in self._d.items():
            exps = _unpack(k, m)
            if any(e % p for e in exps):
                return None
            out[_pack(tuple(e // p for e in exps))] = c
        return Poly._raw(self.ring, out)

    def embed(self, ring: Ring, mapping=None) -> "Poly":
        """Rename into a ring whose variables include ours (by name)."""
        m = self.ring.nvars
        pos = [ring.index(v) for v in self.ring.variables] if mapping is None else mapping
        out = {}
        for k, c in self._d.items():
            exps = _unpack(k, m)
            key = 0
            for i, e in zip(pos, exps):
                key |= e << (_SHIFT * i)
            out[key] = c
        return Poly._raw(ring, _normalize(out, ring.char) if ring.char != self.ring.char else out)

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self._d:
            return "0"
        names = self.ring.variables
        m = len(names)
        out = []
        for k, c in sorted(self._d.items(), reverse=True):
            mono = _fmt_monomial(names, _unpack(k, m))
            if not mono:
                out.append(_fmt_coef(c))
            elif c == 1:
                out.append(mono)
            else:
                out.append(f"{_fmt_coef(c)}*{mono}")
        return " + ".join(out)


class TLaurent:
    """Truncated Laurent series sum_e c_e(x) t^e + O(t^prec), prec >= 0.

    Exponents below 0 are always exact; ``prec`` marks where knowledge ends.
    """

    __slots__ = ("ring", "_d", "prec")

    def __init__(self, ring: Ring, terms=None, prec: int = 0):
        """``terms`` maps t-exponents to Poly (or scalars)."""
        if prec < 0:
            raise PrecisionError(f"precision {prec} would truncate the pole part")
        self.ring = ring
        self.prec = prec
        d = {}
        m = ring.nvars
        top = _SHIFT * m
        for e, c in (terms or {}).items():
            if e >= prec:
                continue
            if not isinstance(c, Poly):
                c = Poly.constant(ring, c)
            elif c.ring != ring:
                raise ValueError(f"ring mismatch: {c.ring} vs {ring}")
            base = (e + _TBIAS) << top
            for k, v in c._d.items():
                d[base | k] = v
        self._d = d

    @classmethod
    def _raw(cls, ring, d, prec):
        if prec < 0:
            raise PrecisionError(f"precision {prec} would truncate the pole part")
        obj = cls.__new__(cls)
        obj.ring = ring
        obj._d = d
        obj.prec = prec
        return obj

    @classmethod
    def zero(cls, ring, prec):
        return cls._raw(ring, {}, prec)

    @classmethod
    def monomial(cls, ring, t_exp: int, coef=1, prec: int | None = None):
        """c * t^e, exact up to ``prec`` (default: well past e)."""
        if prec is None:
            prec = max(t_exp + 1, 0) + 64
        return cls(ring, {t_exp: coef}, prec)

    @classmethod
    def from_poly(cls, poly: Poly, prec: int):
        return cls(poly.ring, {0: poly}, prec)

    # -- structure ----------------------------------------------------------
    def _tshift(self):
        return _SHIFT * self.ring.nvars

    def _texp(self, key):
        return (key >> self._tshift()) - _TBIAS

    def _limit(self, prec):
        return (prec + _TBIAS) << self._tshift()

    def valuation(self):
        if not self._d:
            return INF
        return self._texp(min(self._d))

    def pole_bound(self) -> int:
        v = self.valuation()
        return 0 if v == INF or v >= 0 else -v

    def is_zero(self) -> bool:
        return not self._d

    def __bool__(self):
        return bool(self._d)

    def t_exponents(self) -> list:
        sh = self._tshift()
        return sorted({(k >> sh) - _TBIAS for k in self._d})

    def slices(self) -> dict:
        """t-exponent -> raw coefficient dict (unsorted, internal)."""
        sh = self._tshift()
        low = (1 << sh) - 1
        out: dict = {}
        for k, c in self._d.items():
            out.setdefault((k >> sh) - _TBIAS, {})[k & low] = c
        return out

    def coefficient(self, e: int) -> Poly:
        if e >= self.prec:
            raise PrecisionError(f"coefficient of t^{e} unknown (precision {self.prec})")
        sh = self._tshift()
        low = (1 << sh) - 1
        return Poly._raw(self.ring, {k & low: c for k, c in self._d.items() if (k >> sh) - _TBIAS == e})

    def items(self) -> list:
        return [(e, Poly._raw(self.ring, d)) for e, d in sorted(self.slices().items())]

    def truncate(self, prec: int) -> "TLaurent":
        """Forget everything from t^prec on (prec may only decrease)."""
        if prec >= self.prec:
            return self
        lim = self._limit(prec)
        return TLaurent._raw(self.ring, {k: c for k, c in self._d.items() if k < lim}, prec)

    def lift(self, prec: int) -> "TLaurent":
        """Declare the stored terms exact up to ``prec`` (used for polynomial inputs)."""
        if prec <= self.prec:
            return self.truncate(prec)
        return TLaurent._raw(self.ring, dict(self._d), prec)

    # -- arithmetic ---------------------------------------------------------
    def _lift_other(self, other):
        if isinstance(other, TLaurent):
            if other.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, Poly):
            return TLaurent.from_poly(other, self.prec) if other.ring == self.ring else self._bad(other)
        return TLaurent(self.ring, {0: other}, self.prec)

    def _bad(self, other):
        raise ValueError(f"ring mismatch: {other.ring} vs {self.ring}")

    def _addsub(self, other, sign):
        other = self._lift_other(other)
        prec = min(self.prec, other.prec)
        lim = self._limit(prec)
        d = _add_dicts(self._d, other._d, self.ring.char, sign)
        if prec < max(self.prec, other.prec):
            d = {k: c for k, c in d.items() if k < lim}
        return TLaurent._raw(self.ring, d, prec)

    def __add__(self, other):
        return self._addsub(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._addsub(other, -1)

    def __rsub__(self, other):
        return self._lift_other(other)._addsub(self, -1)

    def __neg__(self):
        return TLaurent._raw(self.ring, _normalize({k: -c for k, c in self._d.items()}, self.ring.char), self.prec)

    def _scale(self, c):
        c = self.ring.coef(c)
        return TLaurent._raw(self.ring, _normalize({k: v * c for k, v in self._d.items()}, self.ring.char), self.prec)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._scale(other)
        other = self._lift_other(other)
        va = self.valuation()
        vb = other.valuation()
        va = self.prec if va == INF else va
        vb = other.prec if vb == INF else vb
        prec = min(va + other.prec, vb + self.prec)
        if prec < 0:
            raise PrecisionError(f"product would only be known below t^{prec}")
        offset = _TBIAS << self._tshift()
        d = _mul_dicts(self._d, other._d, self.ring.char, offset, self._limit(prec))
        return TLaurent._raw(self.ring, d, prec)

    __rmul__ = __mul__

    def mul_poly(self, poly: Poly) -> "TLaurent":
        return self * TLaurent.from_poly(poly, self.prec)

    def shift(self, k: int) -> "TLaurent":
        """Multiply by the exact monomial t^k."""
        step = k << self._tshift()
        return TLaurent._raw(self.ring, {key + step: c for key, c in self._d.items()}, self.prec + k)

    def unit_inverse(self) -> "TLaurent":
        if self.valuation() != 0:
            raise NotAUnitError(f"series has valuation {self.valuation()}, not a unit")
        sl = {e: Poly._raw(self.ring, d) for e, d in self.slices().items()}
        c0 = sl[0]
        if not c0.is_constant():
            raise NotAUnitError(f"leading coefficient {c0} is not a constant")
        inv0 = self.ring.inv(c0.constant_term())
        b = [Poly.constant(self.ring, inv0)]
        for k in range(1, self.prec):
            acc = Poly.zero(self.ring)
            for i in range(1, k + 1):
                ai = sl.get(i)
                if ai is not None and b[k - i]:
                    acc = acc + ai * b[k - i]
            b.append(acc * (-inv0 % self.ring.char if self.ring.char else -inv0))
        return TLaurent(self.ring, dict(enumerate(b)), self.prec)

    def __pow__(self, e: int):
        if e < 0:
            return self.unit_inverse() ** (-e)
        p = self.ring.char
        if p and e >= p:
            # x^(a + p*b) = x^a * F(x^b); Frobenius is cheap and keeps precision
            a, b = e % p, e // p
            high = (self ** b).frobenius_power(1)
            return high if a == 0 else high * (self ** a)
        result = None
        base = self
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        if result is None:
            return TLaurent(self.ring, {0: 1}, max(self.prec, 1))
        return result

    def __eq__(self, other):
        if not isinstance(other, TLaurent):
            return NotImplemented
        return self.ring == other.ring and self.prec == other.prec and self._d == other._d

    def __hash__(self):
        return hash((self.ring, self.prec, frozenset(self._d.items())))

    def agrees_with(self, other: "TLaurent") -> bool:
        """Equal on the common range of known coefficients."""
        prec = min(self.prec, other.prec)
        return self.truncate(prec)._d == other.truncate(prec)._d

    # -- calculus ------------------------------------------------------------
    def derivative_t(self) -> "TLaurent":
        sh = self._tshift()
        one = 1 << sh
        out = {}
        for k, c in self._d.items():
            e = (k >> sh) - _TBIAS
            if e:
                out[k - one] = c * e
        if self.prec < 1:
            raise PrecisionError("derivative of a series known only through its pole part")
        prec = self.prec - 1
        lim = self._limit(prec)
        return TLaurent._raw(self.ring, {k: c for k, c in _normalize(out, self.ring.char).items() if k < lim}, prec)

    def partial(self, var: str) -> "TLaurent":
        i = self.ring.index(var)
        shift = _SHIFT * i
        one = 1 << shift
        out = {}
        for k, c in self._d.items():
            e = (k >> shift) & _MASK
            if e:
                out[k - one] = c * e
        return TLaurent._raw(self.ring, _normalize(out, self.ring.char), self.prec)

    def frobenius_power(self, j: int = 1) -> "TLaurent":
        p = self.ring.char
        if not p:
            raise CharacteristicError("Frobenius needs positive characteristic")
        q = p ** j
        sh = self._tshift()
        low = (1 << sh) - 1
        out = {}
        for k, c in self._d.items():
            e = (k >> sh) - _TBIAS
            lk = k & low
            if self.ring.nvars == 1:
                nk = lk * q
            else:
                nk = _pack(tuple(x * q for x in _unpack(lk, self.ring.nvars)))
            out[((e * q + _TBIAS) << sh) | nk] = c
        return TLaurent._raw(self.ring, out, self.prec * q)

    def pth_root(self):
        p = self.ring.char
        if not p:
            raise CharacteristicError("p-th roots need positive characteristic")
        sh = self._tshift()
        low = (1 << sh) - 1
        m = self.ring.nvars
        out = {}
        for k, c in self._d.items():
            e = (k >> sh) - _TBIAS
            exps = _unpack(k & low, m)
            if e % p or any(x % p for x in exps):
                return None
            out[((e // p + _TBIAS) << sh) | _pack(tuple(x // p for x in exps))] = c
        # only the multiples of p below prec are known on the p-th power side
        return TLaurent._raw(self.ring, out, -(-self.prec // p))

    def embed(self, ring: Ring) -> "TLaurent":
        """Same series viewed over a ring with more variables (matched by name)."""
        if ring == self.ring:
            return self
        pos = [ring.index(v) for v in self.ring.variables]
        m = self.ring.nvars
        sh = self._tshift()
        low = (1 << sh) - 1
        nsh = _SHIFT * ring.nvars
        out = {}
        simple = pos == list(range(m))
        for k, c in self._d.items():
            lk = k & low
            if not simple:
                key = 0
                for i, e in zip(pos, _unpack(lk, m)):
                    key |= e << (_SHIFT * i)
                lk = key
            out[((k >> sh) << nsh) | lk] = c
        return TLaurent._raw(ring, out, self.prec)

    def map_coefficients(self, fn, ring: Ring | None = None) -> "TLaurent":
        """Apply fn: Poly -> Poly to each t-slice."""
        ring = ring or self.ring
        terms = {}
        for e, c in self.items():
            terms[e] = fn(c)
        return TLaurent(ring, terms, self.prec)

    def __repr__(self):
        return f"TLaurent({self})"

    def __str__(self):
        parts = []
        for e, c in self.items():
            cs = str(c)
            if len(c) > 1:
                cs = f"({cs})"
            if e == 0:
                parts.append(cs)
            else:
                tp = "t" if e == 1 else f"t^{e}"
                parts.append(tp if cs == "1" else f"{cs}*{tp}")
        parts.append(f"O(t^{self.prec})")
        return " + ".join(parts)


def series_from_terms(ring: Ring, terms, prec: int) -> TLaurent:
    """Build sum c * x^a * t^e from (e, exps, c) triples."""
    d: dict = {}
    for e, exps, c in terms:
        d.setdefault(e, {})[tuple(exps)] = d.get(e, {}).get(tuple(exps), 0) + c
    return TLaurent(ring, {e: Poly(ring, m) for e, m in d.items()}, prec)
