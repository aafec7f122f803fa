"""Exact coefficient ring.

A :class:`Scalar` is a finite sum of Gaussian-rational numbers times Laurent
monomials in commuting formal symbols (``hbar``, couplings, masses, ...).
Nothing here ever touches floating point; numeric values only appear in
:meth:`Scalar.evaluate`.
"""
from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

SYMBOL_KINDS = ("real", "imaginary", "complex", "complex*")


class Sym(NamedTuple):
    """A commuting formal symbol.

    ``kind`` fixes how conjugation acts: real symbols are fixed, imaginary
    ones change sign, and a complex symbol is swapped with its ``complex*``
    partner of the same name.  An ``infinitesimal`` symbol squares to zero,
    so expressions containing it are exact to first order only.
    """

    name: str
    kind: str = "real"
    infinitesimal: bool = False

    def conj(self):
        if self.kind == "complex":
            return self._replace(kind="complex*")
        if self.kind == "complex*":
            return self._replace(kind="complex")
        return self


HBAR = Sym("hbar", "real")


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot convert {x!r} to an exact rational")


class QI:
    """Complex rational ``re + im*i``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    @classmethod
    def coerce(cls, x) -> "QI":
        if isinstance(x, QI):
            return x
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        return cls(x, 0)

    def __add__(self, o):
        return QI(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        return QI(self.re - o.re, self.im - o.im)

    def __mul__(self, o):
        return QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __truediv__(self, o):
        den = o.re * o.re + o.im * o.im
        if not den:
            raise ZeroDivisionError("division by zero")
        return QI((self.re * o.re + self.im * o.im) / den, (self.im * o.re - self.re * o.im) / den)

    def conj(self):
        return QI(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, o):
        if not isinstance(o, QI):
            try:
                o = QI.coerce(o)
            except TypeError:
                return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"QI({self.re}, {self.im})"


ONE_QI = QI(1)
I_QI = QI(0, 1)

Mono = tuple  # tuple[tuple[Sym, int], ...], sorted, no zero exponents


def mono_mul(a: Mono, b: Mono) -> Mono | None:
    """Product of monomials; None when an infinitesimal symbol squares."""
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for s, e in b:
        n = exps.get(s, 0) + e
        if s.infinitesimal and n > 1:
            return None
        if n:
            exps[s] = n
        else:
            del exps[s]
    return tuple(sorted(exps.items()))


def mono_conj(m: Mono):
    """Return ``(sign, conjugated monomial)``."""
    sign = 1
    out = []
    for s, e in m:
        if s.kind == "imaginary" and e % 2:
            sign = -sign
        out.append((s.conj(), e))
    return sign, tuple(sorted(out))


def _mono_str(m: Mono) -> str:
    parts = []
    for s, e in m:
        name = s.name if s.kind != "complex*" else f"conj({s.name})"
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


class Scalar:
    """Immutable element of ``Q(i)[symbols, symbols^-1]``."""

    __slots__ = ("_t", "_hash")

    def __init__(self, terms=None):
        # trusted constructor: callers pass a dict without zero entries
        self._t = terms if terms is not None else {}
        self._hash = None

    # -- construction -------------------------------------------------------
    @classmethod
    def const(cls, x) -> "Scalar":
        q = QI.coerce(x)
        return cls({(): q}) if q else cls()

    @classmethod
    def symbol(cls, sym: Sym, exp: int = 1) -> "Scalar":
        if isinstance(sym, str):
            sym = Sym(sym)
        if sym.infinitesimal and exp > 1:
            return cls()
        return cls({((sym, exp),): ONE_QI}) if exp else cls.const(1)

    @classmethod
    def coerce(cls, x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, Sym):
            return cls.symbol(x)
        return cls.const(x)

    # -- inspection ---------------------------------------------------------
    def terms(self):
        return self._t.items()

    def __bool__(self):
        return bool(self._t)

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and () in self._t)

    def constant(self) -> QI:
        return self._t.get((), QI())

    def is_monomial(self) -> bool:
        return len(self._t) == 1

    def symbols(self):
        return {s for m in self._t for s, _ in m}

    def has_symbol(self, name: str) -> bool:
        return any(s.name == name for s in self.symbols())

    def nilpotent_support(self) -> frozenset:
        """Infinitesimal symbols present in every monomial."""
        if not self._t:
            return frozenset()
        it = iter(self._t)
        out = {s for s, _ in next(it) if s.infinitesimal}
        for m in it:
            if not out:
                break
            out &= {s for s, _ in m}
        return frozenset(out)

    def without(self, syms) -> "Scalar":
        """Drop the monomials containing any of ``syms``."""
        if not syms:
            return self
        return Scalar({m: c for m, c in self._t.items() if not any(s in syms for s, _ in m)})

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, o):
        o = Scalar.coerce(o)
        if not o._t:
            return self
        if not self._t:
            return o
        t = dict(self._t)
        for m, c in o._t.items():
            n = t.get(m)
            if n is None:
                t[m] = c
            else:
                n = n + c
                if n:
                    t[m] = n
                else:
                    del t[m]
        return Scalar(t)

    __radd__ = __add__

    def __neg__(self):
        return Scalar({m: -c for m, c in self._t.items()})

    def __sub__(self, o):
        return self + (-Scalar.coerce(o))

    def __rsub__(self, o):
        return Scalar.coerce(o) - self

    def __mul__(self, o):
        o = Scalar.coerce(o)
        if not self._t or not o._t:
            return Scalar()
        t = {}
        for m1, c1 in self._t.items():
            for m2, c2 in o._t.items():
                m = mono_mul(m1, m2)
                if m is None:
                    continue
                c = c1 * c2
                n = t.get(m)
                if n is None:
                    t[m] = c
                else:
                    n = n + c
                    if n:
                        t[m] = n
                    else:
                        del t[m]
        return Scalar(t)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = Scalar.const(1)
        for _ in range(n):
            out = out * self
        return out

    def inverse(self) -> "Scalar":
        """Inverse of a single-term scalar; sums are not invertible here."""
        if len(self._t) != 1:
            raise ZeroDivisionError(f"scalar {self} is not an invertible monomial")
        (m, c), = self._t.items()
        if any(s.infinitesimal for s, _ in m):
            raise ZeroDivisionError(f"scalar {self} contains an infinitesimal symbol")
        return Scalar({tuple((s, -e) for s, e in m): ONE_QI / c})

    def __truediv__(self, o):
        return self * Scalar.coerce(o).inverse()

    def __rtruediv__(self, o):
        return Scalar.coerce(o) * self.inverse()

    def conj(self) -> "Scalar":
        t = {}
        for m, c in self._t.items():
            sign, cm = mono_conj(m)
            c = c.conj()
            t[cm] = c if sign > 0 else -c
        return Scalar(t)

    def is_real(self) -> bool:
        return self == self.conj()

    def real_part(self) -> "Scalar":
        return (self + self.conj()) * Scalar.const(Fraction(1, 2))

    def imag_part(self) -> "Scalar":
        return (self - self.conj()) * Scalar.const(QI(0, Fraction(-1, 2)))

    # -- substitution -------------------------------------------------------
    def subs(self, values: dict) -> "Scalar":
        """Replace symbols (by name) with scalars or numbers; others stay."""
        if not values:
            return self
        out = Scalar()
        for m, c in self._t.items():
            factor = Scalar.const(c)
            rest = []
            for s, e in m:
                if s.name in values:
                    v = Scalar.coerce(values[s.name])
                    if s.kind == "complex*":
                        v = v.conj()
                    factor = factor * (v ** e)
                else:
                    rest.append((s, e))
            out = out + factor * Scalar({tuple(rest): ONE_QI})
        return out

    def evaluate(self, env: dict) -> complex:
        total = 0j
        for m, c in self._t.items():
            v = complex(c)
            for s, e in m:
                try:
                    x = complex(env[s.name])
                except KeyError:
                    raise KeyError(f"no numeric value for symbol {s.name!r}") from None
                if s.kind == "complex*":
                    x = x.conjugate()
                v *= x ** e
            total += v
        return total

    # -- comparison ---------------------------------------------------------
    def __eq__(self, o):
        if not isinstance(o, Scalar):
            try:
                o = Scalar.coerce(o)
            except TypeError:
                return NotImplemented
        return self._t == o._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    def sort_key(self):
        return sorted((_mono_str(m), c.re, c.im) for m, c in self._t.items())

    def __repr__(self):
        return f"Scalar({render_scalar(self)})"

    def __str__(self):
        return render_scalar(self)


def render_qi(c: QI) -> str:
    """Render a nonzero magnitude without leading sign handling."""
    if not c.im:
        return str(c.re)
    if not c.re:
        return "i" if c.im == 1 else f"{c.im}*i"
    im = "i" if abs(c.im) == 1 else f"{abs(c.im)}*i"
    op = "+" if c.im > 0 else "-"
    return f"({c.re} {op} {im})"


def _term_parts(c: QI, mono_txt: str):
    """Split a coefficient into ``(negative, text)`` for a term printer."""
    neg = False
    if not c.im and c.re < 0:
        c, neg = -c, True
    elif not c.re and c.im < 0:
        c, neg = -c, True
    if c == ONE_QI and mono_txt:
        return neg, mono_txt
    txt = render_qi(c)
    return neg, f"{txt}*{mono_txt}" if mono_txt else txt


def scalar_term_texts(s: Scalar):
    """Yield ``(negative, text)`` per monomial in deterministic order."""
    items = sorted(s.terms(), key=lambda mc: (len(mc[0]), _mono_str(mc[0])))
    for m, c in items:
        yield _term_parts(c, _mono_str(m))


def join_terms(parts) -> str:
    out = ""
    for neg, txt in parts:
        if not out:
            out = f"-{txt}" if neg else txt
        else:
            out += f" - {txt}" if neg else f" + {txt}"
    return out or "0"


def render_scalar(s: Scalar) -> str:
    return join_terms(scalar_term_texts(s))
