"""Normal-ordered noncommutative polynomials."""
from __future__ import annotations

from .scalars import Scalar, join_terms, scalar_term_texts, ONE_QI, QI


def _add_into(acc: dict, word, c: Scalar):
    old = acc.get(word)
    if old is None:
        acc[word] = c
    else:
        c = old + c
        if c:
            acc[word] = c
        else:
            del acc[word]


class NCPolynomial:
    """Finite map from normal-ordered words to nonzero :class:`Scalar`.

    Instances are immutable and always normalized; build them through an
    :class:`~qframes.algebra.signature.AlgebraSignature` (``sig.gen``,
    ``sig.parse``, ...) rather than directly.
    """

    __slots__ = ("sig", "_t", "_hash")

    def __init__(self, sig, terms=None):
        self.sig = sig
        self._t = terms if terms is not None else {}
        self._hash = None

    # -- inspection ---------------------------------------------------------
    def terms(self):
        return self._t.items()

    def words(self):
        return list(self._t)

    def coefficient(self, word) -> Scalar:
        return self._t.get(tuple(word), Scalar())

    def __bool__(self):
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def is_scalar(self) -> bool:
        return not self._t or (len(self._t) == 1 and () in self._t)

    def scalar(self) -> Scalar:
        """Coefficient of the identity word."""
        return self._t.get((), Scalar())

    def degree(self) -> int:
        return max((len(w) for w in self._t), default=0)

    def degree_in(self, gid: int) -> int:
        return max((w.count(gid) for w in self._t), default=0)

    def generators(self):
        return sorted({g for w in self._t for g in w})

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, NCPolynomial):
            if other.sig is not self.sig and other.sig != self.sig:
                raise ValueError("polynomials belong to different signatures")
            return other
        return self.sig.scalar(other)

    def __add__(self, other):
        other = self._coerce(other)
        if not other._t:
            return self
        if not self._t:
            return other
        t = dict(self._t)
        for w, c in other._t.items():
            _add_into(t, w, c)
        return NCPolynomial(self.sig, t)

    __radd__ = __add__

    def __neg__(self):
        return NCPolynomial(self.sig, {w: -c for w, c in self._t.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "NCPolynomial":
        c = Scalar.coerce(c)
        if not c:
            return NCPolynomial(self.sig)
        t = {}
        for w, v in self._t.items():
            v = v * c
            if v:
                t[w] = v
        return NCPolynomial(self.sig, t)

    def __mul__(self, other):
        if not isinstance(other, NCPolynomial):
            return self.scale(other)
        other = self._coerce(other)
        nf = self.sig._nf
        acc = {}
        for w1, c1 in self._t.items():
            for w2, c2 in other._t.items():
                c = c1 * c2
                if not c:
                    continue
                for w, c3 in nf(w1 + w2, c.nilpotent_support()).items():
                    _add_into(acc, w, c * c3)
        return NCPolynomial(self.sig, acc)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        return self.scale(Scalar.coerce(other).inverse())

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers of polynomials are not defined")
        out = self.sig.one()
        for _ in range(n):
            out = out * self
        return out

    def subs(self, values: dict) -> "NCPolynomial":
        """Substitute numeric or symbolic values for coefficient symbols."""
        acc = {}
        for w, c in self._t.items():
            c = c.subs(values)
            if c:
                _add_into(acc, w, c)
        return NCPolynomial(self.sig, acc)

    # -- comparison / display -----------------------------------------------
    def __eq__(self, other):
        if isinstance(other, NCPolynomial):
            return self._t == other._t and (other.sig is self.sig or other.sig == self.sig)
        try:
            other = self.sig.scalar(other)
        except TypeError:
            return NotImplemented
        return self._t == other._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    def sorted_terms(self):
        rank = self.sig.rank
        return sorted(self._t.items(), key=lambda wc: (len(wc[0]), [rank[g] for g in wc[0]]))

    def render(self) -> str:
        parts = []
        for w, c in self.sorted_terms():
            wtxt = self.sig.render_word(w)
            for neg, ctxt in scalar_term_texts(c):
                if not wtxt:
                    parts.append((neg, ctxt))
                elif ctxt == "1":
                    parts.append((neg, wtxt))
                else:
                    parts.append((neg, f"{ctxt}*{wtxt}"))
        return join_terms(parts)

    __str__ = render

    def __repr__(self):
        return f"<NCPolynomial {self.render()}>"


def commutator(a: NCPolynomial, b: NCPolynomial) -> NCPolynomial:
    """Normal form of ``ab - ba``."""
    if not a or not b:
        return NCPolynomial(a.sig)
    return a * b - b * a


def adjoint(a: NCPolynomial) -> NCPolynomial:
    """Star involution: reverse words, conjugate coefficients."""
    sig = a.sig
    star = sig._star
    acc = {}
    for w, c in a._t.items():
        cc = c.conj()
        rw = tuple(star[g] for g in reversed(w))
        for w2, c2 in sig._nf(rw, cc.nilpotent_support()).items():
            _add_into(acc, w2, cc * c2)
    return NCPolynomial(sig, acc)


def is_hermitian(a: NCPolynomial) -> bool:
    return adjoint(a) == a


def inverse(p: NCPolynomial) -> NCPolynomial:
    """Two-sided inverse when it is known to the signature.

    Handled: nonzero scalar monomials, scalar monomials times words of
    invertible generators, and declared composites.  Anything else raises
    :class:`~qframes.errors.NotInvertible`.
    """
    from ..errors import NotInvertible
    sig = p.sig
    if p.is_scalar():
        c = p.scalar()
        if not c.is_monomial():
            raise NotInvertible(f"scalar {c} is not invertible")
        return sig.scalar(c.inverse())
    for comp in sig.composites:
        if comp.poly == p:
            return sig.gen(comp.inverse)
    if len(p._t) == 1:
        (w, c), = p.terms()
        if c.is_monomial():
            out = sig.scalar(c.inverse())
            for g in reversed(w):
                gi = sig._inv.get(g)
                if gi is not None:
                    out = out * sig.gen(gi)
                elif sig.generators[g].kind == "composite-inverse":
                    out = out * sig.composites[sig.generators[g].base].poly
                else:
                    raise NotInvertible(f"{sig.name(g)} is not declared invertible")
            return out
    raise NotInvertible(f"{p.render()} is not a declared invertible element")


def normal_form(expr, sig) -> NCPolynomial:
    """Normalize an unordered combination ``[(coefficient, word), ...]``.

    Words may list generator names or ids.
    """
    acc = {}
    for coef, word in expr:
        c = Scalar.coerce(coef)
        if not c:
            continue
        ids = tuple(sig.id_of(g) for g in word)
        for w, c2 in sig._nf(ids, c.nilpotent_support()).items():
            _add_into(acc, w, c * c2)
    return NCPolynomial(sig, acc)


__all__ = ["NCPolynomial", "commutator", "adjoint", "is_hermitian", "inverse", "normal_form", "QI", "ONE_QI"]
