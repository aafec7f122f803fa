"""Linear functionals fixed by the constraint and the parameterization.

Every expectation value of an almost-positive state is a linear combination
of ``t**k * m[w]``, with ``m`` the moments of ``Z``-free commutant words and
``t`` the reference time.  :class:`ConstraintExtension` computes these
combinations exactly (coefficients are :class:`Scalar`), memoized per word.

Words containing the conjugate momentum ``E`` are reduced with the
constraint ``C = E + H``: for a normal-ordered word ``x E y`` with no ``E``
in ``y``::

    w(x E y) = -w(x y H) + w(x [E, y])

which follows from ``w(B C) = 0`` with ``B = x y``.  Each step lowers the
number of ``E`` factors, so several ``E`` factors are handled as well.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import permutations

from ..algebra.poly import NCPolynomial, commutator
from ..algebra.scalars import HBAR, QI, Scalar
from ..errors import DegreeOverflow, HamiltonianNotInCommutant, MomentError
from .basis import CommutantBasis

I_HBAR = Scalar({((HBAR, 1),): QI(0, 1)})


def _acc(out: dict, key, c):
    old = out.get(key)
    c = c if old is None else old + c
    if c:
        out[key] = c
    elif old is not None:
        del out[key]


class ConstraintExtension:
    """Exact linear reduction of any word to ``(k, reduced word)`` terms.

    Parameters
    ----------
    sig, Z
        Signature and reference generator.
    constraint
        ``E + H`` with ``H`` in the commutant of ``Z``.  May be None, in
        which case words containing ``E`` cannot be valued.
    degree
        Truncation degree ``D`` of the stored moments.
    truncate
        Instead of raising on reduced words above ``D``, set their totally
        symmetric part to zero; the ``truncated`` attribute records whether
        that happened.
    """

    def __init__(self, sig, Z, constraint: NCPolynomial | None = None, degree: int = 4,
                 truncate: bool = False):
        self.sig = sig
        self.basis = CommutantBasis(sig, Z, degree)
        self.Z = self.basis.Z
        self.E = self.basis.E
        self.degree = degree
        self.truncate = truncate
        self.truncated = False
        self.constraint = constraint
        self.H = None
        self._comm = set(self.basis.generators)
        self._memo = {}
        if constraint is not None:
            self._split(constraint)

    def _split(self, C):
        sig = self.sig
        if self.E is None:
            raise HamiltonianNotInCommutant(f"{sig.name(self.Z)} has no conjugate momentum")
        if commutator(sig.gen(self.Z), C) != sig.scalar(I_HBAR):
            raise HamiltonianNotInCommutant(
                f"constraint is not of the form {sig.name(self.E)} + H with [Z, H] = 0")
        H = C - sig.gen(self.E)
        for w in H.words():
            bad = [g for g in w if g not in self._comm]
            if bad:
                raise HamiltonianNotInCommutant(
                    f"H contains {sig.name(bad[0])}, which does not commute with {sig.name(self.Z)}")
        self.H = H

    # -- core ---------------------------------------------------------------
    def word(self, w: tuple) -> dict:
        r = self._memo.get(w)
        if r is None:
            r = self._word(w)
            self._memo[w] = r
        return r

    def _word(self, w: tuple) -> dict:
        E = self.E
        if E is not None and E in w:
            if self.H is None:
                raise MomentError("words containing the conjugate momentum need a constraint")
            j = len(w) - 1 - w[::-1].index(E)
            x, y = w[:j], w[j + 1:]
            sig = self.sig
            out = {}
            xy = sig.word(*x, *y) if (x or y) else sig.one()
            for key, c in self.poly(xy * self.H).items():
                _acc(out, key, -c)
            if y:
                Ey = commutator(sig.gen(E), sig.word(*y))
                if Ey:
                    xp = sig.word(*x) if x else sig.one()
                    for key, c in self.poly(xp * Ey).items():
                        _acc(out, key, c)
            return out
        for g in w:
            if g not in self._comm:
                raise MomentError(
                    f"{self.sig.name(g)} is neither in the commutant of "
                    f"{self.sig.name(self.Z)} nor its conjugate momentum")
        k = w.count(self.Z)
        rest = tuple(g for g in w if g != self.Z) if k else w
        if len(rest) > self.degree:
            if self.truncate:
                self.truncated = True
                return self._truncated(k, rest)
            raise DegreeOverflow(
                f"moment of {self.sig.render_word(rest)} exceeds truncation degree {self.degree}")
        return {(k, rest): Scalar.const(1)}

    def _truncated(self, k: int, rest: tuple) -> dict:
        # Drop only the totally symmetric part of the word; the remainder
        # w - sym(w) has lower degree and is kept.  Symmetric products of
        # hermitian generators are hermitian, so the truncated functional
        # stays real on hermitian elements.
        sig = self.sig
        perms = set(permutations(rest))
        sym = sig.zero()
        for p in perms:
            sym = sym + sig.word(*p)
        low = sig.word(*rest) - sym.scale(Fraction(1, len(perms)))
        out = {}
        for (j, w), c in self.poly(low).items():
            _acc(out, (j + k, w), c)
        return out

    def poly(self, P: NCPolynomial) -> dict:
        """Reduce a polynomial: ``{(k, reduced word): Scalar}``."""
        out = {}
        for w, c in P.terms():
            for key, c2 in self.word(w).items():
                _acc(out, key, c * c2)
        return out

    def max_power(self) -> int:
        return max((k for r in self._memo.values() for k, _ in r), default=0)
