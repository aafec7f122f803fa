"""Numeric and symbolic moment states."""
from __future__ import annotations

import numpy as np

from ..algebra.poly import NCPolynomial
from ..algebra.scalars import Scalar, Sym
from ..errors import MomentError
from .extension import ConstraintExtension


class NumericPlan:
    """A :class:`ConstraintExtension` with numeric hbar and parameter values.

    Compiles reduced functionals into index arrays so that a state (or a
    whole trajectory of states) can be valued with a dot product.
    """

    def __init__(self, ext: ConstraintExtension, hbar: float = 1.0, values: dict | None = None):
        if not hbar > 0:
            raise ValueError("hbar must be positive")
        self.ext = ext
        self.hbar = float(hbar)
        self.values = dict(values or {})
        self.env = {"hbar": self.hbar, **self.values}
        self._compiled = {}

    @property
    def basis(self):
        return self.ext.basis

    @property
    def sig(self):
        return self.ext.sig

    def number(self, c: Scalar) -> complex:
        return c.evaluate(self.env)

    def compile(self, P: NCPolynomial):
        """``(coef, power, index)`` arrays with ``w(P) = sum coef t**power m[index]``."""
        key = P
        r = self._compiled.get(key)
        if r is None:
            red = self.ext.poly(P)
            idx = self.basis.reduced_index
            items = sorted(red.items(), key=lambda kv: (kv[0][0], idx[kv[0][1]]))
            coef = np.array([self.number(c) for _, c in items], dtype=complex)
            power = np.array([k for (k, _), _ in items], dtype=int)
            index = np.array([idx[w] for (_, w), _ in items], dtype=int)
            r = (coef, power, index)
            self._compiled[key] = r
        return r

    def value(self, P: NCPolynomial, t, m) -> complex:
        coef, power, index = self.compile(P)
        if not len(coef):
            return 0j
        return complex(np.sum(coef * np.power(t, power) * m[index]))


class MomentState:
    """Truncated expectation-value functional of an almost-positive state.

    Stores the reference time ``t`` and the moments ``m`` of the ``Z``-free
    commutant words (``m[()] == 1``); every other value follows from the
    parameterization and the constraint.  ``overrides`` replaces the value
    of specific normal-ordered words, which is how deliberately inconsistent
    states are built for testing the condition checks.
    """

    def __init__(self, plan: NumericPlan, t: float, reduced, overrides: dict | None = None):
        self.plan = plan
        self.t = float(t)
        m = np.asarray(reduced, dtype=complex)
        if m.shape != (len(plan.basis.reduced_words),):
            raise MomentError("reduced moment vector has the wrong length")
        self.m = m
        self.overrides = dict(overrides or {})

    # -- convenience --------------------------------------------------------
    @property
    def sig(self):
        return self.plan.sig

    @property
    def basis(self):
        return self.plan.basis

    @property
    def hbar(self):
        return self.plan.hbar

    @property
    def ext(self):
        return self.plan.ext

    @property
    def constraint(self):
        return self.plan.ext.constraint

    def _poly(self, A) -> NCPolynomial:
        if isinstance(A, NCPolynomial):
            return A
        if isinstance(A, str):
            return self.sig.parse(A)
        return self.sig.word(*A)

    def value(self, A) -> complex:
        """``w(A)`` for a polynomial, expression text or word."""
        P = self._poly(A)
        if self.overrides:
            total = 0j
            rest = {}
            for w, c in P.terms():
                if w in self.overrides:
                    total += self.plan.number(c) * self.overrides[w]
                else:
                    rest[w] = c
            if rest:
                total += self.plan.value(NCPolynomial(self.sig, rest), self.t, self.m)
            return total
        return self.plan.value(P, self.t, self.m)

    __call__ = value

    def reduced_moments(self) -> dict:
        return dict(zip(self.basis.reduced_words, self.m))

    def with_moments(self, t, reduced) -> "MomentState":
        return MomentState(self.plan, t, reduced)

    def __repr__(self):
        return f"<MomentState t={self.t:g} moments={len(self.m)}>"


def moment_symbol(sig, w) -> Scalar:
    if not w:
        return Scalar.const(1)
    return Scalar.symbol(Sym(f"<{sig.render_word(w)}>", "complex"))


T_SYMBOL = Sym("t", "real")


class SymbolicMomentState:
    """Exact state with one free symbol per reduced moment and symbolic ``t``.

    Values are :class:`Scalar` expressions in ``hbar``, model parameters,
    ``t`` and the moment symbols ``<word>``; identities that hold for every
    almost-positive state reduce to moment-free results.
    """

    def __init__(self, ext: ConstraintExtension, t: Scalar | None = None):
        self.ext = ext
        self.t = Scalar.symbol(T_SYMBOL) if t is None else Scalar.coerce(t)

    @property
    def sig(self):
        return self.ext.sig

    @property
    def constraint(self):
        return self.ext.constraint

    def value(self, A) -> Scalar:
        P = A if isinstance(A, NCPolynomial) else (
            self.sig.parse(A) if isinstance(A, str) else self.sig.word(*A))
        total = Scalar()
        for (k, w), c in self.ext.poly(P).items():
            total = total + c * self.t ** k * moment_symbol(self.sig, w)
        return total

    __call__ = value


def extend_from_reduced(reduced: dict, t: float, C: NCPolynomial, Z, degree: int = 4,
                        hbar: float = 1.0, values: dict | None = None) -> MomentState:
    """Almost-positive extension of reduced moments ``{word: value}``.

    Missing reduced words raise; ``()`` defaults to 1.
    """
    sig = C.sig
    ext = ConstraintExtension(sig, Z, C, degree)
    plan = NumericPlan(ext, hbar, values)
    vec = np.zeros(len(ext.basis.reduced_words), dtype=complex)
    given = {}
    for w, v in reduced.items():
        ww = tuple(sig.id_of(g) for g in (w if isinstance(w, tuple) else (w,)))
        given[ww] = v
    for k, w in enumerate(ext.basis.reduced_words):
        if w in given:
            vec[k] = given.pop(w)
        elif not w:
            vec[k] = 1.0
        else:
            raise MomentError(f"missing moment of {sig.render_word(w)}")
    if given:
        bad = next(iter(given))
        raise MomentError(f"{sig.render_word(bad)} is not a reduced commutant word of degree <= {degree}")
    return MomentState(plan, t, vec)
