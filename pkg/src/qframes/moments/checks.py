"""State-level checks: the three almost-positive conditions and friends.

Functions accept a :class:`MomentState` (numeric) or, where noted, a
:class:`SymbolicMomentState`, in which case results are exact scalars.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..algebra.poly import NCPolynomial, adjoint
from ..algebra.scalars import Scalar
from ..errors import MomentError
from .matrix import MatrixPlan, positivity_on_commutant
from .state import MomentState

HALF = Fraction(1, 2)


def _poly(state, A) -> NCPolynomial:
    sig = state.sig
    if isinstance(A, NCPolynomial):
        return A
    if isinstance(A, str):
        return sig.parse(A)
    if isinstance(A, int):
        return sig.gen(A)
    return sig.word(*A)


def _ZE(state):
    ext = state.ext
    sig = state.sig
    return sig.gen(ext.Z), sig.gen(ext.E)


def covariance(state, A, B):
    """``(w(AB) + w(BA))/2 - w(A) w(B)``; exact for symbolic states."""
    A, B = _poly(state, A), _poly(state, B)
    v = state.value
    return (v(A * B) + v(B * A)) * HALF - v(A) * v(B)


def nonpositivity_witness(state):
    """``(w(C Z) + w(Z C))/2``; equals ``-i hbar/2`` on constrained states."""
    C = state.constraint
    Z, _ = _ZE(state)
    return (state.value(C * Z) + state.value(Z * C)) * HALF


def uncertainty_product_check(state):
    """``(dZ)^2 (dE)^2 - cov(Z, E)^2`` for the reference pair."""
    Z, E = _ZE(state)
    return covariance(state, Z, Z) * covariance(state, E, E) - covariance(state, Z, E) ** 2


def check_almost_positive(state: MomentState, tol: float = 1e-9) -> dict:
    """Residuals of the constraint, parameterization and positivity conditions."""
    C = state.constraint
    if C is None:
        raise MomentError("state has no constraint")
    sig = state.sig
    basis = state.basis
    D = basis.degree
    dC = C.degree()
    r1 = 0.0
    for w in basis.words:
        if len(w) <= D - dC:
            A = sig.word(*w) if w else sig.one()
            r1 = max(r1, abs(state.value(A * C)))
    Z = sig.gen(basis.Z)
    r2 = abs(state.value(sig.one()) - 1)
    for w in basis.words:
        if len(w) <= D - 1:
            A = sig.word(*w) if w else sig.one()
            r2 = max(r2, abs(state.value(Z * A) - state.t * state.value(A)))
    pos = positivity_on_commutant(state, tol)
    out = {
        "constraint": {"residual": r1, "pass": r1 <= tol},
        "parameterization": {"residual": r2, "pass": r2 <= tol},
        "positivity": pos,
    }
    out["pass"] = all(out[k]["pass"] for k in ("constraint", "parameterization", "positivity"))
    return out


def cauchy_schwarz_check(state: MomentState, pairs=None, n: int = 100, seed: int = 0) -> dict:
    """Worst ``w(A*A) w(B*B) - |w(A*B)|^2`` over pairs.

    With ``pairs=None``, ``n`` pairs of random complex combinations of the
    basis words of degree <= D/2 are drawn from a seeded generator.
    """
    if pairs is not None:
        margins = []
        for A, B in pairs:
            A, B = _poly(state, A), _poly(state, B)
            aa = state.value(adjoint(A) * A).real
            bb = state.value(adjoint(B) * B).real
            ab = state.value(adjoint(A) * B)
            margins.append(aa * bb - abs(ab) ** 2)
        return {"worst_margin": min(margins), "pairs": len(margins)}
    mp = MatrixPlan(state.plan)
    M = mp.matrix(state.t, state.m)
    rng = np.random.default_rng(seed)
    s = len(mp.words)
    worst = np.inf
    for _ in range(n):
        a = rng.normal(size=s) + 1j * rng.normal(size=s)
        b = rng.normal(size=s) + 1j * rng.normal(size=s)
        aa = np.vdot(a, M @ a).real
        bb = np.vdot(b, M @ b).real
        ab = np.vdot(a, M @ b)
        worst = min(worst, aa * bb - abs(ab) ** 2)
    return {"worst_margin": float(worst), "pairs": n}


def frame_incompatibility_check(state, Z1, Z2, tol: float = 1e-9) -> dict:
    """Can a state built on ``Z1`` also be almost positive for ``Z2``?

    Positivity on the commutant of ``Z2`` forces the symmetrized covariance
    of any two hermitian elements of that commutant to be real.  When both
    ``Z1`` and its momentum lie in it, their covariance (imaginary on every
    state built on ``Z1``) is the witness.
    """
    sig = state.sig
    z1, z2 = sig.id_of(Z1), sig.id_of(Z2)
    if z1 != state.ext.Z:
        raise MomentError(f"state is built on {sig.name(state.ext.Z)}, not {sig.name(z1)}")
    e1 = sig.partner(z1)
    delta = covariance(state, sig.gen(z1), sig.gen(e1))
    if isinstance(delta, Scalar):
        imag = delta.imag_part()
        nonreal = bool(imag)
        shown, imag_shown = str(delta), str(imag)
    else:
        imag = delta.imag
        nonreal = abs(imag) > tol
        shown, imag_shown = repr(complex(delta)), imag
    if z1 == z2:
        return {"delta": shown, "imaginary_part": imag_shown, "requires_real": False,
                "verdict": "compatible", "note": "same reference"}
    requires_real = not sig.bracket(z1, z2) and not sig.bracket(e1, z2)
    verdict = "incompatible" if (requires_real and nonreal) else "compatible"
    return {"delta": shown, "imaginary_part": imag_shown, "requires_real": requires_real,
            "verdict": verdict, "pair": [sig.name(z1), sig.name(e1)]}
