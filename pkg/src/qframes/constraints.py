"""Reference-variable analysis: lapse extraction, factorization, clocks.

A candidate reference ``Z`` for a constraint ``C`` linear in the momentum
conjugate to ``Z`` yields a lapse ``N = [Z, C]/(i hbar)``.  When ``N`` has a
known inverse the right factor ``C_H = N^-1 C`` is formed (lapse on the
left) and checked for the properties a consistent evolution generator needs.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .algebra.poly import NCPolynomial, adjoint, commutator, inverse
from .algebra.scalars import HBAR, QI, Scalar
from .algebra.signature import real_scalar_multiple_of_one
from .errors import (FrozenClock, LapseNotInvertible, NonHermitianConstraint,
                     NotInvertible, NotLinearInMomentum)

VALID = "valid"
VALID_ON_DOMAIN = "valid-on-invertibility-domain"
INVALID = "invalid"

IDEAL = "ideal"
GOOD = "good"
NON_UNIFORM = "non-uniform"

I_HBAR = Scalar({((HBAR, 1),): QI(0, 1)})
INV_I_HBAR = I_HBAR.inverse()


def _name(sig, g) -> str:
    return g if isinstance(g, str) else sig.name(g)


@dataclass(frozen=True)
class ConstraintSpec:
    """A constraint together with the generators proposed as references.

    ``require_hermitian=False`` admits constraints that are hermitian only
    after dropping a formal commutator; the analysis then still runs but
    nothing downstream should be read as a physical evolution generator.
    """

    constraint: NCPolynomial
    candidates: tuple = ()
    name: str = "C"
    require_hermitian: bool = True

    def __post_init__(self):
        if self.require_hermitian and adjoint(self.constraint) != self.constraint:
            raise NonHermitianConstraint(f"constraint {self.name} is not hermitian")
        object.__setattr__(self, "candidates", tuple(_name(self.sig, c) for c in self.candidates))

    @property
    def sig(self):
        return self.constraint.sig


@dataclass
class ReferenceReport:
    candidate: str
    lapse: NCPolynomial
    right_factor: NCPolynomial | None
    lapse_hermitian: bool
    lapse_commutes_with_CH: bool | None
    lapse_commutes_with_Z: bool
    right_factor_hermitian: bool | None
    obstruction: NCPolynomial
    lapse_constraint_commutator: NCPolynomial
    verdict: str
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.verdict != INVALID

    def to_dict(self) -> dict:
        def r(p):
            return None if p is None else p.render()
        return {
            "candidate": self.candidate,
            "lapse": r(self.lapse),
            "right_factor": r(self.right_factor),
            "right_factor_adjoint": r(adjoint(self.right_factor)) if self.right_factor is not None else None,
            "lapse_hermitian": self.lapse_hermitian,
            "lapse_commutes_with_CH": self.lapse_commutes_with_CH,
            "lapse_commutes_with_Z": self.lapse_commutes_with_Z,
            "right_factor_hermitian": self.right_factor_hermitian,
            "obstruction": r(self.obstruction),
            "lapse_constraint_commutator": r(self.lapse_constraint_commutator),
            "verdict": self.verdict,
            "notes": list(self.notes),
        }


@dataclass
class ClockReport:
    clock: str
    rate: NCPolynomial
    classification: str
    constant_of_motion: bool
    alpha: Scalar | None = None
    bracket: NCPolynomial | None = None

    def to_dict(self) -> dict:
        return {
            "clock": self.clock,
            "rate": self.rate.render(),
            "bracket": None if self.bracket is None else self.bracket.render(),
            "classification": self.classification,
            "constant_of_motion": self.constant_of_motion,
            "alpha": None if self.alpha is None else str(self.alpha),
        }


def _as_spec(C) -> ConstraintSpec:
    return C if isinstance(C, ConstraintSpec) else ConstraintSpec(C)


def compute_lapse(C, Z) -> NCPolynomial:
    """``(1/i hbar) [Z, C]``; requires ``C`` linear in the momentum of ``Z``."""
    spec = _as_spec(C)
    sig = spec.sig
    zid = sig.id_of(Z)
    E = sig.partner(zid)
    if E is not None and spec.constraint.degree_in(E) > 1:
        raise NotLinearInMomentum(
            f"{spec.name} has degree {spec.constraint.degree_in(E)} in {sig.name(E)}")
    return commutator(sig.gen(zid), spec.constraint).scale(INV_I_HBAR)


def attempt_factorization(C, Z) -> ReferenceReport:
    """Try ``C = N C_H`` with ``Z`` as reference and report every check."""
    spec = _as_spec(C)
    sig = spec.sig
    Cp = spec.constraint
    zname = _name(sig, Z)
    zgen = sig.gen(zname)
    N = compute_lapse(spec, zname)
    if not N:
        raise LapseNotInvertible(f"{zname} commutes with {spec.name}; the lapse vanishes")
    NC = commutator(N, Cp)
    # [[Z, C], C] = i hbar [N, C]
    obstruction = NC.scale(I_HBAR)
    lapse_herm = adjoint(N) == N
    lapse_z = not commutator(N, zgen)
    notes = []
    # allowed, but worth knowing: the lapse involves another candidate's momentum
    for other in spec.candidates:
        partner = sig.partner(sig.id_of(other))
        if other != zname and partner is not None and partner in N.generators():
            notes.append(f"lapse depends on {sig.name(partner)}, conjugate to candidate {other}")
    try:
        Ninv = inverse(N)
    except NotInvertible:
        if not obstruction:
            raise LapseNotInvertible(
                f"lapse {N.render()} for {zname} has no declared inverse") from None
        notes.append("lapse has no declared inverse; right factor not formed")
        return ReferenceReport(zname, N, None, lapse_herm, None, lapse_z, None,
                               obstruction, NC, INVALID, notes)
    CH = Ninv * Cp
    if N * CH != Cp:
        raise AssertionError("factorization does not reproduce the constraint")
    rf_herm = adjoint(CH) == CH
    lapse_ch = not commutator(N, CH)
    ok = lapse_herm and lapse_ch and lapse_z and rf_herm and not obstruction
    if not ok:
        verdict = INVALID
    elif N.is_scalar():
        verdict = VALID
    else:
        verdict = VALID_ON_DOMAIN
        notes.append(f"valid where {N.render()} is invertible")
        if lapse_ch:
            notes.append("lapse commutes with the right factor, so invertibility is preserved in time")
    if not rf_herm:
        notes.append("right factor is not hermitian")
    return ReferenceReport(zname, N, CH, lapse_herm, lapse_ch, lapse_z, rf_herm,
                           obstruction, NC, verdict, notes)


def reference_reports(C) -> list[ReferenceReport]:
    spec = _as_spec(C)
    return [attempt_factorization(spec, z) for z in spec.candidates]


def classify_clock(U, C_H: NCPolynomial) -> ClockReport:
    """Rate ``[U, C_H]/(i hbar)`` and its classification."""
    sig = C_H.sig
    uname = _name(sig, U)
    B = commutator(sig.gen(uname), C_H)
    R = B.scale(INV_I_HBAR)
    if not R:
        raise FrozenClock(f"{uname} commutes with the evolution generator")
    const = not commutator(R, C_H)
    alpha = real_scalar_multiple_of_one(R)
    if alpha is not None and not alpha.has_symbol("hbar"):
        cls = IDEAL
    elif const:
        cls, alpha = GOOD, None
    else:
        cls, alpha = NON_UNIFORM, None
    return ClockReport(uname, R, cls, const, alpha, B)
