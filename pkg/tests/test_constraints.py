import pytest

from qframes.algebra import SignatureBuilder, adjoint, commutator
from qframes.constraints import (GOOD, IDEAL, INVALID, NON_UNIFORM, VALID, VALID_ON_DOMAIN,
                                 ConstraintSpec, attempt_factorization, classify_clock,
                                 compute_lapse, reference_reports)
from qframes.errors import (FrozenClock, LapseNotInvertible, NonHermitianConstraint,
                            NotLinearInMomentum)


@pytest.fixture
def free():
    sig = SignatureBuilder().pair("q0", "p0").pair("q", "p").build()
    return sig, sig.parse("p0 + (1/2)*p^2 + q0*q^2")


def test_lapse_of_deparameterized_constraint(free):
    sig, C = free
    assert compute_lapse(C, "q0") == sig.one()


def test_trivial_lapse_gives_valid_reference(free):
    sig, C = free
    rep = attempt_factorization(C, "q0")
    assert rep.verdict == VALID
    assert rep.right_factor == C
    assert commutator(sig.gen("q0"), C) == sig.parse("i*hbar")
    assert rep.lapse * rep.right_factor == C


def test_quadratic_momentum_rejected():
    sig = SignatureBuilder().pair("t", "E").build()
    with pytest.raises(NotLinearInMomentum):
        compute_lapse(sig.parse("E^2 - 1"), "t")


def test_vanishing_lapse(free):
    sig, C = free
    with pytest.raises(LapseNotInvertible):
        attempt_factorization(sig.parse("p0 + q^2"), "q")


def test_noninvertible_lapse_without_obstruction():
    sig = SignatureBuilder().pair("q0", "p0").pair("q1", "p1").build()
    with pytest.raises(LapseNotInvertible):
        attempt_factorization(sig.parse("q1*p0"), "q0")


def test_nonhermitian_constraint_rejected():
    sig = SignatureBuilder().pair("q0", "p0").build()
    with pytest.raises(NonHermitianConstraint):
        ConstraintSpec(sig.parse("q0*p0"))
    spec = ConstraintSpec(sig.parse("q0*p0"), require_hermitian=False)
    assert spec.constraint == sig.parse("q0*p0")


def test_toy_right_factor_is_not_hermitian():
    sig = SignatureBuilder().pair("q0", "p0").pair("q1", "p1").invertible("q1").build()
    C = sig.parse("q1*p0 + (1/2)*(q1*p1 + p1*q1)")
    assert adjoint(C) == C
    rep = attempt_factorization(C, "q0")
    assert rep.lapse == sig.gen("q1")
    assert rep.right_factor == sig.parse("p0 + p1 - (i*hbar/2)*inv(q1)")
    assert rep.right_factor_hermitian is False
    assert rep.verdict == INVALID
    assert rep.obstruction == sig.parse("-hbar^2*q1")
    assert rep.lapse * rep.right_factor == C


def test_composite_lapse_valid_on_domain():
    sig = (SignatureBuilder().param("lam").pair("qA", "pA").pair("qB", "pB").pair("qC", "pC")
           .composite("NA", lambda s: s.one() + s.parse("lam*pB")).build())
    C = sig.parse("pA + pB + pC + lam*pA*pB")
    rep = attempt_factorization(C, "qA")
    assert rep.verdict == VALID_ON_DOMAIN
    assert rep.lapse == sig.parse("1 + lam*pB")
    assert rep.lapse_commutes_with_CH
    assert any("invertibility is preserved" in n for n in rep.notes)
    assert rep.lapse * rep.right_factor == C


def test_reference_reports_cover_candidates(free):
    sig, C = free
    reps = reference_reports(ConstraintSpec(C, ("q0",)))
    assert [r.candidate for r in reps] == ["q0"]


def test_clock_classes():
    sig = SignatureBuilder().param("a").pair("q0", "p0").pair("q1", "p1").pair("q2", "p2").build()
    C = sig.parse("p0 + a*p1 + (1/2)*(p2^2 + q2^2)")
    assert classify_clock("q1", C).classification == IDEAL
    assert classify_clock("q0", C).alpha == sig.one().scalar()
    non = classify_clock("q2", C)
    assert non.classification == NON_UNIFORM and not non.constant_of_motion
    with pytest.raises(FrozenClock):
        classify_clock("q0", sig.parse("p1 + p2"))


def test_good_clock():
    sig = SignatureBuilder().param("lam").pair("qA", "pA").pair("qB", "pB").pair("qC", "pC").build()
    C = sig.parse("pA + pB + pC + lam*pA*pB")
    clk = classify_clock("qA", C)
    assert clk.classification == GOOD
    assert clk.constant_of_motion
    assert clk.rate == sig.parse("1 + lam*pB")
    assert clk.bracket == sig.parse("i*hbar*(1 + lam*pB)")


def test_hbar_dependent_rate_is_not_ideal():
    sig = SignatureBuilder().pair("q0", "p0").pair("q1", "p1").build()
    clk = classify_clock("q1", sig.parse("p0 + hbar*p1"))
    assert clk.classification == GOOD


def test_report_dict_is_rendered(free):
    sig, C = free
    d = attempt_factorization(C, "q0").to_dict()
    assert d["verdict"] == VALID
    assert sig.parse(d["right_factor"]) == C


def test_lapse_on_other_candidate_momentum_is_noted():
    sig = (SignatureBuilder().param("lam").pair("qA", "pA").pair("qB", "pB")
           .composite("NA", lambda s: s.parse("1 + lam*pB")).build())
    C = sig.parse("pA + pB + lam*pA*pB")
    rep = attempt_factorization(ConstraintSpec(C, ("qA", "qB")), "qA")
    assert "lapse depends on pB, conjugate to candidate qB" in rep.notes
    rep = attempt_factorization(ConstraintSpec(sig.parse("pA + pB"), ("qA", "qB")), "qA")
    assert not any("conjugate to candidate" in n for n in rep.notes)
