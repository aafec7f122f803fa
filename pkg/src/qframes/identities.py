"""Anchor suite: every structural identity the workbench is expected to reproduce.

Each anchor is exact (symbolic) and returns ``(passed, detail)``.  The suite
backs the ``identities`` CLI command and the acceptance tests.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .algebra.poly import adjoint, commutator
from .algebra.scalars import HBAR, QI, Scalar
from .constraints import (GOOD, IDEAL, INVALID, VALID, VALID_ON_DOMAIN, I_HBAR,
                          attempt_factorization, classify_clock)
from .models import appendix_reduction, build_model, run_reference_report
from .moments import (ConstraintExtension, SymbolicMomentState, covariance,
                      frame_incompatibility_check, nonpositivity_witness,
                      uncertainty_product_check)
from .moments.basis import words_up_to

MINUS_HALF_I_HBAR = I_HBAR * Fraction(-1, 2)
QUARTER_HBAR2 = Scalar({((HBAR, 2),): QI(Fraction(1, 4))})


@dataclass(frozen=True)
class Anchor:
    id: str
    summary: str
    check: Callable


def _two_time_state():
    inst = build_model("two-time")
    ext = ConstraintExtension(inst.signature, "q0", inst.constraints["C"], 4)
    return SymbolicMomentState(ext)


def _witness():
    v = nonpositivity_witness(_two_time_state())
    return v == MINUS_HALF_I_HBAR, str(v)


def _no_fluctuation():
    s = _two_time_state()
    sig, ext = s.sig, s.ext
    bad = []
    dz = covariance(s, sig.gen(ext.Z), sig.gen(ext.Z))
    if dz:
        bad.append(f"(dZ)^2 = {dz}")
    for w in words_up_to(sig, ext.basis.generators, 3):
        if not w:
            continue
        c = covariance(s, sig.gen(ext.Z), sig.word(*w))
        if c:
            bad.append(f"cov(Z, {sig.render_word(w)}) = {c}")
    return not bad, "; ".join(bad) or "all zero"


def _reference_momentum_covariance():
    s = _two_time_state()
    v = covariance(s, s.sig.gen(s.ext.Z), s.sig.gen(s.ext.E))
    return v == MINUS_HALF_I_HBAR, str(v)


def _saturation():
    v = uncertainty_product_check(_two_time_state())
    return v == QUARTER_HBAR2, str(v)


def _toy_factorization():
    inst = build_model("toy-nonfactorizable")
    sig = inst.signature
    rep = attempt_factorization(inst.spec("C"), "q0")
    expected = sig.parse("p0 + p1 - (i*hbar/2)*inv(q1)")
    obstruction = commutator(commutator(sig.gen("q0"), inst.constraints["C"]), inst.constraints["C"])
    ok = (rep.lapse == sig.gen("q1") and rep.right_factor == expected
          and rep.right_factor_hermitian is False and rep.verdict == INVALID
          and rep.obstruction == obstruction
          and adjoint(expected) == sig.parse("p0 + p1 + (i*hbar/2)*inv(q1)"))
    return ok, f"right factor {rep.right_factor.render()}, verdict {rep.verdict}"


def _toy_constraint_hermitian():
    inst = build_model("toy-nonfactorizable")
    C = inst.constraints["C"]
    return adjoint(C) == C, C.render()


def _verdicts(inst):
    return {r.candidate: r for _, r in run_reference_report(inst)}


def _network_equal():
    reps = _verdicts(build_model("clock-network"))
    want = {"qA": VALID_ON_DOMAIN, "qB": VALID_ON_DOMAIN, "qC": VALID}
    got = {k: r.verdict for k, r in reps.items()}
    return got == want, str(got)


def _network_rate():
    inst = build_model("clock-network").extras["primed"]
    sig = inst.signature
    rep = attempt_factorization(inst.spec("C1'"), "qC")
    clk = classify_clock("qA", rep.right_factor)
    expected = sig.parse("i*hbar*(1 + lambda*pB)")
    ok = (clk.bracket == expected and clk.classification == GOOD and clk.constant_of_motion
          and rep.lapse == sig.one() and rep.right_factor == inst.constraints["C1'"])
    return ok, f"[qA, C_H] = {clk.bracket.render()}, {clk.classification}"


def _network_redefinition():
    inst = build_model("clock-network")
    r = inst.extras["redefinition"]
    psig = inst.extras["primed"].signature
    simple = psig.parse("pA' + pB + pC + lambda*pA'*pB")
    ok = (r["canonical_with_qA"] and r["commutes_with_other_clocks"]
          and r["rewritten_constraint_matches"]
          and inst.extras["primed"].constraints["C1'"] == simple)
    return ok, simple.render()


def _network_unequal():
    inst = build_model("clock-network", {"lambda1": "lambda1", "lambda2": "lambda2"})
    sig = inst.signature
    reps = _verdicts(inst)
    rB = reps["qB"]
    # independent route: i hbar (l1 - l2) [pA, fA(qA)]
    expected = commutator(sig.gen("pA"), sig.gen("fA")) * sig.parse("i*hbar*(lambda1 - lambda2)")
    ok = (rB.verdict == INVALID and rB.obstruction == expected
          and rB.lapse == sig.parse("1 + lambda1*pA + lambda2*fA")
          and reps["qA"].verdict != INVALID and reps["qC"].verdict != INVALID)
    return ok, f"obstruction {rB.obstruction.render()}"


def _two_time_ideal():
    inst = build_model("two-time")
    spec = inst.spec("C")
    out = []
    for z, u in (("q0", "q1"), ("q1", "q0")):
        rep = attempt_factorization(spec, z)
        clk = classify_clock(u, rep.right_factor)
        out.append(rep.verdict == VALID and clk.classification == IDEAL and clk.alpha == Scalar.const(1))
    return all(out), "both ideal" if all(out) else "not ideal"


def _frame_incompatibility():
    r = frame_incompatibility_check(_two_time_state(), "q0", "q1")
    return r["verdict"] == "incompatible" and r["delta"] == str(MINUS_HALF_I_HBAR), r["delta"]


def _inverse_commutator():
    inst = build_model("relativistic-clocks", {"flag": "formal"})
    sig = inst.extras["reduced"].signature
    out = []
    for I in ("A", "B"):
        gi, wi = sig.inv(f"g_{I}"), sig.inv(f"w_{I}")
        lhs = commutator(gi, wi)
        rhs = wi * gi * commutator(sig.gen(f"g_{I}"), sig.gen(f"w_{I}")) * gi * wi
        out.append(bool(lhs) and lhs == rhs)
    return all(out), "holds for A and B" if all(out) else "mismatch"


def _constraints_commute(flag):
    inst = build_model("relativistic-clocks", {"flag": flag})
    cons = inst.constraints
    keys = sorted(cons)
    return {(a, b): not commutator(cons[a], cons[b])
            for i, a in enumerate(keys) for b in keys[i + 1:]}


def _relativistic_zero():
    pairs = _constraints_commute("zero")
    stages = appendix_reduction(build_model("relativistic-clocks", {"flag": "zero"}))
    ok = all(pairs.values()) and all(s.ok for s in stages) and all(
        all(s.checks.values()) for s in stages)
    return ok, ", ".join(f"{s.name}: {'ok' if s.ok else 'fail'}" for s in stages)


def _relativistic_formal():
    stages = appendix_reduction(build_model("relativistic-clocks", {"flag": "formal"}))
    s1, s2, s3 = stages
    prop = all(o and not o.subs({"kappa_A": 0, "kappa_B": 0}) for s in (s2, s3) for o in s.obstructions)
    ok = s1.ok and not s2.ok and not s3.ok and prop and s2.obstructions and s3.obstructions
    return bool(ok), "; ".join(o.render() for o in s2.obstructions + s3.obstructions)


ANCHORS = [
    Anchor("nonpositivity-witness", "(w(CZ) + w(ZC))/2 = -i hbar/2", _witness),
    Anchor("reference-sharp", "dZ = 0 and cov(Z, A) = 0 for commutant A of degree <= 3", _no_fluctuation),
    Anchor("reference-momentum-covariance", "cov(Z, E) = -i hbar/2", _reference_momentum_covariance),
    Anchor("uncertainty-saturated", "(dZ)^2 (dE)^2 - cov(Z, E)^2 = hbar^2/4", _saturation),
    Anchor("toy-constraint-hermitian", "toy constraint is hermitian", _toy_constraint_hermitian),
    Anchor("toy-right-factor", "toy right factor p0 + p1 - (i hbar/2) q1^-1 is not hermitian", _toy_factorization),
    Anchor("two-time-ideal-clocks", "q0 and q1 are ideal clocks for each other", _two_time_ideal),
    Anchor("frame-incompatibility", "a q0 state cannot be almost positive for q1", _frame_incompatibility),
    Anchor("network-redefinition", "pA' = pA + fA is canonical and simplifies the constraint", _network_redefinition),
    Anchor("network-equal-couplings", "qA, qB valid on domain; qC valid", _network_equal),
    Anchor("network-good-clock", "[qA, C_H] = i hbar (1 + lambda pB) in frame qC, good clock", _network_rate),
    Anchor("network-unequal-couplings", "qB invalid with obstruction i hbar (l1 - l2) [pA, fA]", _network_unequal),
    Anchor("inverse-commutator", "[g^-1, w^-1] = w^-1 g^-1 [g, w] g^-1 w^-1", _inverse_commutator),
    Anchor("relativistic-reduction", "staged reduction succeeds without the formal commutator", _relativistic_zero),
    Anchor("relativistic-formal-failure", "stages 2 and 3 fail with kappa-proportional obstructions", _relativistic_formal),
]


def run_identities(ids=None) -> list[dict]:
    out = []
    for a in ANCHORS:
        if ids and a.id not in ids:
            continue
        try:
            ok, detail = a.check()
        except Exception as exc:  # a crashing anchor is a failed anchor
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append({"id": a.id, "summary": a.summary, "pass": bool(ok), "detail": detail})
    return out
