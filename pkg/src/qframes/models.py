"""Ready-made constrained systems with their candidate reference variables.

Models are addressed by id:

``toy-nonfactorizable``
    Two canonical pairs, constraint ``q1 p0 + (q1 p1 + p1 q1)/2``.  The
    lapse for ``q0`` is ``q1`` and the right factor is not hermitian.
``two-time``
    ``p0 + p1 + H`` with ``H`` free of ``p0, p1``; both ``q0`` and ``q1``
    are references and ideal clocks for each other.
``clock-network``
    Three clocks ``A, B, C`` with couplings ``lambda1, lambda2`` and an
    event function ``fA(qA)``.  Equal couplings additionally expose the
    redefined momentum ``pA' = pA + fA`` and the simplified constraint.
``relativistic-clocks``
    Two light particles with internal clocks and a massive particle.
    ``flag=zero`` drops the formal commutator ``[g_I, w_I]``;
    ``flag=formal`` keeps it as an imaginary symbol ``kappa_I``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra.poly import NCPolynomial, adjoint, commutator
from .algebra.scalars import Scalar, Sym
from .algebra.signature import SignatureBuilder
from .constraints import (INVALID, ConstraintSpec, attempt_factorization,
                          classify_clock)
from .errors import BadParameter, FrozenClock, UnknownModel

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


@dataclass
class ModelInstance:
    id: str
    params: dict
    signature: object
    constraints: dict
    candidates: dict
    extras: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def spec(self, name) -> ConstraintSpec:
        return ConstraintSpec(self.constraints[name], self.candidates.get(name, ()), name=name,
                              require_hermitian=self.extras.get("require_hermitian", True))

    def analysis_target(self) -> "ModelInstance":
        """The instance whose constraints carry the reference analysis."""
        return self.extras.get("analysis", self)


@dataclass
class ModelEntry:
    id: str
    summary: str
    defaults: dict
    builder: object


def _coupling(key, raw):
    """Parameter value: an exact number or a symbol name."""
    if isinstance(raw, (int, Fraction)):
        return Scalar.const(raw)
    if isinstance(raw, Scalar):
        return raw
    text = str(raw).strip()
    try:
        return Scalar.const(Fraction(text))
    except (ValueError, ZeroDivisionError):
        pass
    if _IDENT.match(text) and text not in ("i", "hbar"):
        return Scalar.symbol(Sym(text, "real"))
    raise BadParameter(f"parameter {key}: cannot read {raw!r} as a number or symbol name")


def _merge(entry: ModelEntry, params: dict) -> dict:
    params = dict(params or {})
    unknown = sorted(set(params) - set(entry.defaults))
    if unknown:
        raise BadParameter(f"model {entry.id} has no parameter(s) {', '.join(unknown)}; "
                           f"known: {', '.join(sorted(entry.defaults)) or 'none'}")
    out = dict(entry.defaults)
    out.update(params)
    return out


def _declare_symbols(b: SignatureBuilder, *values):
    seen = set()
    for v in values:
        for s in v.symbols():
            if s.name not in seen:
                seen.add(s.name)
                b.param(s.name, s.kind, s.infinitesimal)


# -- toy model ---------------------------------------------------------------

def _toy(params):
    b = SignatureBuilder().pair("q0", "p0").pair("q1", "p1").invertible("q1")
    sig = b.build()
    C = sig.parse("q1*p0 + (1/2)*(q1*p1 + p1*q1)")
    return ModelInstance("toy-nonfactorizable", params, sig, {"C": C}, {"C": ("q0",)})


# -- two internal times ------------------------------------------------------

def _two_time(params):
    gamma = _coupling("gamma", params["gamma"])
    b = SignatureBuilder().pair("q0", "p0").pair("q1", "p1").pair("q2", "p2")
    _declare_symbols(b, gamma)
    sig = b.build()
    H = (sig.gen("p2") ** 2 + sig.gen("q2") ** 2).scale(Fraction(1, 2)) \
        + (sig.gen("q1") * sig.gen("q2")).scale(gamma)
    C = sig.gen("p0") + sig.gen("p1") + H
    inst = ModelInstance("two-time", params, sig, {"C": C}, {"C": ("q0", "q1")})
    inst.extras["clock_pairs"] = [("q0", "q1"), ("q1", "q0")]
    return inst


# -- interacting clock network -----------------------------------------------

def _clock_network(params):
    l1 = _coupling("lambda1", params["lambda1"])
    l2 = _coupling("lambda2", params["lambda2"])
    b = (SignatureBuilder().pair("qA", "pA").pair("qB", "pB").pair("qC", "pC")
         .function("fA", "qA", "fpA"))
    _declare_symbols(b, l1, l2)
    if l1 and l1.is_monomial():
        b.composite("NA", lambda s: s.one() + s.gen("pB").scale(l1))
    sig = b.build()
    g = sig.gen
    C1 = (g("pA") + g("pB") + g("pC") + (g("pA") * g("pB")).scale(l1)
          + g("fA") * (sig.one() + g("pB").scale(l2)))
    inst = ModelInstance("clock-network", params, sig, {"C1": C1}, {"C1": ("qA", "qB", "qC")})
    inst.extras["equal_couplings"] = l1 == l2
    if l1 != l2:
        return inst

    lam = l1
    bp = SignatureBuilder().pair("qA", "pA'").pair("qB", "pB").pair("qC", "pC")
    _declare_symbols(bp, lam)
    if lam and lam.is_monomial():
        bp.composite("NA", lambda s: s.one() + s.gen("pB").scale(lam))
        bp.composite("NB", lambda s: s.one() + s.gen("pA'").scale(lam))
    psig = bp.build()
    h = psig.gen
    C1p = h("pA'") + h("pB") + h("pC") + (h("pA'") * h("pB")).scale(lam)
    primed = ModelInstance("clock-network", params, psig, {"C1'": C1p},
                           {"C1'": ("qA", "qB", "qC")})
    primed.extras["clock_pairs"] = [("qA", "qC"), ("qB", "qC"), ("qC", "qA"), ("qC", "qB")]

    # the redefinition, checked inside the original algebra
    pAp = g("pA") + g("fA")
    ih = commutator(g("qA"), g("pA"))
    inst.extras["redefinition"] = {
        "pA'": pAp,
        "canonical_with_qA": commutator(g("qA"), pAp) == ih,
        "commutes_with_other_clocks": all(
            not commutator(pAp, g(x)) for x in ("qB", "pB", "qC", "pC")),
        "rewritten_constraint_matches": (
            pAp + g("pB") + g("pC") + (pAp * g("pB")).scale(lam)) == C1,
    }
    inst.extras["primed"] = primed
    inst.extras["analysis"] = primed
    return inst


# -- relativistic clocks -----------------------------------------------------

_PARTICLES = ("A", "B")


def _rel_full(flag, mA, mB):
    b = SignatureBuilder()
    for J in ("A", "B", "M"):
        b.pair(f"q0_{J}", f"p0_{J}").pair(f"q1_{J}", f"p1_{J}")
    for I in _PARTICLES:
        b.hermitian(f"gp_{I}").hermitian(f"g_{I}", invertible=True)
        b.hermitian(f"w_{I}", invertible=True)
    for I in _PARTICLES:
        b.pair(f"Z_{I}", f"E_{I}")
    b.function("theta_B", "Z_B", "thetap_B")
    _declare_symbols(b, mA, mB)
    for I in _PARTICLES:
        # g_I depends on the relative position q1_I - q1_M only
        b.commutator(f"p1_{I}", f"g_{I}", lambda s, I=I: s.gen(f"gp_{I}").scale(-_ih()))
        b.commutator(f"p1_M", f"g_{I}", lambda s, I=I: s.gen(f"gp_{I}").scale(_ih()))
        for x in (f"p1_{I}", "p1_M"):
            b.opaque(x, f"gp_{I}")
        b.opaque(f"q1_{I}", f"w_{I}")
        b.opaque(f"gp_{I}", f"w_{I}")
        _kappa(b, flag, I)
    return b.build()


def _rel_reduced(flag, mA, mB):
    b = SignatureBuilder()
    for I in _PARTICLES:
        b.pair(f"q0_{I}", f"p0_{I}").pair(f"Q1_{I}", f"p1_{I}")
    b.pair("q0_M", "p0_M")
    for I in _PARTICLES:
        b.function(f"g_{I}", f"Q1_{I}", f"gp_{I}", invertible=True)
        b.hermitian(f"w_{I}", invertible=True)
    for I in _PARTICLES:
        b.pair(f"Z_{I}", f"E_{I}")
    b.function("theta_B", "Z_B", "thetap_B")
    _declare_symbols(b, mA, mB)
    for I in _PARTICLES:
        b.opaque(f"Q1_{I}", f"w_{I}")
        b.opaque(f"gp_{I}", f"w_{I}")
        _kappa(b, flag, I)
    return b.build()


def _ih():
    from .constraints import I_HBAR
    return I_HBAR


def _kappa(b, flag, I):
    if flag == "formal":
        b.param(f"kappa_{I}", "imaginary", infinitesimal=True)
        b.commutator(f"g_{I}", f"w_{I}", lambda s, I=I: s.scalar(s.params[f"kappa_{I}"]))
    else:
        b.commutator(f"g_{I}", f"w_{I}", 0)


def _rel_constraints(sig, mA, mB, reduced=False):
    g, inv = sig.gen, sig.inv
    m = {"A": mA, "B": mB}
    out = {}
    for I in _PARTICLES:
        out[f"C_{I}"] = g(f"g_{I}") * g(f"p0_{I}") - g(f"w_{I}")
    if not reduced:
        out["f1"] = g("p1_A") + g("p1_B") + g("p1_M")
    f0 = g("p0_M")
    for I in _PARTICLES:
        if reduced:
            f0 = f0 + inv(f"g_{I}") * g(f"w_{I}")      # -h_I
        else:
            f0 = f0 + g(f"p0_{I}")
        E = g(f"E_{I}") + (g("theta_B") if I == "B" else sig.zero())
        f0 = f0 + (inv(f"g_{I}") * inv(f"w_{I}") * E).scale(m[I])
    out["f0"] = f0
    return out


def _relativistic(params):
    flag = str(params["flag"])
    if flag not in ("zero", "formal"):
        raise BadParameter("parameter flag must be 'zero' or 'formal'")
    mA = _coupling("m_A", params["m_A"])
    mB = _coupling("m_B", params["m_B"])
    for k, v in (("m_A", mA), ("m_B", mB)):
        if not v or not v.is_monomial():
            raise BadParameter(f"parameter {k} must be a nonzero number or a symbol")
    full = _rel_full(flag, mA, mB)
    cons = _rel_constraints(full, mA, mB)
    cands = {"C_A": ("q0_A",), "C_B": ("q0_B",), "f1": (), "f0": ("q0_M", "Z_A", "Z_B")}
    inst = ModelInstance("relativistic-clocks", params, full, cons, cands)
    inst.extras["require_hermitian"] = flag == "zero"
    inst.extras["flag"] = flag
    red = _rel_reduced(flag, mA, mB)
    rinst = ModelInstance("relativistic-clocks", params, red, _rel_constraints(red, mA, mB, True),
                          {"C_A": ("q0_A",), "C_B": ("q0_B",), "f0": ("q0_M", "Z_A", "Z_B")})
    rinst.extras["require_hermitian"] = flag == "zero"
    inst.extras["reduced"] = rinst
    if flag == "formal":
        inst.notes.append("f0 is hermitian only when [g_I, w_I] is dropped")
    return inst


CATALOG = {
    "toy-nonfactorizable": ModelEntry(
        "toy-nonfactorizable", "constraint linear in p0 with a position-dependent lapse", {}, _toy),
    "two-time": ModelEntry(
        "two-time", "two internal times driving an oscillator", {"gamma": "gamma"}, _two_time),
    "clock-network": ModelEntry(
        "clock-network", "two interacting clocks, a distant clock and a recorded event",
        {"lambda1": "lambda", "lambda2": "lambda"}, _clock_network),
    "relativistic-clocks": ModelEntry(
        "relativistic-clocks", "light particles with internal clocks near a massive particle",
        {"flag": "zero", "m_A": "m_A", "m_B": "m_B"}, _relativistic),
}


def build_model(model_id: str, params: dict | None = None) -> ModelInstance:
    try:
        entry = CATALOG[model_id]
    except KeyError:
        raise UnknownModel(f"unknown model {model_id!r}; known: {', '.join(sorted(CATALOG))}") from None
    return entry.builder(_merge(entry, params))


def run_reference_report(inst: ModelInstance) -> list:
    """``[(constraint name, ReferenceReport), ...]`` over every candidate."""
    target = inst.analysis_target()
    out = []
    for name in target.constraints:
        spec = target.spec(name)
        for z in spec.candidates:
            out.append((name, attempt_factorization(spec, z)))
    return out


def clock_table(inst: ModelInstance) -> list:
    """Classify each candidate as a clock in the frame of each valid reference.

    Returns ``[(frame, ClockReport | None), ...]``; ``None`` marks a frozen clock.
    """
    target = inst.analysis_target()
    reports = {(n, r.candidate): r for n, r in run_reference_report(inst)}
    pairs = target.extras.get("clock_pairs")
    out = []
    for name in target.constraints:
        cands = target.candidates.get(name, ())
        for z in cands:
            rep = reports[(name, z)]
            if rep.verdict == INVALID or rep.right_factor is None:
                continue
            for u in cands:
                if u == z or (pairs is not None and (u, z) not in pairs):
                    continue
                try:
                    out.append((z, classify_clock(u, rep.right_factor)))
                except FrozenClock:
                    out.append((z, ClockFrozen(u)))
    return out


@dataclass
class ClockFrozen:
    clock: str

    def to_dict(self):
        return {"clock": self.clock, "classification": "frozen"}


# -- staged reduction --------------------------------------------------------

@dataclass
class Stage:
    name: str
    ok: bool
    checks: dict
    reports: list = field(default_factory=list)
    obstructions: list = field(default_factory=list)

    def to_dict(self):
        return {
            "stage": self.name,
            "ok": self.ok,
            "checks": dict(self.checks),
            "reports": [dict(r.to_dict(), constraint=n) for n, r in self.reports],
            "obstructions": [p.render() for p in self.obstructions],
        }


def _all_commute(items):
    keys = list(items)
    return all(not commutator(items[a], items[b])
               for i, a in enumerate(keys) for b in keys[i + 1:])


def _kappa_free(p: NCPolynomial) -> bool:
    return not p.subs({"kappa_A": 0, "kappa_B": 0})


def _defect(rep) -> NCPolynomial:
    if rep.obstruction:
        return rep.obstruction
    if rep.right_factor is not None:
        return rep.right_factor - adjoint(rep.right_factor)
    return rep.lapse_constraint_commutator


def appendix_reduction(inst: ModelInstance) -> list[Stage]:
    """Remove the four constraints of the relativistic model one at a time."""
    if inst.id != "relativistic-clocks":
        raise BadParameter("staged reduction is defined for relativistic-clocks only")
    sig = inst.signature
    g = sig.gen
    cons = inst.constraints
    red = inst.extras["reduced"]
    rsig = red.signature
    stages = []

    # 1: translational constraint -> relative positions
    rel = {I: g(f"q1_{I}") - g("q1_M") for I in _PARTICLES}
    ih = commutator(g("q1_A"), g("p1_A"))
    checks = {
        "relative_positions_commute_with_f1": all(not commutator(rel[I], cons["f1"]) for I in rel),
        "relative_positions_canonical": all(
            commutator(rel[I], g(f"p1_{J}")) == (ih if I == J else sig.zero())
            for I in _PARTICLES for J in _PARTICLES),
        "relative_positions_commute": not commutator(rel["A"], rel["B"]),
        "g_depends_on_relative_position": all(
            not commutator(cons["f1"], g(f"g_{I}")) for I in _PARTICLES),
        "f1_commutes_with_other_constraints": all(
            not commutator(cons["f1"], cons[k]) for k in ("C_A", "C_B", "f0")),
    }
    checks["all_constraints_commute"] = _all_commute(cons)
    ok1 = all(v for k, v in checks.items() if k != "all_constraints_commute")
    stages.append(Stage("eliminate-translation", ok1, checks))

    # 2: factor C_I with q0_I as clock
    reps, obs = [], []
    for I in _PARTICLES:
        spec = red.spec(f"C_{I}")
        rep = attempt_factorization(spec, f"q0_{I}")
        reps.append((f"C_{I}", rep))
        if rep.verdict == INVALID:
            obs.append(_defect(rep))
    h = {I: -(rsig.inv(f"g_{I}") * rsig.gen(f"w_{I}")) for I in _PARTICLES}
    checks = {
        f"right_factor_{I}_is_p0_plus_h": r.right_factor == rsig.gen(f"p0_{I}") + h[I]
        for I, (_, r) in zip(_PARTICLES, reps)
    }
    checks.update({f"h_{I}_hermitian": adjoint(h[I]) == h[I] for I in _PARTICLES})
    checks["obstructions_proportional_to_kappa"] = all(_kappa_free(o) for o in obs)
    ok2 = all(r.verdict != INVALID for _, r in reps)
    stages.append(Stage("factor-worldlines", ok2, checks, reps, obs))

    # 3: reduced Hamiltonian constraint
    f0 = red.constraints["f0"]
    spec = red.spec("f0")
    reps, obs = [], []
    for z in spec.candidates:
        rep = attempt_factorization(spec, z)
        reps.append(("f0", rep))
        if rep.verdict == INVALID:
            obs.append(_defect(rep))
    checks = {"f0_hermitian": adjoint(f0) == f0,
              "obstructions_proportional_to_kappa": all(_kappa_free(o) for o in obs)}
    zA = dict((r.candidate, r) for _, r in reps)["Z_A"]
    if zA.right_factor is not None:
        mA = _coupling("m_A", inst.params["m_A"])
        wg = (rsig.gen("w_A") * rsig.gen("g_A")).scale(mA.inverse())
        rest = rsig.gen("p0_M") - h["B"] + (rsig.inv("g_B") * rsig.inv("w_B")
                                             * (rsig.gen("E_B") + rsig.gen("theta_B"))).scale(
                                                 _coupling("m_B", inst.params["m_B"]))
        expected = rsig.gen("E_A") + (rsig.gen("w_A") ** 2).scale(mA.inverse()) + wg * rest
        checks["Z_A_right_factor_matches_bracket_form"] = zA.right_factor == expected
        checks["Z_A_lapse_constant_of_motion"] = not commutator(zA.lapse, zA.right_factor)
    ok3 = all(r.verdict != INVALID for _, r in reps)
    stages.append(Stage("factor-hamiltonian", ok3, checks, reps, obs))
    return stages


def reduction_succeeds(stages) -> bool:
    return all(s.ok for s in stages)
