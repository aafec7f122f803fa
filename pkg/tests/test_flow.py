import math
import warnings

import numpy as np
import pytest

from helpers import canonical_matrices, gaussian_vector
from qframes import kernels
from qframes.algebra import SignatureBuilder
from qframes.errors import ClosureTruncated
from qframes.kernels import fallback
from qframes.moments import (ConstraintExtension, NumericPlan, classical_limit_check, evolve,
                             gauge_flow_rhs, gauge_generator, gaussian_state, step_schedule)


def system(H, degree=4, hbar=1.0):
    sig = SignatureBuilder().pair("t", "E").pair("q", "p").build()
    C = sig.parse(f"E + {H}")
    return sig, NumericPlan(ConstraintExtension(sig, "t", C, degree), hbar)


def fock_evolution(Hm, psi0, s):
    """exp(-i Hm s) psi0; pass s = tau/hbar."""
    vals, vecs = np.linalg.eigh(Hm)
    return vecs @ (np.exp(-1j * vals * s) * (vecs.conj().T @ psi0))


def test_schedule():
    h, n, stride = step_schedule(math.pi / 2)
    assert (n, stride) == (1998, 2) and h <= 1e-3
    assert n * h == pytest.approx(math.pi / 2)
    h, n, stride = step_schedule(1.0, dt=0.1, samples=5)
    assert (n, stride) == (12, 3) and h == pytest.approx(1 / 12)
    assert step_schedule(0.01, dt=1e-3, samples=1000)[1:] == (10, 1)
    with pytest.raises(ValueError):
        step_schedule(0.0)


def test_generator_matches_flow_rhs():
    sig, plan = system("(1/2)*p^2 + t*q")
    st = gaussian_state(plan, 0.7, {"q": 0.2, "p": 0.5})
    G, truncated = gauge_generator(plan)
    assert not truncated and G.shape[0] == 2
    rhs = gauge_flow_rhs(st)
    dm = (G[0] + st.t * G[1]) @ st.m
    for i, w in enumerate(plan.basis.reduced_words):
        assert dm[i] == pytest.approx(rhs[w], abs=1e-12)
    assert rhs[(sig.id_of("t"),)] == pytest.approx(1.0)


@pytest.mark.parametrize("hbar", [1.0, 0.5])
def test_oscillator_matches_schrodinger_evolution(hbar):
    sig, plan = system("(1/2)*(p^2 + q^2)", hbar=hbar)
    q0, p0, vq = 0.8, -0.3, 0.3 * hbar
    vp = hbar ** 2 / 4 / vq
    st = gaussian_state(plan, 0.0, {"q": q0, "p": p0}, {("q", "q"): vq, ("p", "p"): vp})
    tau = 1.3
    traj = evolve(st, tau, samples=50)
    n = 80
    Q, P = canonical_matrices(n, hbar)
    psi = fock_evolution((P @ P + Q @ Q) / 2, gaussian_vector(n, q0, p0, vq, vp, hbar), tau / hbar)
    mats = {sig.id_of("q"): Q, sig.id_of("p"): P}
    end = traj.state(len(traj) - 1)
    for w in plan.basis.reduced_words:
        m = np.eye(n, dtype=complex)
        for g in w:
            m = m @ mats[g]
        assert end.value(w) == pytest.approx(np.vdot(psi, m @ psi), abs=1e-8), sig.render_word(w)
    assert end.t == pytest.approx(tau, abs=1e-12)


def test_linear_potential_in_time():
    # H = p^2/2 + t q: a uniform force growing with the reference time
    sig, plan = system("(1/2)*p^2 + t*q")
    t0, q0, p0 = 0.5, 0.1, 0.2
    st = gaussian_state(plan, t0, {"q": q0, "p": p0})
    tau = 2.0
    traj = evolve(st, tau, dt=1e-3, samples=11)
    q = q0 + p0 * tau - t0 * tau ** 2 / 2 - tau ** 3 / 6
    p = p0 - t0 * tau - tau ** 2 / 2
    end = traj.state(len(traj) - 1)
    assert end("q") == pytest.approx(q, abs=1e-9)
    assert end("p") == pytest.approx(p, abs=1e-9)
    assert end("q^2") - end("q") ** 2 == pytest.approx(0.5 + tau ** 2 * 0.5, abs=1e-9)
    res = classical_limit_check(traj, method="flow")
    assert res["max_residual"] < 1e-9


def test_truncation_warns_and_marks_status():
    sig, plan = system("(1/2)*p^2 + (1/4)*q^4")
    st = gaussian_state(plan, 0.0, {"q": 1.0})
    with pytest.warns(ClosureTruncated):
        traj = evolve(st, 0.1, samples=11)
    assert traj.status == "warning" and traj.notes
    # the truncated flow keeps the functional real on hermitian words
    assert abs(traj.state(len(traj) - 1)("q^2").imag) < 1e-12


def test_closed_hierarchy_does_not_warn():
    sig, plan = system("(1/2)*(p^2 + q^2)")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        traj = evolve(gaussian_state(plan, 0.0), 0.1, samples=11)
    assert traj.status == "ok"


@pytest.mark.parametrize("method", ["difference", "flow"])
def test_classical_limit_for_quadratic_hamiltonian(method):
    sig, plan = system("(1/2)*(p^2 + q^2)")
    traj = evolve(gaussian_state(plan, 0.0, {"q": 1.0, "p": 0.5}), 1.0, samples=101)
    res = classical_limit_check(traj, method=method)
    assert res["max_residual"] < 1e-8
    assert set(res["per_generator"]) == {"q", "p", "t"}


def test_classical_limit_fails_for_anharmonic_spread():
    # w(q^3) != w(q)^3 for a wide state, so the mean force departs from Hamilton's
    sig, plan = system("(1/2)*p^2 + (1/4)*q^4", degree=4)
    st = gaussian_state(plan, 0.0, {"q": 1.0}, {("q", "q"): 2.0, ("p", "p"): 0.125})
    with pytest.warns(ClosureTruncated):
        traj = evolve(st, 0.2, samples=11)
    assert classical_limit_check(traj, method="flow")["per_generator"]["p"] > 1.0


def test_backends_agree():
    sig, plan = system("(1/2)*p^2 + t*q^2")
    st = gaussian_state(plan, 0.3, {"q": 0.4, "p": -0.1})
    a = evolve(st, 0.5, samples=21, backend=fallback.rk4_poly)
    b = evolve(st, 0.5, samples=21, backend=kernels.rk4_poly)
    assert np.max(np.abs(a.moments - b.moments)) < 1e-12
    assert np.array_equal(a.times, b.times)


def test_min_eigenvalues_and_series():
    sig, plan = system("(1/2)*(p^2 + q^2)")
    traj = evolve(gaussian_state(plan, 0.0, {"q": 1.0}), math.pi, samples=21)
    assert traj.series("q")[-1] == pytest.approx(-1.0, abs=1e-10)
    assert traj.min_eigenvalues().min() > -1e-9
    assert len(traj.min_eigenvalues(degree=2)) == 21
