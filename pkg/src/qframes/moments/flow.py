"""Gauge flow of moment states generated by the constraint.

``d w(A)/d tau = w([A, C]) / (i hbar)`` for every reduced word ``A``.
Because ``C = E + H`` with ``[Z, C] = i hbar``, the reference time moves as
``t(tau) = t(0) + tau`` and the reduced moments obey a linear system whose
matrix is a polynomial in ``t`` (``H`` may depend on ``Z``).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..algebra.poly import commutator
from ..errors import ClosureTruncated
from .. import kernels
from .extension import ConstraintExtension, I_HBAR
from .matrix import MatrixPlan
from .state import MomentState, NumericPlan


def gauge_generator(plan: NumericPlan, truncate: bool = True):
    """Matrices ``G_k`` with ``dm/dtau = sum_k t^k G_k m``, and a truncation flag."""
    src = plan.ext
    ext = ConstraintExtension(src.sig, src.Z, src.constraint, src.degree, truncate=truncate)
    basis = ext.basis
    sig = ext.sig
    C = ext.constraint
    n = len(basis.reduced_words)
    inv_ih = I_HBAR.inverse()
    rows = {}
    kmax = 0
    for i, w in enumerate(basis.reduced_words):
        if not w:
            continue
        red = ext.poly(commutator(sig.word(*w), C).scale(inv_ih))
        rows[i] = red
        kmax = max([kmax] + [k for k, _ in red])
    G = np.zeros((kmax + 1, n, n), dtype=complex)
    idx = basis.reduced_index
    for i, red in rows.items():
        for (k, w), c in red.items():
            G[k, i, idx[w]] += plan.number(c)
    return G, ext.truncated


def gauge_flow_rhs(state: MomentState) -> dict:
    """``{word: d w(word)/d tau}`` over the full commutant basis, plus ``t``."""
    sig = state.sig
    C = state.constraint
    inv_ih = I_HBAR.inverse()
    out = {}
    for w in state.basis.words:
        if not w:
            out[w] = 0j
            continue
        out[w] = state.value(commutator(sig.word(*w), C).scale(inv_ih))
    return out


@dataclass
class Trajectory:
    plan: NumericPlan
    taus: np.ndarray
    times: np.ndarray
    moments: np.ndarray
    status: str = "ok"
    notes: list = field(default_factory=list)
    dt: float = 0.0
    nsteps: int = 0
    backend: str = ""

    def __len__(self):
        return len(self.taus)

    def state(self, k: int) -> MomentState:
        return MomentState(self.plan, self.times[k], self.moments[k])

    def series(self, A) -> np.ndarray:
        """Values of ``A`` (polynomial, text or word) at every sample."""
        st = self.state(0)
        P = st._poly(A)
        coef, power, index = self.plan.compile(P)
        if not len(coef):
            return np.zeros(len(self), dtype=complex)
        tp = np.power.outer(self.times, power)
        return (self.moments[:, index] * tp * coef).sum(axis=1)

    def min_eigenvalues(self, degree: int | None = None) -> np.ndarray:
        mp = MatrixPlan(self.plan, degree)
        out = np.empty(len(self))
        for k in range(len(self)):
            M = mp.matrix(self.times[k], self.moments[k])
            out[k] = np.linalg.eigvalsh((M + M.conj().T) / 2).min()
        return out


def step_schedule(tau: float, dt: float | None = None, samples: int = 1000):
    """Fixed RK4 schedule: ``(dt, nsteps, stride)``.

    The default step is ``min(1e-3, tau/1000)``.  The step count is rounded
    up so that ``samples`` equally spaced samples (ends included) fall on
    steps; the effective ``dt`` is never larger than requested.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    if dt is None:
        dt = min(1e-3, tau / 1000)
    if dt <= 0:
        raise ValueError("dt must be positive")
    nsteps = max(1, math.ceil(tau / dt - 1e-9))
    intervals = max(1, samples - 1)
    if nsteps >= intervals:
        nsteps = math.ceil(nsteps / intervals) * intervals
        stride = nsteps // intervals
    else:
        stride = 1
    return tau / nsteps, nsteps, stride


def evolve(state: MomentState, tau: float, dt: float | None = None, samples: int = 1000,
           backend=None) -> Trajectory:
    """Integrate the gauge flow from ``state`` up to ``tau``.

    If the hierarchy does not close at the state's degree, symmetrized
    moments above it are set to zero, a :class:`ClosureTruncated` warning is issued and the
    trajectory status is ``"warning"``.
    """
    G, truncated = gauge_generator(state.plan, truncate=True)
    h, nsteps, stride = step_schedule(tau, dt, samples)
    kern = backend or kernels.rk4_poly
    out = kern(np.ascontiguousarray(G), state.m, state.t, h, nsteps, stride)
    nsamp = out.shape[0]
    taus = np.arange(nsamp) * (stride * h)
    taus[-1] = tau
    traj = Trajectory(state.plan, taus, state.t + taus, out, dt=h, nsteps=nsteps,
                      backend=getattr(kern, "__module__", "") or "")
    if truncated:
        msg = f"hierarchy does not close at degree {state.basis.degree}; symmetric moments above it set to zero"
        warnings.warn(msg, ClosureTruncated, stacklevel=2)
        traj.status = "warning"
        traj.notes.append(msg)
    return traj


def classical_value(plan: NumericPlan, P, means: dict) -> complex:
    """Evaluate a polynomial with every generator replaced by its mean."""
    total = 0j
    for w, c in P.terms():
        v = plan.number(c)
        for g in w:
            v *= means[g]
        total += v
    return total


def classical_limit_check(traj: Trajectory, method: str = "difference") -> dict:
    """Compare first-moment velocities with Hamilton's equations.

    For every canonical pair ``(q, p)`` of the system the velocity of
    ``w(q)`` must equal ``dH/dp = [q, C]/(i hbar)`` evaluated at the first
    moments (and likewise for ``p``); ``t`` must advance at unit rate.
    ``method="difference"`` uses fourth-order central differences along the
    samples, ``"flow"`` the exact generator at each sample.
    """
    plan = traj.plan
    sig = plan.sig
    ext = plan.ext
    C = ext.constraint
    inv_ih = I_HBAR.inverse()
    gens = [g for g in ext.basis.system_generators
            if sig.generators[g].kind in ("position", "momentum")
            and sig.generators[g].partner in ext.basis.system_generators]
    firsts = {g: traj.series(sig.gen(g)) for g in gens}
    worst = 0.0
    per = {}
    h = traj.taus[1] - traj.taus[0] if len(traj) > 1 else 0.0
    for g in gens:
        vel_poly = commutator(sig.gen(g), C).scale(inv_ih)
        if method == "flow":
            vel = traj.series(vel_poly)
            sl = slice(None)
        else:
            x = firsts[g]
            if len(x) < 5:
                raise ValueError("need at least 5 samples for finite differences")
            vel = (-x[4:] + 8 * x[3:-1] - 8 * x[1:-3] + x[:-4]) / (12 * h)
            sl = slice(2, -2)
        pred = np.empty(len(traj), dtype=complex)
        for k in range(len(traj)):
            means = {x: firsts[x][k] for x in gens}
            means[ext.Z] = traj.times[k]
            pred[k] = classical_value(plan, vel_poly, means)
        r = float(np.max(np.abs(vel - pred[sl])))
        per[sig.name(g)] = r
        worst = max(worst, r)
    dt_res = float(np.max(np.abs(traj.times - traj.times[0] - traj.taus)))
    per[sig.name(ext.Z)] = dt_res
    return {"max_residual": max(worst, dt_res), "per_generator": per}
