"""Moment (Gram) matrices over the commutant and positivity tests."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..algebra.poly import adjoint


class MatrixPlan:
    """Precomputed linear map from ``(t, reduced moments)`` to the matrix.

    ``M[a, b] = w(A_a^* A_b)`` over the basis words of degree <= ``degree``.
    """

    def __init__(self, plan, degree: int | None = None):
        basis = plan.basis
        if degree is None:
            degree = basis.degree // 2
        self.plan = plan
        self.words = basis.slice(degree)
        sig = plan.sig
        s = len(self.words)
        polys = [sig.word(*w) if w else sig.one() for w in self.words]
        entries = {}
        kmax = 0
        for a in range(s):
            adj = adjoint(polys[a])
            for b in range(s):
                coef, power, index = plan.compile(adj * polys[b])
                entries[(a, b)] = (coef, power, index)
                if len(power):
                    kmax = max(kmax, int(power.max()))
        n = len(basis.reduced_words)
        T = np.zeros((kmax + 1, n, s, s), dtype=complex)
        for (a, b), (coef, power, index) in entries.items():
            np.add.at(T, (power, index, a, b), coef)
        self.T = T
        self.polys = polys

    def matrix(self, t: float, m) -> np.ndarray:
        tp = np.power(float(t), np.arange(self.T.shape[0]))
        return np.einsum("k,kjab,j->ab", tp, self.T, m)


@dataclass
class MomentMatrix:
    words: list
    matrix: np.ndarray
    min_eigenvalue: float
    hermiticity_residual: float

    def passes(self, tol: float) -> bool:
        return self.min_eigenvalue >= -tol and self.hermiticity_residual <= tol


def _matrix_for(state, degree=None):
    cache = state.plan.__dict__.setdefault("_matrix_plans", {})
    key = degree
    mp = cache.get(key)
    if mp is None:
        mp = cache[key] = MatrixPlan(state.plan, degree)
    if state.overrides:
        s = len(mp.words)
        M = np.empty((s, s), dtype=complex)
        for a in range(s):
            adj = adjoint(mp.polys[a])
            for b in range(s):
                M[a, b] = state.value(adj * mp.polys[b])
        return mp, M
    return mp, mp.matrix(state.t, state.m)


def moment_matrix(state, degree: int | None = None) -> MomentMatrix:
    mp, M = _matrix_for(state, degree)
    herm = float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0
    if M.size:
        ev = float(np.linalg.eigvalsh((M + M.conj().T) / 2).min())
    else:
        ev = 0.0
    return MomentMatrix(list(mp.words), M, ev, herm)


def positivity_on_commutant(state, tol: float = 1e-9, degree: int | None = None) -> dict:
    mm = moment_matrix(state, degree)
    return {
        "min_eigenvalue": mm.min_eigenvalue,
        "hermiticity_residual": mm.hermiticity_residual,
        "size": len(mm.words),
        "pass": mm.passes(tol),
    }
