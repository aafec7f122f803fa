"""Gaussian (quasi-free) moments from means and a symmetric covariance."""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations

import numpy as np

from ..errors import MomentError
from .state import MomentState, NumericPlan


def default_covariance(sig, gens, hbar: float) -> dict:
    """Minimum-uncertainty widths ``hbar/2`` on each canonical pair."""
    cov = {}
    gs = set(gens)
    for g in gens:
        if sig.generators[g].partner in gs:
            cov[(g, g)] = hbar / 2
    return cov


def gaussian_moments(plan: NumericPlan, means: dict, covariance: dict) -> np.ndarray:
    """Reduced moment vector of the quasi-free state with given data.

    ``means`` maps generator id to a real mean, ``covariance`` maps id pairs
    to symmetrized covariances ``(w(XY + YX))/2 - w(X)w(Y)``.  The ordered
    two-point function adds half the (central) commutator; higher moments
    follow by summing over ordered pairings.
    """
    sig = plan.sig
    gens = plan.basis.system_generators
    idx = {g: k for k, g in enumerate(gens)}
    n = len(gens)
    mu = np.zeros(n)
    for g, v in means.items():
        mu[idx[g]] = float(np.real(v))
    sym = np.zeros((n, n))
    for (a, b), v in covariance.items():
        sym[idx[a], idx[b]] = sym[idx[b], idx[a]] = float(np.real(v))
    G = sym.astype(complex)
    for a in gens:
        for b in gens:
            if a == b:
                continue
            br = sig.bracket(a, b)
            if not br.is_scalar():
                raise MomentError(
                    f"[{sig.name(a)}, {sig.name(b)}] is not central; no Gaussian state")
            G[idx[a], idx[b]] += plan.number(br.scalar()) / 2

    @lru_cache(maxsize=None)
    def wick(seq):
        if not seq:
            return 1.0 + 0j
        if len(seq) % 2:
            return 0j
        total = 0j
        a = seq[0]
        for k in range(1, len(seq)):
            rest = seq[1:k] + seq[k + 1:]
            total += G[a, seq[k]] * wick(rest)
        return total

    out = np.zeros(len(plan.basis.reduced_words), dtype=complex)
    for k, w in enumerate(plan.basis.reduced_words):
        pos = [idx[g] for g in w]
        total = 0j
        L = len(pos)
        for r in range(L + 1):
            for S in combinations(range(L), r):
                prod = 1.0
                for j in range(L):
                    if j not in S:
                        prod *= mu[pos[j]]
                if prod:
                    total += prod * wick(tuple(pos[j] for j in S))
        out[k] = total
    return out


def gaussian_state(plan: NumericPlan, t: float, means: dict | None = None,
                   covariance: dict | None = None) -> MomentState:
    sig = plan.sig
    gens = plan.basis.system_generators
    cov = default_covariance(sig, gens, plan.hbar)
    for (a, b), v in (covariance or {}).items():
        a, b = sig.id_of(a), sig.id_of(b)
        cov.pop((b, a), None)
        cov[(a, b)] = v
    mus = {sig.id_of(g): v for g, v in (means or {}).items()}
    for g in list(mus) + [x for ab in cov for x in ab]:
        if g not in gens:
            raise MomentError(f"{sig.name(g)} is not a reduced commutant generator")
    return MomentState(plan, t, gaussian_moments(plan, mus, cov))
