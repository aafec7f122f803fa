"""Shared signatures, random polynomial generators and a Fock-space oracle."""
from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from qframes.algebra import SignatureBuilder
from qframes.algebra.poly import NCPolynomial
from qframes.algebra.scalars import HBAR, QI, Scalar, Sym


def rich_signature(chain=10):
    """Three canonical pairs, a function of q1 with a derivative chain long
    enough for any product of the test polynomials, an invertible q2 and a
    free hermitian generator."""
    b = (SignatureBuilder().param("lam").pair("q0", "p0").pair("q1", "p1").pair("q2", "p2")
         .invertible("q2").hermitian("h"))
    names = ["f"] + [f"f{k}" for k in range(1, chain + 1)]
    for k, name in enumerate(names[:-1]):
        b.function(name, "q1", names[k + 1])
    return b.build()


SIG = rich_signature()
GENS = [g.id for g in SIG.generators
        if g.name in ("q0", "p0", "q1", "p1", "q2", "p2", "h", "f", "f1", "inv(q2)")]
LAM = Sym("lam", "real")

coefficients = st.builds(
    lambda a, b, h, l: Scalar.const(QI(Fraction(a, 2), Fraction(b, 2)))
    * Scalar.symbol(HBAR, h) * Scalar.symbol(LAM, l),
    st.integers(-3, 3), st.integers(-2, 2), st.integers(0, 1), st.integers(0, 1))


def polynomials(sig=SIG, gens=None, max_terms=3, max_len=3):
    gens = GENS if gens is None else gens
    word = st.lists(st.sampled_from(gens), max_size=max_len)
    term = st.tuples(coefficients, word)

    def build(terms):
        out = sig.zero()
        for c, w in terms:
            out = out + (sig.word(*w) if w else sig.one()).scale(c)
        return out
    return st.lists(term, min_size=1, max_size=max_terms).map(build)


def random_polynomial(rng, sig=SIG, gens=None, max_terms=3, max_len=3):
    """Seeded counterpart of :func:`polynomials` for fixed-count loops."""
    gens = GENS if gens is None else gens
    out = sig.zero()
    for _ in range(rng.integers(1, max_terms + 1)):
        w = [gens[i] for i in rng.integers(0, len(gens), size=rng.integers(0, max_len + 1))]
        c = (Scalar.const(QI(Fraction(int(rng.integers(-3, 4)), 2), Fraction(int(rng.integers(-2, 3)), 2)))
             * Scalar.symbol(HBAR, int(rng.integers(0, 2))) * Scalar.symbol(LAM, int(rng.integers(0, 2))))
        out = out + (sig.word(*w) if w else sig.one()).scale(c)
    return out


# -- truncated Fock space ------------------------------------------------------

def ladder(n):
    a = np.diag(np.sqrt(np.arange(1, n)), 1)
    return a


def canonical_matrices(n, hbar=1.0):
    a = ladder(n)
    q = np.sqrt(hbar / 2) * (a + a.T)
    p = 1j * np.sqrt(hbar / 2) * (a.T - a)
    return q.astype(complex), p


def gaussian_vector(n, q0, p0, vq, vp, hbar=1.0):
    """Ground state of a displaced anisotropic oscillator.

    Variances are ``vq`` and ``vp`` with ``vq * vp = hbar^2/4``.
    """
    q, p = canonical_matrices(n, hbar)
    one = np.eye(n)
    dq, dp = q - q0 * one, p - p0 * one
    H = dq @ dq / vq + dp @ dp / vp
    w, v = np.linalg.eigh((H + H.conj().T) / 2)
    return v[:, 0]


def evaluate_matrix(P: NCPolynomial, mats: dict, hbar=1.0, n=None):
    """Matrix of ``P`` with generators replaced by matrices."""
    size = n or next(iter(mats.values())).shape[0]
    out = np.zeros((size, size), dtype=complex)
    for w, c in P.terms():
        m = np.eye(size, dtype=complex)
        for g in w:
            m = m @ mats[g]
        out += c.evaluate({"hbar": hbar, "lam": 0.7}) * m
    return out
