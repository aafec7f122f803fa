"""Algebraic laws on randomized polynomials of degree <= 3."""
import numpy as np
from hypothesis import given, settings

from helpers import GENS, SIG, evaluate_matrix, canonical_matrices, polynomials
from qframes.algebra import SignatureBuilder, adjoint, commutator
from qframes.algebra.poly import normal_form

N = 200


@settings(max_examples=N)
@given(polynomials(), polynomials(), polynomials())
def test_jacobi(A, B, C):
    J = commutator(commutator(A, B), C) + commutator(commutator(C, A), B) \
        + commutator(commutator(B, C), A)
    assert not J


@settings(max_examples=N)
@given(polynomials(), polynomials())
def test_adjoint_reverses_products(A, B):
    assert adjoint(A * B) == adjoint(B) * adjoint(A)


@settings(max_examples=N)
@given(polynomials())
def test_adjoint_is_involution(A):
    assert adjoint(adjoint(A)) == A


@settings(max_examples=N)
@given(polynomials())
def test_normal_form_idempotent(A):
    again = normal_form([(c, w) for w, c in A.terms()], SIG)
    assert again == A
    assert all(SIG.is_normal(w) for w in A.words())


@settings(max_examples=N)
@given(polynomials(), polynomials(), polynomials())
def test_product_associative(A, B, C):
    assert (A * B) * C == A * (B * C)


@settings(max_examples=N)
@given(polynomials(), polynomials(), polynomials())
def test_distributive_and_antisymmetric(A, B, C):
    assert A * (B + C) == A * B + A * C
    assert commutator(A, B) == -commutator(B, A)


# commutant of q0 for C = p0 + H with H free of p0
COMMUTANT = [g for g in GENS if SIG.name(g) != "p0"]
H_GENS = COMMUTANT


@settings(max_examples=N)
@given(polynomials(gens=COMMUTANT), polynomials(gens=H_GENS))
def test_commutant_preserved_by_constraint_flow(A, H):
    Z = SIG.gen("q0")
    C = SIG.gen("p0") + H + adjoint(H)
    assert commutator(Z, C) == SIG.parse("i*hbar")
    assert not commutator(A, Z)
    assert not commutator(commutator(A, C), Z)


# -- independent oracle: truncated Fock-space matrices ------------------------

ONE_PAIR = SignatureBuilder().pair("q", "p").build()
FOCK = 24
_q, _p = canonical_matrices(FOCK)
MATS = {ONE_PAIR.id_of("q"): _q, ONE_PAIR.id_of("p"): _p}
KEEP = FOCK - 7


@settings(max_examples=N)
@given(polynomials(ONE_PAIR, gens=[0, 1]), polynomials(ONE_PAIR, gens=[0, 1]))
def test_products_match_matrix_representation(A, B):
    # words of length <= 6 are exact on Fock levels below FOCK - 6
    lhs = evaluate_matrix(A * B, MATS)
    rhs = evaluate_matrix(A, MATS) @ evaluate_matrix(B, MATS)
    assert np.allclose(lhs[:KEEP, :KEEP], rhs[:KEEP, :KEEP], atol=1e-8)


@settings(max_examples=N)
@given(polynomials(ONE_PAIR, gens=[0, 1]))
def test_adjoint_matches_conjugate_transpose(A):
    lhs = evaluate_matrix(adjoint(A), MATS)
    rhs = evaluate_matrix(A, MATS).conj().T
    assert np.allclose(lhs[:KEEP, :KEEP], rhs[:KEEP, :KEEP], atol=1e-8)
