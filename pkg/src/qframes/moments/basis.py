"""Word bases for the commutant of a reference generator."""
from __future__ import annotations

from itertools import combinations_with_replacement
from math import comb

from ..errors import NonClosedCommutator


def commutant_generators(sig, Z) -> list[int]:
    """Basic generators commuting with ``Z`` (``Z`` included, inverses excluded).

    The momentum conjugate to ``Z`` never commutes with it, so it is
    excluded automatically.  Pairs whose commutator is opaque are treated
    as non-commuting.
    """
    z = sig.id_of(Z)
    out = []
    for g in sig.generators:
        if g.is_inverse:
            continue
        if g.id == z:
            out.append(g.id)
            continue
        try:
            if not sig.bracket(g.id, z):
                out.append(g.id)
        except NonClosedCommutator:
            pass
    return sorted(out, key=lambda i: sig.rank[i])


def words_up_to(sig, gens, degree: int) -> list[tuple]:
    gens = sorted(gens, key=lambda i: sig.rank[i])
    out = [()]
    for d in range(1, degree + 1):
        out.extend(combinations_with_replacement(gens, d))
    return out


class CommutantBasis:
    """All normal-ordered words of degree <= D over the commutant generators.

    ``words`` includes ``Z``; ``reduced_words`` are the ``Z``-free ones that
    carry independent moments (``Z`` only ever contributes a factor ``t``).
    """

    def __init__(self, sig, Z, degree: int = 4):
        if degree < 0:
            raise ValueError("degree must be nonnegative")
        self.sig = sig
        self.Z = sig.id_of(Z)
        self.E = sig.partner(self.Z)
        self.degree = degree
        self.generators = commutant_generators(sig, self.Z)
        self.system_generators = [g for g in self.generators if g != self.Z]
        self.words = words_up_to(sig, self.generators, degree)
        self.reduced_words = words_up_to(sig, self.system_generators, degree)
        self.index = {w: k for k, w in enumerate(self.words)}
        self.reduced_index = {w: k for k, w in enumerate(self.reduced_words)}

    def __len__(self):
        return len(self.words)

    def slice(self, degree: int, reduced=False) -> list[tuple]:
        src = self.reduced_words if reduced else self.words
        return [w for w in src if len(w) <= degree]

    def expected_size(self) -> int:
        return comb(len(self.generators) + self.degree, self.degree)

    def render(self, w) -> str:
        return self.sig.render_word(w) or "1"


def enumerate_commutant_basis(sig, Z, D: int) -> CommutantBasis:
    return CommutantBasis(sig, Z, D)
