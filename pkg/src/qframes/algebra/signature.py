"""Generator declarations, commutation table and the rewriting engine.

Words are tuples of generator ids.  A word is normal-ordered when the
generator ranks are non-decreasing and no generator sits next to its
inverse (or next to the inverse of an affine composite built on it).
Rewriting uses three rules, applied in this priority:

* ``g g^-1 -> 1`` and ``g^-1 g -> 1``;
* ``g X^-1 -> (1 - c0 X^-1)/c1`` for a declared composite ``X = c0 + c1 g``;
* ``a b -> b a + [a, b]`` for the first adjacent pair out of rank order.

Commutators between generators come from the canonical pairs, the declared
table, and rules derived on demand for formal functions and inverses.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass
from fractions import Fraction

from ..errors import NonClosedCommutator, SignatureError, UnknownGenerator, AlgebraError
from .poly import NCPolynomial, adjoint, _add_into
from .scalars import HBAR, QI, Scalar, Sym, SYMBOL_KINDS

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

RESERVED = {"i", "hbar", "inv", "conj"}
BASE_KINDS = ("position", "momentum", "hermitian", "function")


@dataclass(frozen=True)
class GeneratorDecl:
    id: int
    name: str
    kind: str
    base: int | None = None
    derivative: int | None = None
    invertible: bool = False
    partner: int | None = None

    @property
    def is_inverse(self) -> bool:
        return self.kind in ("inverse", "composite-inverse")


@dataclass(frozen=True)
class Composite:
    name: str
    poly: NCPolynomial
    inverse: int
    affine_gen: int
    c0: Scalar
    c1: Scalar


class SignatureBuilder:
    """Collects declarations; :meth:`build` freezes them into a signature."""

    def __init__(self):
        self._items = []
        self._names = {}
        self._params = {}

    def _claim(self, name, what):
        if name in RESERVED:
            raise SignatureError(f"{name!r} is reserved")
        if name in self._names or name in self._params:
            raise SignatureError(f"duplicate declaration of {name!r}")
        self._names[name] = what

    def param(self, name, kind="real", infinitesimal=False):
        """Declare a commuting scalar symbol.

        ``infinitesimal=True`` makes it square to zero; use it for a formal
        commutator that is only meaningful to first order.
        """
        if kind not in ("real", "imaginary", "complex"):
            raise SignatureError(f"unknown parameter kind {kind!r}")
        if name in RESERVED:
            raise SignatureError(f"{name!r} is reserved")
        if name in self._names or name in self._params:
            raise SignatureError(f"duplicate declaration of {name!r}")
        self._params[name] = Sym(name, kind, bool(infinitesimal))
        return self

    def pair(self, q, p):
        self._claim(q, "position")
        self._claim(p, "momentum")
        self._items.append(("pair", q, p))
        return self

    def hermitian(self, name, invertible=False):
        self._claim(name, "hermitian")
        self._items.append(("hermitian", name))
        if invertible:
            self._items.append(("invertible", name))
        return self

    def function(self, name, base, derivative=None, invertible=False):
        self._claim(name, "function")
        self._items.append(("function", name, base, derivative))
        if invertible:
            self._items.append(("invertible", name))
        return self

    def invertible(self, name):
        self._items.append(("invertible", name))
        return self

    def commutator(self, a, b, value):
        """Declare ``[a, b] = value``; value is an expression string,
        a number/Scalar/Sym, or a callable taking the signature."""
        self._items.append(("commutator", a, b, value))
        return self

    def opaque(self, a, b):
        """Declare ``[a, b]`` nonzero but unknown: reordering raises."""
        self._items.append(("opaque", a, b))
        return self

    def composite(self, name, expr):
        self._claim(name, "composite")
        self._items.append(("composite", name, expr))
        return self

    def build(self) -> "AlgebraSignature":
        return AlgebraSignature._from_items(self._items, self._params)


class AlgebraSignature:
    """Frozen operator algebra presentation.

    Build with :class:`SignatureBuilder`.  Normal-form and commutator caches
    live on the instance; they are memo tables only and never change the
    value of a result.
    """

    def __init__(self):
        self.generators: list[GeneratorDecl] = []
        self.params: dict[str, Sym] = {}
        self.composites: list[Composite] = []
        self.rank: list[int] = []
        self._by_name: dict[str, int] = {}
        self._extra: dict = {}
        self._extra_src: list = []
        self._opaque: set = set()
        self._opaque_src: list = []
        self._inv: dict[int, int] = {}
        self._elim: dict = {}
        self._star: dict[int, int] = {}
        self._nf_cache: dict = {}
        self._nf_busy: set = set()
        self._br_cache: dict = {}
        self._br_busy: set = set()
        self._decl_cache = None

    # -- construction -------------------------------------------------------
    @classmethod
    def _from_items(cls, items, params):
        sig = cls()
        sig.params = dict(params)
        declared = set()
        for it in items:
            if it[0] == "pair":
                declared.update(it[1:3])
            elif it[0] in ("hermitian", "function"):
                declared.add(it[1])

        gens = []
        by_name = {}

        def new(name, kind, **kw):
            g = dict(id=len(gens), name=name, kind=kind, **kw)
            gens.append(g)
            by_name[name] = g["id"]
            return g

        pending_deriv = []
        for it in items:
            tag = it[0]
            if tag == "pair":
                q = new(it[1], "position")
                p = new(it[2], "momentum")
                q["partner"], p["partner"] = p["id"], q["id"]
            elif tag == "hermitian":
                new(it[1], "hermitian")
            elif tag == "function":
                g = new(it[1], "function", base_name=it[2])
                if it[3] is not None:
                    if it[3] not in declared and it[3] not in by_name:
                        new(it[3], "function", base_name=it[2])
                    pending_deriv.append((g, it[3]))

        def lookup(name):
            if name not in by_name:
                raise UnknownGenerator(f"unknown generator {name!r}")
            return by_name[name]

        for g in gens:
            if g["kind"] == "function":
                b = lookup(g.pop("base_name"))
                if gens[b]["kind"] not in ("position", "hermitian"):
                    raise SignatureError(
                        f"function {g['name']!r} must be based on a position or hermitian generator")
                g["base"] = b
        for g, dname in pending_deriv:
            d = lookup(dname)
            if gens[d]["kind"] != "function" or gens[d]["base"] != g["base"]:
                raise SignatureError(f"derivative {dname!r} must be a function of the same base")
            g["derivative"] = d

        for it in items:
            if it[0] == "invertible":
                gens[lookup(it[1])]["invertible"] = True

        n_base = len(gens)
        keys = [(i, 0) for i in range(n_base)]
        for i in range(n_base):
            if gens[i].get("invertible"):
                inv = dict(id=len(gens), name=f"inv({gens[i]['name']})", kind="inverse", base=i)
                gens.append(inv)
                keys.append((i, 1))
                sig._inv[i] = inv["id"]
                sig._inv[inv["id"]] = i

        sig.generators = [GeneratorDecl(**{k: v for k, v in g.items()}) for g in gens]
        sig._by_name = {g.name: g.id for g in sig.generators}
        sig._keys = keys
        sig._reindex()

        for it in items:
            if it[0] == "opaque":
                a, b = lookup(it[1]), lookup(it[2])
                sig._opaque.add(frozenset((a, b)))
                sig._opaque_src.append((a, b))
        for it in items:
            if it[0] == "commutator":
                a, b = lookup(it[1]), lookup(it[2])
                if a == b:
                    raise SignatureError("a generator always commutes with itself")
                if (a, b) in sig._extra or (b, a) in sig._extra:
                    raise SignatureError(f"duplicate commutator [{it[1]}, {it[2]}]")
                if frozenset((a, b)) in sig._opaque:
                    raise SignatureError(f"commutator [{it[1]}, {it[2]}] declared both opaque and explicit")
                sig._extra[(a, b)] = sig._value(it[3])
                sig._extra_src.append((a, b))
        for it in items:
            if it[0] == "composite":
                sig._add_composite(it[1], sig._value(it[2]))
        return sig

    def _value(self, v) -> NCPolynomial:
        if isinstance(v, NCPolynomial):
            return NCPolynomial(self, dict(v._t))
        if callable(v):
            return v(self)
        if isinstance(v, str):
            return self.parse(v)
        return self.scalar(v)

    def _reindex(self):
        order = sorted(range(len(self.generators)), key=lambda i: self._keys[i])
        self.rank = [0] * len(order)
        for r, i in enumerate(order):
            self.rank[i] = r
        self._star = {g.id: g.id for g in self.generators}
        self._nf_cache.clear()
        self._br_cache.clear()

    def _add_composite(self, name, poly: NCPolynomial):
        if name in self._by_name or name in self.params:
            raise SignatureError(f"duplicate declaration of {name!r}")
        c0 = poly.scalar()
        rest = [(w, c) for w, c in poly.terms() if w]
        if len(rest) != 1 or len(rest[0][0]) != 1 or not rest[0][1].is_monomial():
            raise SignatureError(
                f"composite {name!r} must have the form c0 + c1*g with c1 a nonzero monomial")
        (g,), c1 = rest[0]
        if self.generators[g].is_inverse:
            raise SignatureError(f"composite {name!r} must be built on a basic generator")
        if adjoint(poly) != poly:
            raise SignatureError(f"composite {name!r} must be hermitian")
        k = len(self.composites)
        inv_id = len(self.generators)
        self.generators.append(GeneratorDecl(inv_id, f"inv({name})", "composite-inverse", base=k))
        self._keys.append((self._keys[g][0], 2 + k))
        self._reindex()
        self._by_name[f"inv({name})"] = inv_id
        self.composites.append(Composite(name, poly, inv_id, g, c0, c1))
        c1inv = c1.inverse()
        repl = {(): c1inv}
        if c0:
            repl[(inv_id,)] = -(c0 * c1inv)
        self._elim[(g, inv_id)] = repl
        self._elim[(inv_id, g)] = repl

    # -- lookup -------------------------------------------------------------
    def id_of(self, g) -> int:
        if isinstance(g, int):
            if not 0 <= g < len(self.generators):
                raise UnknownGenerator(f"unknown generator id {g}")
            return g
        try:
            return self._by_name[g]
        except KeyError:
            raise UnknownGenerator(f"unknown generator {g!r}") from None

    def __getitem__(self, name) -> GeneratorDecl:
        return self.generators[self.id_of(name)]

    def __contains__(self, name) -> bool:
        return name in self._by_name

    def name(self, gid: int) -> str:
        return self.generators[gid].name

    def partner(self, g) -> int | None:
        return self.generators[self.id_of(g)].partner

    def inverse_id(self, g) -> int | None:
        return self._inv.get(self.id_of(g))

    def composite(self, name) -> Composite:
        for c in self.composites:
            if c.name == name:
                return c
        raise UnknownGenerator(f"unknown composite {name!r}")

    def param(self, name) -> Sym:
        if name == "hbar":
            return HBAR
        try:
            return self.params[name]
        except KeyError:
            raise UnknownGenerator(f"unknown parameter {name!r}") from None

    def render_word(self, w) -> str:
        out = []
        k = 0
        while k < len(w):
            j = k
            while j < len(w) and w[j] == w[k]:
                j += 1
            nm = self.generators[w[k]].name
            out.append(nm if j - k == 1 else f"{nm}^{j - k}")
            k = j
        return "*".join(out)

    def is_normal(self, w) -> bool:
        rank = self.rank
        for a, b in zip(w, w[1:]):
            if rank[a] > rank[b] or self._inv.get(a) == b or (a, b) in self._elim:
                return False
        return True

    # -- polynomial constructors -------------------------------------------
    def zero(self) -> NCPolynomial:
        return NCPolynomial(self)

    def scalar(self, c) -> NCPolynomial:
        c = Scalar.coerce(c)
        return NCPolynomial(self, {(): c} if c else {})

    def one(self) -> NCPolynomial:
        return self.scalar(1)

    def hbar(self) -> NCPolynomial:
        return self.scalar(HBAR)

    def gen(self, g) -> NCPolynomial:
        return NCPolynomial(self, {(self.id_of(g),): Scalar.const(1)})

    def inv(self, g) -> NCPolynomial:
        if isinstance(g, str) and any(c.name == g for c in self.composites):
            return self.gen(self.composite(g).inverse)
        i = self._inv.get(self.id_of(g))
        if i is None:
            raise SignatureError(f"generator {self.name(self.id_of(g))!r} is not invertible")
        return self.gen(i)

    def word(self, *gens) -> NCPolynomial:
        ids = tuple(self.id_of(g) for g in gens)
        return NCPolynomial(self, dict(self._nf(ids)))

    def parse(self, text: str) -> NCPolynomial:
        from ..dsl.parser import parse_expression
        return parse_expression(text, self)

    # -- commutators between generators -------------------------------------
    def bracket(self, a, b) -> NCPolynomial:
        """Normal form of ``[a, b]`` for generator ids or names."""
        a, b = self.id_of(a), self.id_of(b)
        if a == b:
            return NCPolynomial(self)
        r = self._br_cache.get((a, b))
        if r is not None:
            return r
        if (a, b) in self._br_busy:
            raise NonClosedCommutator(self.name(a), self.name(b), "circular derivation")
        self._br_busy.add((a, b))
        try:
            r = self._bracket(a, b)
        finally:
            self._br_busy.discard((a, b))
        self._br_cache[(a, b)] = r
        self._br_cache[(b, a)] = -r
        return r

    def _bracket(self, a, b) -> NCPolynomial:
        if (a, b) in self._extra:
            return self._extra[(a, b)]
        if (b, a) in self._extra:
            return -self._extra[(b, a)]
        if frozenset((a, b)) in self._opaque:
            raise NonClosedCommutator(self.name(a), self.name(b), "declared opaque")
        ga, gb = self.generators[a], self.generators[b]
        if ga.partner == b:
            ih = Scalar({((HBAR, 1),): QI(0, 1)})
            return self.scalar(ih if ga.kind == "position" else -ih)
        if ga.kind == "inverse" and gb.kind == "inverse":
            return self._inverse_pair_bracket(a, b)
        if ga.is_inverse:
            if ga.kind == "inverse" and ga.base == b:
                return NCPolynomial(self)
            if ga.kind == "inverse":
                inner = self.bracket(ga.base, b)
            else:
                x = self.composites[ga.base].poly
                inner = x * self.gen(b) - self.gen(b) * x
            if not inner:
                return NCPolynomial(self)
            xi = self.gen(a)
            return -(xi * inner * xi)
        if gb.is_inverse:
            return -self.bracket(b, a)
        if ga.kind == "function" and gb.kind == "function":
            if ga.base == gb.base or not self.bracket(ga.base, gb.base):
                return NCPolynomial(self)
            raise NonClosedCommutator(ga.name, gb.name, "functions of non-commuting bases")
        if gb.kind == "function":
            return self._function_bracket(a, b)
        if ga.kind == "function":
            return -self._function_bracket(b, a)
        return NCPolynomial(self)

    def _inverse_pair_bracket(self, a, b) -> NCPolynomial:
        # [A^-1, B^-1] = A^-1 B^-1 [A, B] B^-1 A^-1 has no finite normal form
        # unless [A, B] vanishes to the order kept, i.e. is first order in an
        # infinitesimal symbol; then A and B commute inside the product.
        ga, gb = self.generators[a], self.generators[b]
        c = self.bracket(ga.base, gb.base)
        if not c:
            return NCPolynomial(self)
        if c.is_scalar() and all(any(s.infinitesimal for s, _ in m) for m, _ in c.scalar().terms()):
            w = tuple(sorted((a, a, b, b), key=lambda g: self.rank[g]))
            return NCPolynomial(self, {w: c.scalar()})
        raise NonClosedCommutator(ga.name, gb.name, "inverses of non-commuting generators")

    def _function_bracket(self, x, f) -> NCPolynomial:
        gf = self.generators[f]
        c = self.bracket(x, gf.base)
        if not c:
            return NCPolynomial(self)
        if not c.is_scalar():
            raise NonClosedCommutator(self.name(x), gf.name, "base commutator is not central")
        if gf.derivative is None:
            raise NonClosedCommutator(self.name(x), gf.name, "no derivative declared")
        return self.gen(gf.derivative).scale(c.scalar())

    # -- rewriting ----------------------------------------------------------
    def _nf(self, w: tuple, ctx: frozenset = frozenset()) -> dict:
        # ``ctx`` holds square-zero symbols the caller's coefficient already
        # carries; terms containing them vanish and are never expanded.
        key = (w, ctx) if ctx else w
        r = self._nf_cache.get(key)
        if r is not None:
            return r
        if key in self._nf_busy:
            raise AlgebraError(f"rewriting of {self.render_word(w)} does not terminate")
        self._nf_busy.add(key)
        try:
            r = self._nf_compute(w, ctx)
        finally:
            self._nf_busy.discard(key)
        self._nf_cache[key] = r
        return r

    def _expand(self, pre, terms, post, acc, ctx=frozenset()):
        for w, c in terms:
            c = c.without(ctx)
            if not c:
                continue
            for w2, c2 in self._nf(pre + w + post, ctx | c.nilpotent_support()).items():
                _add_into(acc, w2, c * c2)

    def _nf_compute(self, w: tuple, ctx: frozenset) -> dict:
        n = len(w)
        inv = self._inv
        for k in range(n - 1):
            if inv.get(w[k]) == w[k + 1]:
                return self._nf(w[:k] + w[k + 2:], ctx)
        if self._elim:
            for k in range(n - 1):
                repl = self._elim.get((w[k], w[k + 1]))
                if repl is not None:
                    acc = {}
                    self._expand(w[:k], repl.items(), w[k + 2:], acc, ctx)
                    return acc
        rank = self.rank
        for k in range(n - 1):
            a, b = w[k], w[k + 1]
            if rank[a] > rank[b]:
                acc = dict(self._nf(w[:k] + (b, a) + w[k + 2:], ctx))
                br = self.bracket(a, b)
                if br:
                    self._expand(w[:k], br.terms(), w[k + 2:], acc, ctx)
                return acc
        return {w: Scalar.const(1)}

    # -- canonical description ---------------------------------------------
    def declarations(self) -> tuple:
        """Canonical declaration list; equal iff the presentations are equal."""
        if self._decl_cache is not None:
            return self._decl_cache
        out = [("param", s.name, s.kind, s.infinitesimal) for s in self.params.values()]
        for g in self.generators:
            if g.kind == "position":
                out.append(("pair", g.name, self.name(g.partner)))
            elif g.kind == "hermitian":
                out.append(("hermitian", g.name))
            elif g.kind == "function":
                d = self.name(g.derivative) if g.derivative is not None else None
                out.append(("function", g.name, self.name(g.base), d))
            if g.kind in BASE_KINDS and g.invertible:
                out.append(("invertible", g.name))
        for a, b in self._opaque_src:
            out.append(("opaque", self.name(a), self.name(b)))
        for a, b in self._extra_src:
            out.append(("commutator", self.name(a), self.name(b), self._extra[(a, b)].render()))
        for c in self.composites:
            out.append(("composite", c.name, c.poly.render()))
        self._decl_cache = tuple(out)
        return self._decl_cache

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, AlgebraSignature):
            return NotImplemented
        return self.declarations() == other.declarations()

    def __hash__(self):
        return hash(self.declarations())

    def __repr__(self):
        return f"<AlgebraSignature {len(self.generators)} generators>"


def real_scalar_multiple_of_one(p: NCPolynomial):
    """Return the real scalar ``a`` if ``p == a*1`` with ``a`` real, else None."""
    if not p.is_scalar():
        return None
    a = p.scalar()
    return a if a and a.is_real() else None


__all__ = [
    "AlgebraSignature", "SignatureBuilder", "GeneratorDecl", "Composite",
    "real_scalar_multiple_of_one", "Fraction", "SYMBOL_KINDS",
]
