"""Recursive-descent parser for algebras, constraints, states and tasks.

Grammar (informal)::

    document   := item*
    item       := "algebra" "{" decl* "}" | decl
                | "constraint" NAME "=" expr ";"
                | "state" "{" entry* "}" | "task" "{" entry* "}"
    decl       := "pair" NAME NAME ";"
                | "hermitian" NAME ["invertible"] ";"
                | "function" NAME "of" NAME ["derivative" NAME] ["invertible"] ";"
                | "invertible" NAME ";"
                | "commutator" "[" NAME "," NAME "]" "=" (expr | "?") ";"
                | "param" NAME ["real" | "imaginary" | "complex"] ["infinitesimal"] ";"
                | "composite" NAME "=" expr ";"
    entry      := NAME ":" value ("," value)* ";"
    expr       := term (("+" | "-") term)*
    term       := unary (("*" | "/") unary)*
    unary      := ("-" | "+") unary | power
    power      := atom ["^" ["-"] INT]
    atom       := NUMBER | NAME | "i" | "hbar" | "(" expr ")"
                | "inv" "(" expr ")" | "[" expr "," expr "]"
"""
from __future__ import annotations

from fractions import Fraction

from ..algebra.poly import NCPolynomial, commutator, inverse
from ..algebra.scalars import QI, Scalar
from ..algebra.signature import SignatureBuilder
from ..errors import AlgebraError, NotInvertible, ParseError
from .document import SourceDocument, StateSpec
from .lexer import Token, tokenize

DECL_KEYWORDS = {"pair", "hermitian", "function", "invertible", "commutator", "param", "composite"}
STATE_KEYS = {"reference", "time", "degree", "hbar", "values", "moments", "means", "covariance"}


class _Stream:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, text) -> bool:
        t = self.tok
        return t.kind in ("op", "ident") and t.text == text

    def accept(self, text) -> Token | None:
        if self.at(text):
            return self.next()
        return None

    def expect(self, text) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        return self.next()

    def ident(self, what="identifier") -> Token:
        t = self.tok
        if t.kind != "ident":
            self.error(f"expected {what}")
        return self.next()

    def error(self, msg, tok: Token | None = None):
        t = tok or self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"{msg}, found {found}", t.line, t.col)


# -- expressions -------------------------------------------------------------

def _parse_expr(s: _Stream):
    node = _parse_term(s)
    while s.tok.kind == "op" and s.tok.text in "+-":
        op = s.next()
        node = ("add" if op.text == "+" else "sub", node, _parse_term(s), op)
    return node


def _parse_term(s: _Stream):
    node = _parse_unary(s)
    while s.tok.kind == "op" and s.tok.text in "*/":
        op = s.next()
        node = ("mul" if op.text == "*" else "div", node, _parse_unary(s), op)
    return node


def _parse_unary(s: _Stream):
    if s.at("-"):
        op = s.next()
        return ("neg", _parse_unary(s), op)
    if s.at("+"):
        s.next()
        return _parse_unary(s)
    return _parse_power(s)


def _parse_power(s: _Stream):
    node = _parse_atom(s)
    if s.at("^"):
        op = s.next()
        neg = bool(s.accept("-"))
        t = s.tok
        if t.kind != "number" or not t.text.isdigit():
            s.error("expected integer exponent")
        s.next()
        n = int(t.text)
        node = ("pow", node, -n if neg else n, op)
    return node


def _parse_atom(s: _Stream):
    t = s.tok
    if t.kind == "number":
        s.next()
        return ("num", Fraction(t.text), t)
    if t.kind == "ident":
        if t.text == "inv" and s.peek().text == "(":
            s.next()
            s.expect("(")
            inner = _parse_expr(s)
            s.expect(")")
            return ("inv", inner, t)
        s.next()
        return ("id", t.text, t)
    if s.at("("):
        s.next()
        inner = _parse_expr(s)
        s.expect(")")
        return inner
    if s.at("["):
        s.next()
        a = _parse_expr(s)
        s.expect(",")
        b = _parse_expr(s)
        s.expect("]")
        return ("br", a, b, t)
    s.error("expected expression")


def _node_tok(node) -> Token:
    return node[-1] if isinstance(node[-1], Token) else _node_tok(node[1])


def _fail(node, msg):
    t = _node_tok(node)
    raise ParseError(msg, t.line, t.col)


def eval_expr(node, sig) -> NCPolynomial:
    """Evaluate an expression AST against a signature."""
    kind = node[0]
    try:
        if kind == "num":
            return sig.scalar(node[1])
        if kind == "id":
            return _resolve(node, sig)
        if kind == "add":
            return eval_expr(node[1], sig) + eval_expr(node[2], sig)
        if kind == "sub":
            return eval_expr(node[1], sig) - eval_expr(node[2], sig)
        if kind == "mul":
            return eval_expr(node[1], sig) * eval_expr(node[2], sig)
        if kind == "neg":
            return -eval_expr(node[1], sig)
        if kind == "div":
            den = eval_expr(node[2], sig)
            if not den.is_scalar() or not den.scalar().is_monomial():
                _fail(node, "can only divide by a nonzero scalar monomial")
            return eval_expr(node[1], sig).scale(den.scalar().inverse())
        if kind == "pow":
            base = eval_expr(node[1], sig)
            n = node[2]
            if base.is_scalar():
                if n < 0 and not base.scalar().is_monomial():
                    _fail(node, "negative power of a non-invertible scalar")
                return sig.scalar(base.scalar() ** n)
            if n < 0:
                base = _invert(node, base, sig)
                n = -n
            return base ** n
        if kind == "inv":
            return _invert(node, eval_expr(node[1], sig), sig)
        if kind == "br":
            return commutator(eval_expr(node[1], sig), eval_expr(node[2], sig))
    except ZeroDivisionError as exc:
        _fail(node, str(exc))
    raise AssertionError(kind)


def _resolve(node, sig) -> NCPolynomial:
    name = node[1]
    if name == "i":
        return sig.scalar(QI(0, 1))
    if name == "hbar":
        return sig.hbar()
    if name in sig:
        return sig.gen(name)
    if name in sig.params:
        return sig.scalar(sig.params[name])
    for c in sig.composites:
        if c.name == name:
            return c.poly
    _fail(node, f"unknown symbol {name!r}")


def _invert(node, p: NCPolynomial, sig) -> NCPolynomial:
    try:
        return inverse(p)
    except NotInvertible as exc:
        _fail(node, str(exc))


def parse_expression(text: str, sig) -> NCPolynomial:
    s = _Stream(tokenize(text))
    node = _parse_expr(s)
    if s.tok.kind != "eof":
        s.error("unexpected trailing input")
    return eval_expr(node, sig)


# -- documents ---------------------------------------------------------------

def _src(tokens: list[Token]) -> str:
    return "".join(t.text for t in tokens)


def _parse_decl(s: _Stream, decls: list):
    kw = s.next()
    k = kw.text
    if k == "pair":
        q = s.ident("position name")
        p = s.ident("momentum name")
        decls.append(("pair", kw, q, p))
    elif k == "hermitian":
        name = s.ident()
        inv = bool(s.accept("invertible"))
        decls.append(("hermitian", kw, name, inv))
    elif k == "function":
        name = s.ident()
        s.expect("of")
        base = s.ident("base generator")
        deriv = s.ident("derivative name") if s.accept("derivative") else None
        inv = bool(s.accept("invertible"))
        decls.append(("function", kw, name, base, deriv, inv))
    elif k == "invertible":
        decls.append(("invertible", kw, s.ident()))
    elif k == "commutator":
        s.expect("[")
        a = s.ident()
        s.expect(",")
        b = s.ident()
        s.expect("]")
        s.expect("=")
        if s.accept("?"):
            decls.append(("opaque", kw, a, b))
        else:
            decls.append(("commutator", kw, a, b, _parse_expr(s)))
    elif k == "param":
        name = s.ident()
        kind = "real"
        if s.tok.kind == "ident" and s.tok.text in ("real", "imaginary", "complex"):
            kind = s.next().text
        small = bool(s.accept("infinitesimal"))
        decls.append(("param", kw, name, kind, small))
    elif k == "composite":
        name = s.ident()
        s.expect("=")
        decls.append(("composite", kw, name, _parse_expr(s)))
    s.expect(";")


def _parse_entries(s: _Stream):
    s.expect("{")
    entries = []
    while not s.at("}"):
        key = s.ident("entry name")
        s.expect(":")
        values = []
        cur = []
        depth = 0
        while True:
            t = s.tok
            if t.kind == "eof":
                s.error("unterminated entry")
            if depth == 0 and t.text in (",", ";") and t.kind == "op":
                if not cur:
                    s.error("empty value")
                values.append(cur)
                cur = []
                s.next()
                if t.text == ";":
                    break
                continue
            if t.text in "([" and t.kind == "op":
                depth += 1
            elif t.text in ")]" and t.kind == "op":
                depth -= 1
            cur.append(s.next())
        entries.append((key, values))
    s.expect("}")
    return entries


def _split_eq(toks: list[Token], key: Token):
    depth = 0
    for k, t in enumerate(toks):
        if t.kind == "op" and t.text in "([":
            depth += 1
        elif t.kind == "op" and t.text in ")]":
            depth -= 1
        elif depth == 0 and t.kind == "op" and t.text == "=":
            if k == 0 or k == len(toks) - 1:
                break
            return toks[:k], toks[k + 1:]
    raise ParseError("expected 'name = value'", toks[0].line if toks else key.line,
                     toks[0].col if toks else key.col)


def _sub_expr(toks: list[Token]):
    last = toks[-1]
    s = _Stream(list(toks) + [Token("eof", "", last.line, last.col + len(last.text))])
    node = _parse_expr(s)
    if s.tok.kind != "eof":
        s.error("unexpected input in value")
    return node


def _numeric(toks, sig) -> QI:
    node = _sub_expr(toks)
    v = eval_expr(node, sig)
    if not v.is_scalar() or not v.scalar().is_constant():
        _fail(node, "expected a numeric value")
    return v.scalar().constant()


def _word_key(toks, sig):
    node = _sub_expr(toks)
    v = eval_expr(node, sig)
    if len(v._t) != 1:
        _fail(node, "moment key must be a single normal-ordered word")
    (w, c), = v.terms()
    if c != Scalar.const(1) or not w:
        _fail(node, "moment key must be a single normal-ordered word")
    return w


def _build_state(key_tok, entries, sig) -> StateSpec:
    st = StateSpec(reference="")
    seen = set()
    for key, values in entries:
        k = key.text
        if k not in STATE_KEYS:
            raise ParseError(f"unknown state entry {k!r}", key.line, key.col)
        if k in seen:
            raise ParseError(f"duplicate state entry {k!r}", key.line, key.col)
        seen.add(k)
        if k == "reference":
            if len(values) != 1 or len(values[0]) != 1 or values[0][0].text not in sig:
                raise ParseError("reference must name a generator", key.line, key.col)
            st.reference = values[0][0].text
        elif k == "time":
            st.time = _numeric(values[0], sig)
        elif k == "degree":
            t = values[0]
            if len(t) != 1 or not t[0].text.isdigit():
                raise ParseError("degree must be a nonnegative integer", key.line, key.col)
            st.degree = int(t[0].text)
        elif k == "hbar":
            st.hbar = _numeric(values[0], sig)
        else:
            for v in values:
                lhs, rhs = _split_eq(v, key)
                val = _numeric(rhs, sig)
                if k == "values":
                    if len(lhs) != 1 or lhs[0].text not in sig.params:
                        raise ParseError("expected a declared parameter", lhs[0].line, lhs[0].col)
                    st.values.append((lhs[0].text, val))
                elif k == "means":
                    if len(lhs) != 1 or lhs[0].text not in sig:
                        raise ParseError("expected a generator", lhs[0].line, lhs[0].col)
                    st.means.append((lhs[0].text, val))
                elif k == "moments":
                    st.moments.append((_word_key(lhs, sig), val))
                else:
                    w = _word_key(lhs, sig)
                    if len(w) != 2:
                        raise ParseError("covariance key must be a product of two generators",
                                         lhs[0].line, lhs[0].col)
                    st.covariance.append((w, val))
    if not st.reference:
        raise ParseError("state needs a reference", key_tok.line, key_tok.col)
    return st


def _elaborate_algebra(decls):
    b = SignatureBuilder()
    seen = {}
    for d in decls:
        kind, kw = d[0], d[1]
        try:
            if kind == "pair":
                for t in (d[2], d[3]):
                    _claim(seen, t)
                b.pair(d[2].text, d[3].text)
            elif kind == "hermitian":
                _claim(seen, d[2])
                b.hermitian(d[2].text, invertible=d[3])
            elif kind == "function":
                _claim(seen, d[2])
                b.function(d[2].text, d[3].text, d[4].text if d[4] else None, invertible=d[5])
            elif kind == "invertible":
                b.invertible(d[2].text)
            elif kind == "param":
                _claim(seen, d[2])
                b.param(d[2].text, d[3], d[4])
            elif kind == "opaque":
                b.opaque(d[2].text, d[3].text)
            elif kind == "commutator":
                b.commutator(d[2].text, d[3].text, _deferred(d[4]))
            elif kind == "composite":
                _claim(seen, d[2])
                b.composite(d[2].text, _deferred(d[3]))
        except ParseError:
            raise
        except AlgebraError as exc:
            raise ParseError(str(exc), kw.line, kw.col) from None
    names = set(seen)
    for d in decls:
        refs = []
        if d[0] == "function":
            refs = [d[3]]
        elif d[0] in ("invertible",):
            refs = [d[2]]
        elif d[0] in ("commutator", "opaque"):
            refs = [d[2], d[3]]
        derived = {x[4].text for x in decls if x[0] == "function" and x[4] is not None}
        for r in refs:
            if r.text not in names and r.text not in derived:
                raise ParseError(f"unknown symbol {r.text!r}", r.line, r.col)
    try:
        return b.build()
    except ParseError:
        raise
    except AlgebraError as exc:
        kw = decls[0][1] if decls else Token("eof", "", 1, 1)
        raise ParseError(str(exc), kw.line, kw.col) from None


def _claim(seen, tok):
    if tok.text in ("i", "hbar", "inv", "conj"):
        raise ParseError(f"{tok.text!r} is reserved", tok.line, tok.col)
    if tok.text in seen:
        raise ParseError(f"duplicate declaration of {tok.text!r}", tok.line, tok.col)
    seen[tok.text] = tok


def _locate(exc, line, col):
    # well-formed text whose algebra fails (non-closed commutator, missing
    # inverse) stays an AlgebraError but carries the source position
    exc.line, exc.column = line, col


def _deferred(node):
    return lambda sig: eval_expr(node, sig)


def parse(text: str) -> SourceDocument:
    """Parse a complete document."""
    s = _Stream(tokenize(text))
    decls = []
    constraints = []
    state = None
    task = None
    while s.tok.kind != "eof":
        t = s.tok
        if t.kind != "ident":
            s.error("expected a section or declaration")
        if t.text == "algebra" and s.peek().text == "{":
            s.next()
            s.expect("{")
            while not s.at("}"):
                if s.tok.kind != "ident" or s.tok.text not in DECL_KEYWORDS:
                    s.error("expected a declaration")
                _parse_decl(s, decls)
            s.expect("}")
        elif t.text in DECL_KEYWORDS:
            _parse_decl(s, decls)
        elif t.text == "constraint":
            s.next()
            name = s.ident("constraint name")
            s.expect("=")
            constraints.append((name, _parse_expr(s)))
            s.expect(";")
        elif t.text == "state":
            if state is not None:
                s.error("duplicate state section")
            s.next()
            state = (t, _parse_entries(s))
        elif t.text == "task":
            if task is not None:
                s.error("duplicate task section")
            s.next()
            task = (t, _parse_entries(s))
        else:
            s.error("expected a section or declaration")

    sig = _elaborate_algebra(decls)
    doc = SourceDocument(signature=sig)
    for name, node in constraints:
        if name.text in doc.constraints or name.text in sig or name.text in sig.params:
            raise ParseError(f"duplicate declaration of {name.text!r}", name.line, name.col)
        try:
            doc.constraints[name.text] = eval_expr(node, sig)
        except AlgebraError as exc:
            t = _node_tok(node)
            _locate(exc, t.line, t.col)
            raise
        doc.positions[name.text] = (name.line, name.col)
    if state is not None:
        try:
            doc.state = _build_state(state[0], state[1], sig)
        except AlgebraError as exc:
            _locate(exc, state[0].line, state[0].col)
            raise
    if task is not None:
        doc.task = {}
        for key, values in task[1]:
            if key.text in doc.task:
                raise ParseError(f"duplicate task entry {key.text!r}", key.line, key.col)
            doc.task[key.text] = [_src(v) for v in values]
    return doc
