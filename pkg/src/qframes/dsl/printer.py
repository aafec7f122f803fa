"""Canonical printer; ``parse(print_document(doc)) == doc``."""
from __future__ import annotations

from ..algebra.scalars import QI, render_qi


def _num(c: QI) -> str:
    if not c.im and c.re < 0:
        return f"-{render_qi(-c)}"
    if not c.re and c.im < 0:
        return f"-{render_qi(-c)}"
    return render_qi(c)


def print_signature(sig) -> str:
    lines = []
    for d in sig.declarations():
        k = d[0]
        if k == "param":
            lines.append(f"  param {d[1]} {d[2]}{' infinitesimal' if d[3] else ''};")
        elif k == "pair":
            lines.append(f"  pair {d[1]} {d[2]};")
        elif k == "hermitian":
            lines.append(f"  hermitian {d[1]};")
        elif k == "function":
            deriv = f" derivative {d[3]}" if d[3] else ""
            lines.append(f"  function {d[1]} of {d[2]}{deriv};")
        elif k == "invertible":
            lines.append(f"  invertible {d[1]};")
        elif k == "opaque":
            lines.append(f"  commutator [{d[1]}, {d[2]}] = ?;")
        elif k == "commutator":
            lines.append(f"  commutator [{d[1]}, {d[2]}] = {d[3]};")
        elif k == "composite":
            lines.append(f"  composite {d[1]} = {d[2]};")
    return "algebra {\n" + "\n".join(lines) + ("\n" if lines else "") + "}\n"


def print_document(doc) -> str:
    sig = doc.signature
    out = [print_signature(sig)]
    for name, c in doc.constraints.items():
        out.append(f"constraint {name} = {c.render()};\n")
    st = doc.state
    if st is not None:
        body = [f"  reference: {st.reference};"]
        if st.time is not None:
            body.append(f"  time: {_num(st.time)};")
        if st.degree is not None:
            body.append(f"  degree: {st.degree};")
        if st.hbar is not None:
            body.append(f"  hbar: {_num(st.hbar)};")
        if st.values:
            body.append("  values: " + ", ".join(f"{k} = {_num(v)}" for k, v in st.values) + ";")
        for key, items in (("moments", st.moments), ("covariance", st.covariance)):
            if items:
                body.append(f"  {key}: " + ", ".join(
                    f"{sig.render_word(w)} = {_num(v)}" for w, v in items) + ";")
        if st.means:
            body.append("  means: " + ", ".join(f"{k} = {_num(v)}" for k, v in st.means) + ";")
        out.append("state {\n" + "\n".join(body) + "\n}\n")
    if doc.task is not None:
        body = [f"  {k}: {', '.join(v)};" for k, v in doc.task.items()]
        out.append("task {\n" + "\n".join(body) + ("\n" if body else "") + "}\n")
    return "".join(out)
