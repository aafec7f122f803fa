"""Command-line front end.

Exit codes: 0 ok, 1 verdict failure (the run itself succeeded), 2 parse or
usage error, 3 algebra or analysis error.  Reports go to stdout (or
``--out``), diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .constraints import INVALID, attempt_factorization, classify_clock, ConstraintSpec
from .dsl import parse, print_document
from .dsl.document import SourceDocument
from .errors import (AlgebraError, AnalysisError, ClosureTruncated, DegreeOverflow,
                     FrozenClock, ModelError, MomentError, ParseError, QFramesError)
from .identities import run_identities
from .models import (CATALOG, appendix_reduction, build_model, clock_table,
                     reduction_succeeds, run_reference_report)
from .moments import (ConstraintExtension, NumericPlan, cauchy_schwarz_check,
                      check_almost_positive, classical_limit_check, covariance, evolve,
                      gaussian_state, nonpositivity_witness, uncertainty_product_check)
from .report import ReportEnvelope

EXIT_OK, EXIT_VERDICT, EXIT_USAGE, EXIT_ALGEBRA = 0, 1, 2, 3
MODEL_ACTIONS = ("analyze", "clocks", "reduce", "show")


class UsageError(Exception):
    pass


# -- argument parsing ----------------------------------------------------------

def _common(p: argparse.ArgumentParser):
    p.add_argument("--json", action="store_true", help="emit the machine-readable report")
    p.add_argument("--hbar", type=float, default=None, help="numeric value of hbar (default 1)")
    p.add_argument("--degree", type=int, default=None, help="moment truncation degree (default 4)")
    p.add_argument("--tol", type=float, default=1e-9, help="numeric tolerance (default 1e-9)")
    p.add_argument("--tau", type=float, default=None, help="flow duration for evolve")
    p.add_argument("--dt", type=float, default=None, help="RK4 step for evolve")
    p.add_argument("--out", default=None, help="write the report (or, for evolve, the CSV trajectory) here")


def _subparsers() -> dict:
    subs = {}
    for name, help_ in (("analyze", "factorization report for every candidate reference"),
                        ("clocks", "classify clocks in the frame of each valid reference"),
                        ("check-state", "check the almost-positive conditions of a state"),
                        ("evolve", "integrate the gauge flow of a state")):
        p = argparse.ArgumentParser(prog=f"qframes {name}", description=help_)
        p.add_argument("file", help="model description file")
        _common(p)
        subs[name] = p
    p = argparse.ArgumentParser(prog="qframes model", description="built-in model catalog")
    p.add_argument("name", help=f"one of: {', '.join(sorted(CATALOG))}")
    p.add_argument("action", nargs="?", default="analyze", choices=MODEL_ACTIONS)
    p.add_argument("--param", action="append", default=[], metavar="K=V",
                   help="model parameter (repeatable)")
    _common(p)
    subs["model"] = p
    p = argparse.ArgumentParser(prog="qframes identities", description="run the identity suite")
    _common(p)
    subs["identities"] = p
    return subs


def _top_parser(subs) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qframes",
        description="Reference-frame analysis and moment states for constrained quantum systems.",
        epilog="commands: " + ", ".join(subs) + "; run 'qframes COMMAND -h' for options",
    )
    p.add_argument("--version", action="version", version=f"qframes {__version__}")
    p.add_argument("command", choices=list(subs))
    return p


def _params(items) -> dict:
    out = {}
    for item in items:
        k, sep, v = item.partition("=")
        if not sep or not k.strip():
            raise UsageError(f"--param expects K=V, got {item!r}")
        out[k.strip()] = v.strip()
    return out


# -- helpers -----------------------------------------------------------------

def _read(path: str) -> tuple[str, SourceDocument, dict]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    text = data.decode("utf-8")
    inputs = {"file": Path(path).name, "sha256": hashlib.sha256(data).hexdigest()}
    return text, parse(text), inputs


def _task_list(doc, key):
    if doc.task and key in doc.task:
        return list(doc.task[key])
    return None


def _task_float(doc, key):
    v = _task_list(doc, key)
    if v is None:
        return None
    try:
        return float(v[0])
    except ValueError:
        raise UsageError(f"task entry {key} must be a number") from None


def _auto_candidates(sig, C):
    out = []
    for g in sig.generators:
        if g.kind == "position" and C.degree_in(g.partner) > 0:
            out.append(g.name)
    return out


def _constraints(doc, names=None):
    if names:
        missing = [n for n in names if n not in doc.constraints]
        if missing:
            raise UsageError(f"unknown constraint {missing[0]!r}")
        return {n: doc.constraints[n] for n in names}
    if not doc.constraints:
        raise UsageError("document declares no constraint")
    return dict(doc.constraints)


def _factor_one(spec, z):
    try:
        return attempt_factorization(spec, z).to_dict()
    except AnalysisError as exc:
        return {"candidate": z, "verdict": INVALID, "error": f"{type(exc).__name__}: {exc}"}


def _analysis(doc):
    sig = doc.signature
    cands = _task_list(doc, "candidates")
    out = []
    for name, C in _constraints(doc, _task_list(doc, "constraint")).items():
        spec = ConstraintSpec(C, (), name=name)
        zs = cands if cands is not None else _auto_candidates(sig, C)
        for z in zs:
            if z not in sig:
                raise UsageError(f"unknown candidate {z!r}")
        out.append({"constraint": name, "expression": C.render(),
                    "reports": [_factor_one(spec, z) for z in zs]})
    return out


def _numeric_state(doc, args):
    st = doc.state
    if st is None:
        raise UsageError("document has no state section")
    names = _task_list(doc, "constraint")
    if names:
        C = _constraints(doc, names[:1])[names[0]]
    else:
        try:
            C = doc.constraint()
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
    sig = doc.signature
    degree = args.degree if args.degree is not None else (st.degree if st.degree is not None else 4)
    if degree < 0:
        raise UsageError("--degree must be nonnegative")
    hbar = args.hbar if args.hbar is not None else (float(st.hbar.re) if st.hbar is not None else 1.0)
    if not hbar > 0:
        raise UsageError("hbar must be positive")
    values = {k: complex(v) for k, v in st.values}
    missing = sorted(set(sig.params) - set(values))
    if missing:
        raise UsageError(f"state gives no value for parameter(s) {', '.join(missing)}")
    ext = ConstraintExtension(sig, st.reference, C, degree)
    plan = NumericPlan(ext, hbar, values)
    t0 = float(st.time.re) if st.time is not None else 0.0
    means = {k: float(v.re) for k, v in st.means}
    cov = {tuple(w): float(v.re) for w, v in st.covariance}
    state = gaussian_state(plan, t0, means, cov)
    if st.moments:
        m = state.m.copy()
        idx = ext.basis.reduced_index
        for w, v in st.moments:
            if w not in idx:
                raise MomentError(f"{sig.render_word(w)} is not a reduced commutant word of "
                                  f"degree <= {degree}")
            m[idx[w]] = complex(v)
        state = state.with_moments(t0, m)
    return state, {"degree": degree, "hbar": hbar, "time": t0}


def _z(v) -> dict:
    z = complex(v)
    return {"re": z.real, "im": z.imag}


def _state_summary(state) -> dict:
    sig, ext = state.sig, state.ext
    out = {}
    for w in ext.basis.reduced_words:
        if 1 <= len(w) <= 2:
            out[sig.render_word(w)] = _z(state.value(w))
    return out


# -- commands ----------------------------------------------------------------

def cmd_analyze(args):
    _, doc, inputs = _read(args.file)
    results = {"constraints": _analysis(doc)}
    bad = any(r["verdict"] == INVALID for c in results["constraints"] for r in c["reports"])
    return ReportEnvelope("analyze", inputs, results, "verdict-failure" if bad else "ok")


def _clock_rows(spec, refs, clocks):
    rows = []
    for z in refs:
        try:
            rep = attempt_factorization(spec, z)
        except AnalysisError as exc:
            rows.append({"frame": z, "verdict": INVALID, "error": str(exc), "clocks": []})
            continue
        row = {"frame": z, "verdict": rep.verdict, "clocks": []}
        if rep.verdict != INVALID:
            for u in clocks:
                if u == z:
                    continue
                try:
                    row["clocks"].append(classify_clock(u, rep.right_factor).to_dict())
                except FrozenClock:
                    row["clocks"].append({"clock": u, "classification": "frozen"})
        rows.append(row)
    return rows


def cmd_clocks(args):
    _, doc, inputs = _read(args.file)
    sig = doc.signature
    cands = _task_list(doc, "candidates")
    clocks = _task_list(doc, "clocks")
    out = []
    for name, C in _constraints(doc, _task_list(doc, "constraint")).items():
        spec = ConstraintSpec(C, (), name=name)
        refs = cands if cands is not None else _auto_candidates(sig, C)
        for z in refs + (clocks or []):
            if z not in sig:
                raise UsageError(f"unknown generator {z!r}")
        out.append({"constraint": name, "frames": _clock_rows(spec, refs, clocks or refs)})
    ok = any(r["verdict"] != INVALID for c in out for r in c["frames"])
    return ReportEnvelope("clocks", inputs, {"constraints": out}, "ok" if ok else "verdict-failure")


def _beyond_degree(f):
    # (dE)^2 needs moments of degree 2 deg H; report null when they are not stored
    try:
        return f()
    except DegreeOverflow:
        return None


def cmd_check_state(args):
    _, doc, inputs = _read(args.file)
    state, settings = _numeric_state(doc, args)
    inputs.update(settings, tol=args.tol)
    rep = check_almost_positive(state, args.tol)
    sig, ext = state.sig, state.ext
    results = {
        "reference": sig.name(ext.Z),
        "conditions": rep,
        "nonpositivity_witness": _z(nonpositivity_witness(state)),
        "reference_momentum_covariance": _z(covariance(state, sig.gen(ext.Z), sig.gen(ext.E))),
        "uncertainty_product": _beyond_degree(lambda: _z(uncertainty_product_check(state))),
        "cauchy_schwarz": cauchy_schwarz_check(state),
        "moments": _state_summary(state),
    }
    return ReportEnvelope("check-state", inputs, results, "ok" if rep["pass"] else "verdict-failure")


def cmd_evolve(args):
    _, doc, inputs = _read(args.file)
    state, settings = _numeric_state(doc, args)
    tau = args.tau if args.tau is not None else _task_float(doc, "tau")
    if tau is None:
        raise UsageError("evolve needs --tau or a task entry 'tau'")
    if not tau > 0:
        raise UsageError("tau must be positive")
    dt = args.dt if args.dt is not None else _task_float(doc, "dt")
    samples = int(_task_float(doc, "samples") or 1000)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ClosureTruncated)
        traj = evolve(state, tau, dt, samples=samples)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    eig = traj.min_eigenvalues()
    final = traj.state(len(traj) - 1)
    inputs.update(settings, tau=tau, dt=traj.dt, tol=args.tol)
    results = {
        "samples": len(traj),
        "steps": traj.nsteps,
        "final_time": float(traj.times[-1]),
        "time_residual": float(np.max(np.abs(traj.times - traj.times[0] - traj.taus))),
        "min_eigenvalue": float(eig.min()),
        "positivity_preserved": bool(eig.min() >= -args.tol),
        "final_moments": _state_summary(final),
        "notes": list(traj.notes),
    }
    try:
        results["classical_limit_residual"] = classical_limit_check(traj, "flow")["max_residual"]
    except ValueError:
        pass
    if args.out:
        _write_csv(args.out, traj, eig)
        results["trajectory_file"] = Path(args.out).name
    status = traj.status
    if status == "ok" and not results["positivity_preserved"]:
        status = "verdict-failure"
    return ReportEnvelope("evolve", inputs, results, status)


def _write_csv(path, traj, eig):
    sig = traj.plan.sig
    words = [(k, w) for k, w in enumerate(traj.plan.basis.reduced_words) if 1 <= len(w) <= 2]
    head = ["tau", "t_Z"]
    for _, w in words:
        name = sig.render_word(w)
        head += [f"re<{name}>", f"im<{name}>"]
    head.append("min_eigenvalue")
    try:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(head)
            for j in range(len(traj)):
                row = [repr(float(traj.taus[j])), repr(float(traj.times[j]))]
                for k, _ in words:
                    z = traj.moments[j, k]
                    row += [repr(float(z.real)), repr(float(z.imag))]
                row.append(repr(float(eig[j])))
                wr.writerow(row)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def cmd_model(args):
    params = _params(args.param)
    inst = build_model(args.name, params)
    inputs = {"model": args.name, "params": {k: str(v) for k, v in inst.params.items()},
              "action": args.action}
    if args.action == "show":
        target = inst.analysis_target()
        doc = SourceDocument(signature=inst.signature, constraints=dict(inst.constraints))
        results = {"document": print_document(doc)}
        if target is not inst:
            results["analysis_document"] = print_document(
                SourceDocument(signature=target.signature, constraints=dict(target.constraints)))
        results["notes"] = list(inst.notes)
        return ReportEnvelope("model", inputs, results, "ok")
    if args.action == "analyze":
        rows = [dict(r.to_dict(), constraint=n) for n, r in run_reference_report(inst)]
        results = {"reports": rows, "notes": list(inst.notes)}
        target = inst.analysis_target()
        if target is not inst:
            results["analysis_constraints"] = {k: v.render() for k, v in target.constraints.items()}
        red = inst.extras.get("redefinition")
        if red:
            results["redefinition"] = {k: v for k, v in red.items()}
        bad = any(r["verdict"] == INVALID for r in rows)
        return ReportEnvelope("model", inputs, results, "verdict-failure" if bad else "ok")
    if args.action == "clocks":
        rows = [dict(c.to_dict(), frame=z) for z, c in clock_table(inst)]
        return ReportEnvelope("model", inputs, {"clocks": rows}, "ok" if rows else "verdict-failure")
    stages = appendix_reduction(inst)
    ok = reduction_succeeds(stages)
    return ReportEnvelope("model", inputs, {"stages": [s.to_dict() for s in stages], "success": ok},
                          "ok" if ok else "verdict-failure")


def cmd_identities(args):
    rows = run_identities()
    ok = all(r["pass"] for r in rows)
    return ReportEnvelope("identities", {}, {"anchors": rows}, "ok" if ok else "verdict-failure")


COMMANDS = {
    "analyze": cmd_analyze,
    "clocks": cmd_clocks,
    "check-state": cmd_check_state,
    "evolve": cmd_evolve,
    "model": cmd_model,
    "identities": cmd_identities,
}


# -- text rendering -----------------------------------------------------------

def _text(env: ReportEnvelope) -> str:
    d = env.to_dict()
    lines = [f"{env.task}: {env.status}"]
    if env.task == "identities":
        for a in d["results"]["anchors"]:
            lines.append(f"  {'PASS' if a['pass'] else 'FAIL'}  {a['id']}: {a['summary']}")
        return "\n".join(lines) + "\n"
    _walk(d["results"], lines, 1)
    return "\n".join(lines) + "\n"


def _walk(obj, lines, depth):
    pad = "  " * depth
    if isinstance(obj, dict):
        if set(obj) == {"re", "im"}:
            lines[-1] += f" {obj['re']:.12g}{obj['im']:+.12g}i"
            return
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not (isinstance(v, dict) and set(v) == {"re", "im"}):
                lines.append(f"{pad}{k}:")
                _walk(v, lines, depth + 1)
            elif isinstance(v, dict) and set(v) == {"re", "im"}:
                lines.append(f"{pad}{k}:")
                _walk(v, lines, depth)
            elif isinstance(v, str) and "\n" in v:
                lines.append(f"{pad}{k}:")
                lines.extend(pad + "  " + s for s in v.rstrip("\n").split("\n"))
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(obj, list):
        for item in obj:
            if isinstance(item, (dict, list)):
                lines.append(f"{pad}-")
                _walk(item, lines, depth + 1)
            else:
                lines.append(f"{pad}- {item}")


def _emit(env: ReportEnvelope, args):
    out = env.to_json() if args.json else _text(env)
    target = args.out if args.out and env.task != "evolve" else None
    if target:
        try:
            Path(target).write_text(out)
        except OSError as exc:
            raise UsageError(f"cannot write {target}: {exc.strerror}") from None
    else:
        sys.stdout.write(out)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    subs = _subparsers()
    top = _top_parser(subs)
    if not argv or argv[0].startswith("-"):
        try:
            top.parse_args(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
        return EXIT_USAGE
    cmd = argv[0]
    if cmd not in subs:
        try:
            top.parse_args(argv[:1])
        except SystemExit as exc:
            return int(exc.code or 0)
    try:
        args = subs[cmd].parse_intermixed_args(argv[1:])
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        env = COMMANDS[cmd](args)
        _emit(env, args)
    except (UsageError, ParseError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AlgebraError, AnalysisError, MomentError) as exc:
        where = f"{exc.line}:{exc.column}: " if hasattr(exc, "line") else ""
        print(f"error: {where}{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ALGEBRA
    except QFramesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ALGEBRA
    except UnicodeDecodeError:
        print("error: input is not UTF-8", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_VERDICT if env.status == "verdict-failure" else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
