"""Compare the compiled and NumPy RK4 kernels on moment-flow systems.

Usage: python3 benchmarks/bench_rk4.py [--repeat N]
"""
import argparse
import time

import numpy as np

from qframes import kernels
from qframes.algebra import SignatureBuilder
from qframes.kernels import fallback
from qframes.models import build_model
from qframes.moments import ConstraintExtension, NumericPlan, gaussian_state, gauge_generator


def oscillator(degree):
    sig = SignatureBuilder().pair("t", "E").pair("q", "p").build()
    C = sig.parse("E + 1/2*p^2 + 1/2*q^2")
    plan = NumericPlan(ConstraintExtension(sig, "t", C, degree))
    return plan, gaussian_state(plan, 0.0, {"q": 1.0})


def driven(degree):
    # H depends on the reference, so G is a polynomial in t
    inst = build_model("two-time")
    plan = NumericPlan(ConstraintExtension(inst.signature, "q0", inst.constraints["C"], degree),
                       values={"gamma": 0.3})
    return plan, gaussian_state(plan, 0.0, {"q1": 0.2, "q2": 1.0})


def timeit(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--steps", type=int, default=20000)
    args = ap.parse_args()
    if kernels.BACKEND != "cython":
        print("compiled kernel not built; only the fallback is available")
    print(f"{'system':<22}{'n':>5}{'steps':>8}{'compiled [ms]':>15}{'numpy [ms]':>13}{'speedup':>9}{'max diff':>11}")
    for name, build, degree in (("oscillator D=4", oscillator, 4), ("oscillator D=8", oscillator, 8),
                                ("two-time D=2", driven, 2), ("two-time D=4", driven, 4)):
        plan, st = build(degree)
        G, _ = gauge_generator(plan)
        G = np.ascontiguousarray(G)
        dt = 1e-4
        tf, xf = timeit(lambda: fallback.rk4_poly(G, st.m, st.t, dt, args.steps, 100), args.repeat)
        if kernels.BACKEND == "cython":
            tc, xc = timeit(lambda: kernels.rk4_poly(G, st.m, st.t, dt, args.steps, 100), args.repeat)
            diff = float(np.max(np.abs(xc - xf)))
            print(f"{name:<22}{G.shape[1]:>5}{args.steps:>8}{tc * 1e3:>15.2f}{tf * 1e3:>13.2f}"
                  f"{tf / tc:>9.1f}{diff:>11.1e}")
        else:
            print(f"{name:<22}{G.shape[1]:>5}{args.steps:>8}{'-':>15}{tf * 1e3:>13.2f}")


if __name__ == "__main__":
    main()
