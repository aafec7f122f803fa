"""NumPy implementation of the RK4 kernel, used when the extension is absent."""
import numpy as np


def _rhs(G, t, x):
    acc = G[-1] @ x
    for k in range(G.shape[0] - 2, -1, -1):
        acc = acc * t + G[k] @ x
    return acc


def rk4_poly(G, x0, t0, dt, nsteps, stride):
    G = np.ascontiguousarray(G, dtype=complex)
    x = np.array(x0, dtype=complex, copy=True)
    out = np.empty((nsteps // stride + 1, x.size), dtype=complex)
    out[0] = x
    h2 = dt / 2
    s = 0
    for step in range(nsteps):
        t = t0 + step * dt
        k1 = _rhs(G, t, x)
        k2 = _rhs(G, t + h2, x + h2 * k1)
        k3 = _rhs(G, t + h2, x + h2 * k2)
        k4 = _rhs(G, t + dt, x + dt * k3)
        x = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if (step + 1) % stride == 0:
            s += 1
            out[s] = x
    return out
