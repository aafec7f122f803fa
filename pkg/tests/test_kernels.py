import os
import subprocess
import sys

import numpy as np
import pytest

from qframes import kernels
from qframes.kernels import fallback

BACKENDS = [fallback.rk4_poly, kernels.rk4_poly]


def random_generator(rng, K, n, density=0.3):
    G = rng.normal(size=(K, n, n)) + 1j * rng.normal(size=(K, n, n))
    G *= rng.random((K, n, n)) < density
    return G / n


@pytest.mark.parametrize("kern", BACKENDS)
def test_constant_generator_matches_exponential(kern):
    rng = np.random.default_rng(1)
    G = random_generator(rng, 1, 8)
    x0 = rng.normal(size=8) + 0j
    out = kern(G, x0, 0.0, 1e-3, 1000, 250)
    assert out.shape == (5, 8)
    vals, vecs = np.linalg.eig(G[0])
    exact = vecs @ (np.exp(vals) * np.linalg.solve(vecs, x0))
    assert np.allclose(out[-1], exact, atol=1e-10)
    assert np.array_equal(out[0], x0)


@pytest.mark.parametrize("kern", BACKENDS)
def test_scalar_polynomial_in_time(kern):
    # dx/dt = (a + b t + c t^2) x  ->  x = exp(a t + b t^2/2 + c t^3/3)
    a, b, c = -0.3, 0.7, 0.2j
    G = np.array([[[a]], [[b]], [[c]]], dtype=complex)
    out = kern(G, np.array([1 + 0j]), 0.0, 1e-3, 2000, 2000)
    t = 2.0
    assert out[-1, 0] == pytest.approx(np.exp(a * t + b * t ** 2 / 2 + c * t ** 3 / 3), abs=1e-10)


def test_backends_agree_on_random_systems():
    rng = np.random.default_rng(7)
    for K, n in [(1, 5), (2, 12), (4, 20)]:
        G = random_generator(rng, K, n)
        x0 = rng.normal(size=n) + 1j * rng.normal(size=n)
        a = fallback.rk4_poly(G, x0, 0.25, 2e-3, 300, 7)
        b = kernels.rk4_poly(G, x0, 0.25, 2e-3, 300, 7)
        assert a.shape == b.shape == (300 // 7 + 1, n)
        assert np.max(np.abs(a - b)) < 1e-12


def test_input_not_modified():
    G = np.zeros((1, 3, 3), dtype=complex)
    G[0] = np.eye(3)
    x0 = np.ones(3, dtype=complex)
    for kern in BACKENDS:
        kern(G, x0, 0.0, 0.1, 3, 1)
        assert np.array_equal(x0, np.ones(3))


def test_environment_forces_fallback():
    env = dict(os.environ, QFRAMES_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import qframes.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    assert kernels.BACKEND in ("cython", "python")
