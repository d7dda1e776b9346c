"""The numba kernels and their numpy twins must agree."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from qgmarket import _kernels as k

finite = st.floats(-1e3, 1e3, allow_nan=False)
samples = arrays(np.float64, st.integers(1, 60), elements=finite)
small_ints = arrays(np.float64, st.integers(1, 40), elements=st.integers(-5, 5).map(float))


def test_backend_flag():
    assert k.backend() in ("numba", "numpy")
    if k.USE_NUMBA:
        assert k.ks_sorted is k.ks_sorted_nb


@given(x=samples, kappa=st.floats(1e-6, 1e3))
def test_kappa_moments(x, kappa):
    x2 = x * x
    a = k.kappa_moments_np(x2, kappa)
    b = k.kappa_moments_nb(x2, kappa)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-300)
    assert k.kappa_fraction_nb(x2, kappa) == pytest.approx(k.kappa_fraction_np(x2, kappa), rel=1e-12, abs=1e-300)


@given(x=samples, alpha=st.floats(0.6, 50), kappa=st.floats(1e-3, 1e2), dpsi=st.floats(0.0, 1.0))
def test_score_products(x, alpha, kappa, dpsi):
    x2 = x * x
    np.testing.assert_allclose(k.score_products_np(x2, alpha, kappa, dpsi),
                               k.score_products_nb(x2, alpha, kappa, dpsi), rtol=1e-10, atol=1e-12)


@given(a=small_ints, b=small_ints)
def test_ks_with_ties(a, b):
    a, b = np.sort(a), np.sort(b)
    assert k.ks_sorted_nb(a, b) == pytest.approx(k.ks_sorted_np(a, b), abs=1e-15)


@given(a=small_ints, b=small_ints, c=st.floats(0, 1))
def test_closeness_with_ties(a, b, c):
    a, b = np.sort(a), np.sort(b)
    model = np.clip(np.linspace(0.05, 0.95, a.size) * c + 0.02, 0, 1)
    assert k.closeness_count_nb(a, b, model) == k.closeness_count_np(a, b, model)


@pytest.mark.parametrize("qprime", [1.0, 1.0 + 1e-9, 1.5, 2.2])
def test_box_muller(qprime):
    rng = np.random.default_rng(3)
    u1, u2 = 1.0 - rng.random(1000), rng.random(1000)
    np.testing.assert_allclose(k.box_muller_np(u1, u2, qprime), k.box_muller_nb(u1, u2, qprime),
                               rtol=1e-12, atol=1e-14)


def test_numpy_fallback_end_to_end():
    """The env flag switches every kernel and the results agree."""
    import os
    import subprocess
    import sys
    code = ("from qgmarket import backend, estimate_q_beta\n"
            "from conftest import draw\n"
            "r = estimate_q_beta(draw(1.5, 1.0, 20000))\n"
            "print(backend(), repr(r.q), repr(r.beta))\n")
    here = os.path.dirname(__file__)
    outs = {}
    for flag in ("0", "1"):
        env = dict(os.environ, QGMARKET_DISABLE_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", code], env=env, cwd=here,
                             capture_output=True, text=True, check=True)
        name, q, beta = res.stdout.split()
        outs[name] = (float(q), float(beta))
    assert set(outs) == {"numba", "numpy"}
    assert outs["numba"][0] == pytest.approx(outs["numpy"][0], rel=1e-10)
    assert outs["numba"][1] == pytest.approx(outs["numpy"][1], rel=1e-10)
