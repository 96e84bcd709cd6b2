"""Compiled and numpy backends of the far-field kernels agree."""
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from levyliouville import _kernels
from levyliouville._accel import HAVE_NUMBA
from levyliouville.measures import (
    anisotropic, fractional_laplacian, intermediate_long_wave, relativistic, tempered, user_radial,
)
from levyliouville.operator_apply import ApplyConfig, apply, box_rule, kernel_spec
from levyliouville.sphere import catalogue
from levyliouville.testfunctions import GaussianPoly, gaussian

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba backend not available")


@given(st.floats(-6, 6))
def test_chi_scalar_matches_vector(r):
    assert _kernels.chi_scalar(r) == pytest.approx(float(_kernels.chi(np.array([r]))[0]), abs=1e-15)


def test_chi_partition():
    r = np.array([0.0, 1.0, 1.0 + _kernels.CHI_WIDTH, 10.0])
    np.testing.assert_array_equal(_kernels.chi(r), [1.0, 1.0, 0.0, 0.0])
    t = np.linspace(1.01, 3.99, 50)
    assert np.all(np.diff(_kernels.chi(t)) <= 0)
    # symmetric about the midpoint of the transition
    mid = 1.0 + 0.5 * _kernels.CHI_WIDTH
    np.testing.assert_allclose(_kernels.chi(mid - (t - mid)), 1.0 - _kernels.chi(t), atol=1e-15)


@needs_numba
@pytest.mark.parametrize("m", [
    fractional_laplacian(1, 0.4),
    fractional_laplacian(2, 0.7),
    relativistic(2, 0.5),
    intermediate_long_wave(0.5),
    user_radial(1, tempered(1.0, 1.2, 0.3), 0.6),
    anisotropic(catalogue("tilt", 2, eps=0.5), 0.5),
])
def test_far_sum_backends_agree(m):
    rng = np.random.default_rng(11)
    phi = gaussian(m.N)
    z, wz = box_rule(phi)
    X = rng.uniform(-8, 8, size=(50, m.N))
    kern = kernel_spec(m)
    a = _kernels.far_sum(X, z, wz * phi(z), kern, "numba")
    b = _kernels.far_sum(X, z, wz * phi(z), kern, "numpy")
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-15)


@needs_numba
@settings(max_examples=10)
@given(st.integers(0, 3), st.integers(0, 3))
def test_gauss_poly_backends_agree(b0, b1):
    g = GaussianPoly(2, {(0, 0): 1.0, (2, 1): 0.5, (1, 3): -0.25}, width=1.3)
    qc, coef = g._tables((b0, b1))
    T = np.random.default_rng(5).normal(size=(400, 2))
    a = _kernels.gauss_poly(T, qc, coef, 0.5 / g.width ** 2, "numba")
    b = _kernels.gauss_poly(T, qc, coef, 0.5 / g.width ** 2, "numpy")
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-15)


@needs_numba
def test_apply_backends_agree():
    m = fractional_laplacian(2, 0.5)
    X = np.array([[0.0, 0.0], [1.5, -2.0], [7.0, 1.0]])
    a = apply(m, gaussian(2), X, ApplyConfig(backend="numba"))
    b = apply(m, gaussian(2), X, ApplyConfig(backend="numpy"))
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_environment_selects_numpy_backend():
    env = dict(os.environ, LEVYLIOUVILLE_BACKEND="numpy")
    code = ("from levyliouville._accel import BACKEND; "
            "from levyliouville.measures import fractional_laplacian; "
            "from levyliouville.operator_apply import apply; "
            "from levyliouville.testfunctions import gaussian; "
            "print(BACKEND, repr(apply(fractional_laplacian(1, 0.5), gaussian(1), [0.0])))")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout.split()
    assert out[0] == "numpy"
    assert float(out[1]) == pytest.approx(np.sqrt(2 / np.pi), rel=1e-8)


def test_invalid_backend_rejected():
    env = dict(os.environ, LEVYLIOUVILLE_BACKEND="fortran")
    proc = subprocess.run([sys.executable, "-c", "import levyliouville"], env=env, capture_output=True, text=True)
    assert proc.returncode != 0 and "LEVYLIOUVILLE_BACKEND" in proc.stderr
