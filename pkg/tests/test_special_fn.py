"""Special functions against mpmath / scipy oracles and closed forms."""
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, special as sps

from levyliouville.errors import DomainError
from levyliouville.special_fn import (
    bessel_k, frac_laplacian_constant, gamma, gegenbauer, gegenbauer_norm, h_s, h_s_fast, kappa1,
    kappa2, one_minus_cos_moment,
)


def test_gamma_pins():
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)
    assert gamma(1.0) == pytest.approx(1.0, rel=1e-14)
    assert gamma(5.0) == pytest.approx(24.0, rel=1e-13)


@given(st.floats(0.01, 150.0))
def test_gamma_matches_math(x):
    assert gamma(x) == pytest.approx(math.gamma(x), rel=1e-12)


@pytest.mark.parametrize("x", [0.0, -1.0, 200.0])
def test_gamma_domain(x):
    with pytest.raises(DomainError):
        gamma(x)


def test_frac_laplacian_constant_pins():
    # c_{1,1/2} = 1/pi, c_{3,1/2} = 1/pi^2 (Cauchy kernels)
    assert frac_laplacian_constant(1, 0.5) == pytest.approx(1.0 / math.pi, rel=1e-13)
    assert frac_laplacian_constant(3, 0.5) == pytest.approx(1.0 / math.pi ** 2, rel=1e-13)


@pytest.mark.parametrize("N,s", [(0, 0.5), (1, 0.0), (2, 1.0), (1.5, 0.5)])
def test_frac_laplacian_constant_domain(N, s):
    with pytest.raises(DomainError):
        frac_laplacian_constant(N, s)


@pytest.mark.parametrize("s", [0.1, 0.25, 0.5, 0.75, 0.9])
def test_constant_matches_cosine_moment(s):
    # 1/(2 c_{1,s}) is the (1 - cos t) moment = -Gamma(-2s) cos(pi s), pi/2 at s = 1/2
    exact = mp.pi / 2 if s == 0.5 else -mp.gamma(-2 * mp.mpf(s)) * mp.cos(mp.pi * s)
    assert 1.0 / (2.0 * frac_laplacian_constant(1, s)) == pytest.approx(float(exact), rel=1e-10)
    assert one_minus_cos_moment(s) == pytest.approx(float(exact), rel=1e-10)


def test_bessel_k_half_order_closed_form():
    x = np.array([0.1, 1.0, 3.0, 20.0])
    exact = np.sqrt(np.pi / (2 * x)) * np.exp(-x)
    np.testing.assert_allclose(bessel_k(0.5, x), exact, rtol=1e-13)
    assert bessel_k(0.5, 1.0) == pytest.approx(math.sqrt(math.pi / 2.0) / math.e, rel=1e-13)


@given(st.floats(0.0, 4.0, allow_subnormal=False), st.floats(1e-3, 60.0))
def test_bessel_k_matches_scipy(nu, x):
    assert bessel_k(nu, x) == pytest.approx(sps.kv(nu, x), rel=1e-11)


@pytest.mark.parametrize("nu,x", [(0.3, 1e-6), (1.7, 0.01), (0.0, 2.0), (1.0, 2.0), (2.5, 700.0)])
def test_bessel_k_matches_mpmath(nu, x):
    assert bessel_k(nu, x) == pytest.approx(float(mp.besselk(nu, x)), rel=1e-12, abs=1e-300)


def test_bessel_k_symmetric_in_order():
    x = np.linspace(0.2, 9.0, 7)
    np.testing.assert_allclose(bessel_k(-1.3, x), bessel_k(1.3, x), rtol=1e-14)


def test_bessel_k_domain():
    with pytest.raises(DomainError):
        bessel_k(0.5, 0.0)


def test_legendre_pin():
    assert gegenbauer(4, 0.5, 0.5) == pytest.approx(-0.2890625, abs=1e-15)


@given(st.integers(0, 12), st.floats(0.05, 4.0), st.floats(-1.0, 1.0))
def test_gegenbauer_matches_scipy(l, nu, t):
    assert gegenbauer(l, nu, t) == pytest.approx(sps.eval_gegenbauer(l, nu, t), rel=1e-11, abs=1e-11)


def test_gegenbauer_zero_order_is_chebyshev():
    t = np.linspace(-1, 1, 9)
    for l in range(6):
        np.testing.assert_allclose(gegenbauer(l, 0.0, t), np.cos(l * np.arccos(t)), atol=1e-14)


@given(st.integers(0, 10), st.floats(0.1, 3.0))
def test_gegenbauer_parity(l, nu):
    t = np.linspace(0, 1, 5)
    np.testing.assert_allclose(gegenbauer(l, nu, -t), (-1) ** l * gegenbauer(l, nu, t), atol=1e-12)


def test_gegenbauer_domain():
    with pytest.raises(DomainError):
        gegenbauer(2, 0.5, 1.5)
    with pytest.raises(DomainError):
        gegenbauer(-1, 0.5, 0.0)


def test_gegenbauer_norm_pins():
    assert gegenbauer_norm(1, 3) == pytest.approx(2.0 / 3.0, rel=1e-14)
    assert gegenbauer_norm(0, 3) == pytest.approx(2.0, rel=1e-14)


@pytest.mark.parametrize("N", [3, 4, 5, 6])
@pytest.mark.parametrize("l", [0, 1, 2, 5, 10])
def test_gegenbauer_norm_against_mpmath(l, N):
    lam = (N - 2) / 2
    f = lambda t: sps.eval_gegenbauer(l, lam, t) ** 2 * (1 - t * t) ** ((N - 3) / 2)
    val, _ = integrate.quad(f, -1, 1, epsabs=0, epsrel=1e-13, limit=200)
    assert gegenbauer_norm(l, N) == pytest.approx(val, rel=1e-11)


def test_kappa_constants():
    assert kappa1(3) == pytest.approx(2.0 * math.pi, rel=1e-14)
    assert kappa2(3) == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(DomainError):
        kappa2(2)


def _h_oracle(t, s):
    f1 = mp.quad(lambda r: (mp.sin(r * t) - r * t) * r ** (-1 - 2 * s), [0, 1])
    f2 = mp.quadosc(lambda r: mp.sin(r * t) * r ** (-1 - 2 * s), [1, mp.inf], omega=abs(t))
    return float(f1 + f2)


@pytest.mark.parametrize("s", [0.2, 0.5, 0.8])
@pytest.mark.parametrize("t", [0.3, 1.0, 4.0])
def test_h_s_against_mpmath(t, s):
    assert h_s(t, s) == pytest.approx(_h_oracle(t, s), rel=1e-9, abs=1e-12)


def test_h_s_odd_and_zero():
    assert h_s(0.0, 0.4) == 0.0
    t = np.array([0.2, 1.3, 5.0])
    for s in (0.3, 0.5, 0.7):
        np.testing.assert_allclose(h_s(-t, s), -h_s(t, s), rtol=1e-13)


@given(st.floats(0.05, 0.95), st.floats(-8.0, 8.0))
def test_h_s_fast_matches_quadrature(s, t):
    assert h_s_fast(t, s) == pytest.approx(h_s(t, s), rel=1e-9, abs=1e-11)


def test_h_s_smooth_away_from_origin():
    s = 0.6
    d = 1e-3
    for t0 in (1.0, -1.0):
        second = (h_s(t0 + d, s) - 2 * h_s(t0, s) + h_s(t0 - d, s)) / d ** 2
        assert np.isfinite(second) and abs(second) < 10.0
