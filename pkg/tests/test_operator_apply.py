"""Pointwise operator application, decay bound and distributional pairing."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from levyliouville.errors import DomainError, TailBoundExceededError
from levyliouville.measures import (
    anisotropic, fractional_laplacian, intermediate_long_wave, reflect, relativistic, tempered,
    user_radial,
)
from levyliouville.operator_apply import (
    DEFAULT_PAIRING, ApplyConfig, apply, apply_report, decay_bound_check, normalized_residual,
    pairing,
)
from levyliouville.polynomial import ComplexPolynomial
from levyliouville.sphere import catalogue
from levyliouville.testfunctions import (
    CandidateSolution, GaussianPoly, Polynomial, Trig, gaussian,
)

SYMBOLS_1D = {
    "fl": lambda s: (fractional_laplacian(1, s), lambda k: np.abs(k) ** (2 * s)),
    "rel": lambda s: (relativistic(1, s), lambda k: (k * k + 1) ** s - 1),
    "ilw": lambda s: (intermediate_long_wave(0.5),
                      lambda k: np.where(k == 0, 0.0, k / np.tanh(np.pi * k / 2 + 1e-300)) - 2 / np.pi),
}


def _spectral_1d(eta, x0, w=1.0):
    # (1/pi) int_0^inf eta(k) phi_hat(k) cos(k x0) dk for an even Gaussian
    f = lambda k: eta(np.array([k]))[0] * w * math.sqrt(2 * math.pi) * math.exp(-0.5 * (w * k) ** 2) * math.cos(k * x0)
    val, _ = integrate.quad(f, 0, 40, epsabs=1e-13, epsrel=0.0, limit=400)
    return val / math.pi


def test_fractional_half_on_cosine():
    u = Trig(1, [([1.0], 1.0, 0.0)])
    assert apply(fractional_laplacian(1, 0.5), u, [0.0]) == pytest.approx(1.0, rel=1e-8)


@pytest.mark.parametrize("s", [0.3, 0.5, 0.75])
def test_cosine_eigenfunction(s):
    k = 1.7
    u = Trig(1, [([k], 1.0, 0.5)])
    X = np.array([[0.0], [0.9], [-2.3]])
    np.testing.assert_allclose(apply(fractional_laplacian(1, s), u, X), k ** (2 * s) * u(X), rtol=1e-8, atol=1e-10)


def test_gaussian_at_origin_closed_form():
    # (-Delta)^s e^{-x^2/2} at 0 = 2^s Gamma(s + 1/2) / sqrt(pi)
    for s in (0.25, 0.75):
        exact = 2 ** s * math.gamma(s + 0.5) / math.sqrt(math.pi)
        assert apply(fractional_laplacian(1, s), gaussian(1), [0.0]) == pytest.approx(exact, rel=1e-8)
    # N = 2: 2^s Gamma(s + 1)
    assert apply(fractional_laplacian(2, 0.4), gaussian(2), [0.0, 0.0]) == pytest.approx(2 ** 0.4 * math.gamma(1.4), rel=1e-8)


@pytest.mark.parametrize("name,s", [("fl", 0.3), ("fl", 0.8), ("rel", 0.5), ("ilw", None)])
@pytest.mark.parametrize("x0", [0.0, 1.3, 6.0])
def test_apply_matches_spectral_oracle_1d(name, s, x0):
    m, eta = SYMBOLS_1D[name](s if s is not None else 0.5)
    assert apply(m, gaussian(1), [x0]) == pytest.approx(_spectral_1d(eta, x0), rel=1e-7, abs=1e-10)


@pytest.mark.parametrize("r", [0.0, 0.8, 3.0, 12.0])
def test_apply_matches_hankel_oracle_2d(r):
    s = 0.6
    f = lambda k: k ** (2 * s) * math.exp(-0.5 * k * k) * special.j0(k * r) * k
    exact, _ = integrate.quad(f, 0, 40, epsabs=1e-14, limit=400)
    got = apply(fractional_laplacian(2, s), gaussian(2), [r / math.sqrt(2), r / math.sqrt(2)])
    assert got == pytest.approx(exact, rel=1e-7, abs=1e-10)


def test_user_radial_matches_hand_quadrature():
    # tempered alpha = 1, lam = 1 in 1-D against a direct integral of the defining formula
    m = user_radial(1, tempered(1.0, 1.0, 1.0), 0.5)
    phi = gaussian(1)
    x0 = 0.4
    g = lambda t: math.exp(-t * t / 2)
    dg = -x0 * g(x0)
    k = lambda y: abs(y) ** -2.0 * math.exp(-abs(y))
    f = lambda y: (g(x0) - g(x0 + y) + (y * dg if abs(y) < 1 else 0.0)) * k(y)
    val = sum(integrate.quad(f, a, b, epsabs=1e-13, limit=400)[0] for a, b in ((-50, -1), (-1, 0), (0, 1), (1, 50)))
    assert apply(m, phi, [x0]) == pytest.approx(val, rel=1e-8)


@settings(max_examples=8)
@given(st.floats(-4, 4), st.floats(0.5, 2.0), st.floats(-3, 3))
def test_linearity_and_translation(h, a, x0):
    m = fractional_laplacian(1, 0.7)
    f = GaussianPoly(1, {(1,): 1.0}, center=[0.2])
    g = gaussian(1, width=0.7)
    lhs = apply(m, a * f + g, [x0])
    assert lhs == pytest.approx(a * apply(m, f, [x0]) + apply(m, g, [x0]), rel=1e-10, abs=1e-12)
    assert apply(m, f.translated([h]), [x0 + h]) == pytest.approx(apply(m, f, [x0]), rel=1e-8, abs=1e-10)


def test_adjoint_identity_anisotropic():
    # int psi L_nu phi = int phi L_{nu~} psi for an odd (non-symmetric) density
    m = anisotropic(catalogue("tilt", 2, eps=0.6), 0.6)
    phi = GaussianPoly(2, {(1, 0): 1.0, (0, 0): 0.3}, center=[0.3, 0.0], width=0.9)
    psi = gaussian(2, center=[-0.4, 0.2], width=0.8)
    ax = np.linspace(-7, 7, 57)
    X = np.stack(np.meshgrid(ax, ax, indexing="ij"), -1).reshape(-1, 2)
    w = (ax[1] - ax[0]) ** 2
    lhs = w * np.dot(psi(X), apply(m, phi, X))
    rhs = w * np.dot(phi(X), apply(reflect(m), psi, X))
    assert lhs == pytest.approx(rhs, rel=1e-6)


def test_polynomials_annihilated():
    # constants for every kernel; affine functions for s > 1/2
    one = Polynomial(1, {(0,): 1.0})
    lin = Polynomial(2, {(1, 0): 2.0, (0, 1): -1.0, (0, 0): 3.0})
    X = np.array([[0.0, 0.0], [5.0, -2.0]])
    assert np.max(np.abs(apply(relativistic(1, 0.5), one, np.array([[0.3]])))) < 1e-12
    assert np.max(np.abs(apply(fractional_laplacian(2, 0.75), lin, X))) < 1e-10


def test_apply_dimension_mismatch():
    with pytest.raises(DomainError):
        apply(fractional_laplacian(2, 0.5), gaussian(1), [0.0])


def test_plane_wave_power_kernel_2d_unsupported():
    u = Trig(2, [([1.0, 0.0], 1.0, 0.0)])
    with pytest.raises(TailBoundExceededError):
        apply(fractional_laplacian(2, 0.5), u, [0.0, 0.0])


def test_apply_config_validation():
    with pytest.raises(DomainError):
        ApplyConfig(tol=0.0)
    with pytest.raises(DomainError):
        ApplyConfig(n_gl=1)


def test_apply_report_tail_bound_small():
    res = apply_report(fractional_laplacian(1, 0.5), gaussian(1), np.array([[0.0], [30.0]]))
    assert res.tail_bound <= 1e-8


@pytest.mark.parametrize("m", [fractional_laplacian(1, 0.4), relativistic(2, 0.5), intermediate_long_wave(0.5)])
def test_decay_bound_check(m):
    rep = decay_bound_check(m, gaussian(m.N))
    assert rep.passed and rep.outer_slope <= 0.05


def test_pairing_constant_vanishes():
    u = CandidateSolution(Polynomial(1, {(0,): 1.0}))
    for m in (fractional_laplacian(1, 0.3), relativistic(1, 0.5)):
        assert normalized_residual(u, m, None, gaussian(1)) < 1e-8


def test_pairing_matches_spectral_for_cosine():
    # <cos, (-Delta)^s phi> = |k|^{2s} <cos, phi> = |k|^{2s} Re phi_hat(k)
    s, k = 0.6, 1.3
    u = CandidateSolution(Trig(1, [([k], 1.0, 0.0)]))
    phi = gaussian(1, center=[0.4])
    got = pairing(u, fractional_laplacian(1, s), None, phi).value
    exact = k ** (2 * s) * phi.fourier([k]).real
    assert abs(got - exact) < 1e-7


def test_pairing_inadmissible_growth():
    u = CandidateSolution(Polynomial(1, {(1,): 1.0}))
    res = pairing(u, fractional_laplacian(1, 0.4), None, gaussian(1))
    assert not res.admissible and math.isinf(abs(res.value))
    assert math.isinf(normalized_residual(u, fractional_laplacian(1, 0.4), None, gaussian(1)))


def test_pairing_with_differential_part():
    # u = cos(x) solves (-Delta)^s u - u = 0
    u = CandidateSolution(Trig(1, [([1.0], 1.0, 0.0)]))
    P = ComplexPolynomial.constant(1, -1.0)
    r = normalized_residual(u, fractional_laplacian(1, 0.4), P, gaussian(1, center=[0.2]), DEFAULT_PAIRING)
    assert r < 1e-6
