"""Sphere harmonics, Funk-Hecke eigenvalues, cosine transforms and the density checks."""
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from levyliouville.errors import DomainError, InconclusiveError
from levyliouville.special_fn import h_s
from levyliouville.sphere import (
    AliasingWarning, SphereFunction, catalogue, cosine_transform, expand, funk_hecke_mu, harmonic_basis,
    im_symbol_transform, mu_decay_report, positivity_check, sobolev_check, sphere_rule,
)

from oracles import circle_integral, zonal_sphere_integral


@pytest.mark.parametrize("N,L", [(2, 6), (3, 5)])
def test_basis_orthonormal(N, L):
    pts, w = sphere_rule(N, L + 1)
    B = harmonic_basis(N, L, pts)
    np.testing.assert_allclose(B.T @ (w[:, None] * B), np.eye(B.shape[1]), atol=1e-13)


def test_sphere_rule_area():
    for N, area in ((2, 2 * math.pi), (3, 4 * math.pi)):
        assert sphere_rule(N, 4)[1].sum() == pytest.approx(area, rel=1e-14)


@given(st.lists(st.floats(-1, 1), min_size=17, max_size=17))
def test_expand_round_trip(coef):
    a = SphereFunction(2, coef)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AliasingWarning)
        b = expand(a, 2, a.L_max)
    np.testing.assert_allclose(b.coefficients, a.coefficients, atol=1e-12)


def test_reflected_and_parts():
    a = catalogue("tilt", 3, eps=0.4)
    th = np.array([[0.6, 0.0, 0.8], [0.0, -1.0, 0.0]])
    np.testing.assert_allclose(a.reflected()(th), a(-th), atol=1e-14)
    np.testing.assert_allclose(a.even()(th) + a.odd()(th), a(th), atol=1e-14)
    assert a.has_odd_part() and not a.even().has_odd_part()


def test_catalogue_values():
    psi = 0.3
    th = np.array([math.cos(psi), math.sin(psi)])
    assert catalogue("cos2", 2, eps=0.2)(th) == pytest.approx(1 + 0.2 * math.cos(2 * psi), rel=1e-14)
    assert catalogue("uniform", 3)(np.array([0.0, 0.0, 1.0])) == pytest.approx(1.0, rel=1e-14)
    vm = catalogue("vonmises", 2, kappa=1.0)
    assert vm(th) == pytest.approx(math.exp(math.cos(psi)), rel=1e-12)
    with pytest.raises(DomainError):
        catalogue("cos2", 3)
    with pytest.raises(DomainError):
        catalogue("nope", 2)


def test_mu_pins():
    assert funk_hecke_mu(lambda t: t, 1, 3) == pytest.approx(4 * math.pi / 3, rel=1e-12)
    assert funk_hecke_mu(lambda t: np.ones_like(t), 0, 3) == pytest.approx(4 * math.pi, rel=1e-13)
    assert funk_hecke_mu(lambda t: np.ones_like(t), 0, 2) == pytest.approx(2 * math.pi, rel=1e-13)
    assert funk_hecke_mu(lambda t: t, 2, 3) == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(DomainError):
        funk_hecke_mu(lambda t: t, -1, 3)


@pytest.mark.parametrize("l", [0, 1, 2, 3, 6])
def test_funk_hecke_against_direct_quadrature(l):
    xi = np.array([0.3, -0.5, 0.8])
    axis = np.array([1.0, 0.2, -0.4])
    axis /= np.linalg.norm(axis)
    Y = special.eval_legendre(l, xi @ axis / np.linalg.norm(xi))
    for h in (lambda t: t ** 3 - t, np.exp):
        direct = zonal_sphere_integral(h, l, xi, axis)
        assert funk_hecke_mu(h, l, 3) * Y == pytest.approx(direct, abs=1e-11)


@pytest.mark.parametrize("s", [0.25, 0.5, 0.8])
def test_cosine_transform_uniform(s):
    one2 = catalogue("uniform", 2)
    one3 = catalogue("uniform", 3)
    xi2 = np.array([0.6, 0.8])
    xi3 = np.array([0.0, 0.6, 0.8])
    # 4 int_0^{pi/2} cos^{2s} = 2 B(s + 1/2, 1/2)
    exact2 = 2 * math.gamma(s + 0.5) * math.gamma(0.5) / math.gamma(s + 1)
    assert cosine_transform(one2, s, xi2) == pytest.approx(exact2, rel=1e-10)
    assert cosine_transform(one3, s, xi3) == pytest.approx(4 * math.pi / (2 * s + 1), rel=1e-10)


def test_cosine_transform_pin():
    assert cosine_transform(catalogue("uniform", 2), 0.5, np.array([1.0, 0.0])) == pytest.approx(4.0, rel=1e-12)


@settings(max_examples=10)
@given(st.floats(0.0, 2 * math.pi), st.floats(0.1, 0.9))
def test_cosine_transform_anisotropic_circle(angle, s):
    a = catalogue("cos2", 2, eps=0.5)
    xi = np.array([math.cos(angle), math.sin(angle)])
    f = lambda p: abs(math.cos(p - angle)) ** (2 * s) * (1 + 0.5 * math.cos(2 * p))
    exact = circle_integral(f, kinks=(angle + math.pi / 2, angle + 3 * math.pi / 2))
    assert cosine_transform(a, s, xi) == pytest.approx(exact, rel=1e-9)


@pytest.mark.parametrize("s,rho", [(0.3, 0.7), (0.5, 2.0), (0.75, 5.0)])
def test_im_symbol_transform_circle(s, rho):
    a = catalogue("tilt", 2, eps=0.5)
    angle = 0.4
    zeta = np.array([math.cos(angle), math.sin(angle)])
    f = lambda p: h_s(rho * math.cos(p - angle), s) * (1 + 0.5 * math.cos(p))
    exact = circle_integral(f, kinks=(angle + math.pi / 2, angle + 3 * math.pi / 2))
    assert im_symbol_transform(a, s, rho, zeta) == pytest.approx(exact, rel=1e-8)


def test_mu_decay_report():
    rep = mu_decay_report(lambda t: np.abs(t) ** 0.8, N=3)
    assert rep.passed
    assert rep.degrees[-1] == 32
    with pytest.raises(DomainError):
        mu_decay_report(lambda t: t, N=2)


def test_positivity():
    assert positivity_check(catalogue("cos2", 2, eps=0.3), 0.5).passed
    assert positivity_check(catalogue("tilt", 3, eps=0.5), 0.7).passed
    assert not positivity_check(catalogue("cos2_pure", 2), 0.5).passed


def _circle_coefficients(even_decay, odd_decay, L=32):
    c = np.zeros(2 * L + 1)
    c[0] = 1.0
    for l in range(1, L + 1):
        c[2 * l - 1] = l ** (-float(even_decay if l % 2 == 0 else odd_decay))
    return SphereFunction(2, c)


def test_sobolev_pass_and_fail():
    assert sobolev_check(_circle_coefficients(6, 6), 0.5).passed
    assert not sobolev_check(_circle_coefficients(6, 1), 0.5).passed
    assert sobolev_check(catalogue("vonmises", 2, kappa=1.0), 0.5).passed


def test_sobolev_needs_enough_degrees():
    with pytest.raises(InconclusiveError):
        sobolev_check(SphereFunction(2, np.ones(9)), 0.5)
