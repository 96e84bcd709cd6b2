"""Closed-form test functions: derivatives, transforms, translations and norms."""
import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st
from scipy import integrate, optimize

from levyliouville.errors import DomainError, InsufficientGridError
from levyliouville.polynomial import ComplexPolynomial
from levyliouville.testfunctions import (
    Bump, CandidateSolution, GaussianPoly, Polynomial, Trig, apply_differential, gaussian,
    multi_indices, sks_norm,
)

x, y = sp.symbols("x y", real=True)


def _sym_gauss2d(terms, c, w):
    e = sum(v * (x - c[0]) ** a[0] * (y - c[1]) ** a[1] for a, v in terms.items())
    return e * sp.exp(-((x - c[0]) ** 2 + (y - c[1]) ** 2) / (2 * w ** 2))


@pytest.mark.parametrize("beta", [(0, 0), (1, 0), (0, 2), (2, 1), (3, 3)])
def test_gaussian_poly_derivatives_against_sympy(beta):
    terms = {(0, 0): 0.5, (1, 0): 1.0, (1, 2): -0.3}
    c, w = (0.3, -0.2), 0.8
    phi = GaussianPoly(2, terms, center=c, width=w)
    expr = sp.diff(_sym_gauss2d(terms, c, w), x, beta[0], y, beta[1])
    f = sp.lambdify((x, y), expr, "numpy")
    P = np.array([[0.1, 0.4], [-1.2, 0.7], [2.0, -1.5]])
    np.testing.assert_allclose(phi.derivative(beta, P), f(P[:, 0], P[:, 1]), rtol=1e-12, atol=1e-13)


@pytest.mark.parametrize("terms", [{(0,): 1.0}, {(1,): 1.0, (0,): 0.5}, {(3,): -0.2, (2,): 1.0}])
def test_gaussian_poly_fourier_against_quad(terms):
    phi = GaussianPoly(1, terms, center=[0.4], width=0.9)
    for xi in (0.0, 0.7, -2.5):
        re, _ = integrate.quad(lambda t: phi([t]) * math.cos(xi * t), -15, 15, epsabs=1e-14, limit=200)
        im, _ = integrate.quad(lambda t: -phi([t]) * math.sin(xi * t), -15, 15, epsabs=1e-14, limit=200)
        assert abs(phi.fourier([xi]) - complex(re, im)) < 1e-12


def test_gaussian_moments():
    phi = GaussianPoly(1, {(0,): 1.0}, width=1.5)
    assert phi.moment((0,)) == pytest.approx(1.5 * math.sqrt(2 * math.pi), rel=1e-14)
    assert phi.moment((2,)) == pytest.approx(1.5 ** 3 * math.sqrt(2 * math.pi), rel=1e-14)
    assert phi.moment((1,)) == 0.0


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-2, 2))
def test_translation_identities(h, x0, x1):
    g = GaussianPoly(1, {(1,): 1.0, (0,): 0.2}, center=[0.1])
    t = Trig(1, [([1.7], 0.3, -1.1)])
    p = Polynomial(1, {(3,): 1.0, (1,): -2.0, (0,): 0.5})
    for f in (g, t, p):
        assert f.translated([h])([x0 + h]) == pytest.approx(f([x0]), rel=1e-9, abs=1e-9)
    b = Bump(2, center=[0.2, 0.0], width=1.2)
    assert b.translated([h, 0.0])([x1 + h, 0.1]) == pytest.approx(b([x1, 0.1]), rel=1e-12, abs=1e-300)


def test_bump_support_and_derivative():
    b = Bump(1, width=2.0)
    assert b([2.0]) == 0.0 and b([-2.5]) == 0.0
    assert b([0.0]) == pytest.approx(math.exp(-1.0), rel=1e-15)
    h = 1e-5
    fd = (b([0.7 + h]) - b([0.7 - h])) / (2 * h)
    assert b.derivative((1,), [0.7]) == pytest.approx(fd, rel=1e-8)


def test_trig_derivative():
    t = Trig(2, [([1.0, 2.0], 1.0, 0.5)])
    X = np.array([[0.3, -0.4]])
    ph = 0.3 - 0.8
    assert t.derivative((1, 1), X)[0] == pytest.approx(2.0 * (-math.cos(ph) - 0.5 * math.sin(ph)), rel=1e-13)


def test_sum_and_scaling():
    g = gaussian(1)
    s = 2.0 * g + (-g)
    assert s([0.4]) == pytest.approx(g([0.4]), rel=1e-15)
    assert abs(s.fourier([1.0]) - g.fourier([1.0])) < 1e-15


def test_multi_indices():
    for N in (1, 2, 3):
        for k in range(5):
            idx = multi_indices(N, k)
            assert len(idx) == math.comb(N + k - 1, k)
            assert all(sum(a) == k for a in idx)


@pytest.mark.parametrize("s", [0.25, 0.75])
def test_sks_norm_gaussian_order_zero(s):
    phi = gaussian(1)
    f = lambda t: -(1 + abs(t) ** (1 + 2 * s)) * math.exp(-t * t / 2)
    best = -optimize.minimize_scalar(f, bounds=(0.0, 5.0), method="bounded", options={"xatol": 1e-12}).fun
    assert sks_norm(phi, 0, s) == pytest.approx(best, rel=1e-10)


def test_sks_norm_requires_localized_and_grid():
    with pytest.raises(DomainError):
        sks_norm(Trig(1, [([1.0], 1.0, 0.0)]), 2, 0.5)
    grid = np.linspace(-2, 2, 41)[:, None]
    with pytest.raises(InsufficientGridError):
        sks_norm(gaussian(1), 2, 0.5, grid=grid)


def test_apply_differential():
    # P(z) = z1^2 - 3: P(-grad) phi = phi'' - 3 phi
    P = ComplexPolynomial(1, {(2,): 1.0, (0,): -3.0})
    g = gaussian(1)
    X = np.array([[0.2], [1.5]])
    exact = (X[:, 0] ** 2 - 1) * np.exp(-X[:, 0] ** 2 / 2) - 3 * np.exp(-X[:, 0] ** 2 / 2)
    np.testing.assert_allclose(apply_differential(P, g, X).real, exact, rtol=1e-13)


def test_candidate_growth_class():
    u = CandidateSolution(Polynomial(1, {(1,): 1.0}))
    assert u.degree == 1 and u.in_L1s(0.75) and not u.in_L1s(0.5)
    with pytest.raises(DomainError):
        CandidateSolution(gaussian(1))
