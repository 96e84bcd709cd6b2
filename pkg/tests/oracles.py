"""Reference computations shared by the test modules.

Everything here is built from numpy, scipy and mpmath primitives only, so that it stays
independent of the package code under test.
"""
import math

import mpmath as mp
import numpy as np
from scipy import special


def zonal_sphere_integral(h, l, xi, axis, s_kink=None, n=40):
    """``int_{S^2} h(xi . theta) P_l(axis . theta) d theta`` by direct quadrature.

    The sphere is parametrised around ``xi``: ``theta = t xi + sqrt(1-t^2)(cos p u + sin p v)``.
    ``t`` uses Gauss-Legendre on [-1, 0] and [0, 1], or Gauss-Jacobi with the
    weight ``|t|^{2 s_kink}`` when ``h`` carries that factor (pass ``h`` without it).
    The azimuth is the trapezoid rule, exact for the polynomial integrand.
    """
    xi = np.asarray(xi, float) / np.linalg.norm(xi)
    axis = np.asarray(axis, float) / np.linalg.norm(axis)
    u = np.cross(xi, [1.0, 0.0, 0.0] if abs(xi[0]) < 0.9 else [0.0, 1.0, 0.0])
    u /= np.linalg.norm(u)
    v = np.cross(xi, u)
    if s_kink is None:
        x, w = special.roots_legendre(n)
        t = np.concatenate([0.5 * (x - 1.0), 0.5 * (x + 1.0)])
        wt = np.concatenate([0.5 * w, 0.5 * w])
        ht = h(t)
    else:
        # int_0^1 t^{2s} f(t) dt with Jacobi weight (1-x)^0 (1+x)^{2s} on [-1, 1]
        x, w = special.roots_jacobi(n, 0.0, 2.0 * s_kink)
        tp = 0.5 * (x + 1.0)
        wp = w * 0.5 ** (1.0 + 2.0 * s_kink)
        t = np.concatenate([-tp, tp])
        wt = np.concatenate([wp, wp])
        ht = h(t)
    m = 2 * l + 4
    p = 2.0 * math.pi * np.arange(m) / m
    st = np.sqrt(1.0 - t * t)
    th = (t[:, None, None] * xi + st[:, None, None] * (np.cos(p)[None, :, None] * u + np.sin(p)[None, :, None] * v))
    Y = special.eval_legendre(l, th @ axis)
    return float(np.dot(wt * ht, Y.sum(axis=1)) * 2.0 * math.pi / m)


def circle_integral(f, kinks=()):
    """``int_0^{2 pi} f(psi) d psi`` by tanh-sinh quadrature split at ``kinks``.

    ``f`` takes a float; endpoint singularities of the ``|psi - k|^a`` type are
    resolved by the double-exponential rule.
    """
    br = sorted(set([0.0, 2.0 * math.pi] + [float(k) % (2.0 * math.pi) for k in kinks]))
    with mp.workdps(20):
        return float(mp.quad(lambda p: f(float(p)), br))


def gaussian_hat(xi, N, width=1.0, amp=1.0):
    """Fourier transform ``int e^{-i xi.x} phi(x) dx`` of ``amp exp(-|x|^2 / (2 width^2))``."""
    xi = np.atleast_2d(xi)
    return amp * (2.0 * math.pi * width ** 2) ** (N / 2.0) * np.exp(-0.5 * width ** 2 * np.sum(xi ** 2, axis=1))
