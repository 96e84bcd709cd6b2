"""Quadrature rules and the radial Fourier integrals used by kernels and symbols.

The radial transforms computed here are

    C(t) = int_0^inf (1 - cos(r t)) g(r) dr
    S(t) = int_0^inf (sin(r t) - r t 1_{r<1}) g(r) dr

for a radial density ``g`` that behaves like ``r**(-q)`` with ``q < 3`` at the
origin.  The small-r part is summed from moments of ``g`` (no cancellation),
the middle part is composite Gauss-Legendre, and a pure power tail is closed
by the asymptotic expansion of the incomplete oscillatory integral.
"""
from functools import lru_cache
import math

import numpy as np
from scipy import integrate, special

from .errors import DivergenceError, ToleranceNotMetError


@lru_cache(maxsize=None)
def gauss_legendre(n):
    """Nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


@lru_cache(maxsize=None)
def gauss_jacobi01(n, a, b):
    """Nodes/weights on [0, 1] for the weight ``(1-t)**a * t**b``."""
    x, w = special.roots_jacobi(n, a, b)
    t = 0.5 * (x + 1.0)
    w = w * 0.5 ** (a + b + 1.0)
    t.flags.writeable = False
    w.flags.writeable = False
    return t, w


def composite_gl(breaks, n):
    """Composite Gauss-Legendre over consecutive intervals of ``breaks``."""
    breaks = np.asarray(breaks, dtype=float)
    x, w = gauss_legendre(n)
    lo = breaks[:-1, None]
    hi = breaks[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + half * (x[None, :] + 1.0)).ravel()
    weights = (half * w[None, :]).ravel()
    return nodes, weights


def panel_breaks(a, b, max_len, grow=None):
    """Breakpoints from ``a`` to ``b``; panels at most ``max_len`` long.

    With ``grow`` the panels also grow geometrically from ``a`` (so that a
    panel starting at r is no longer than ``(grow-1) * r``).
    """
    pts = [a]
    r = a
    while r < b:
        step = max_len
        if grow is not None:
            step = min(step, (grow - 1.0) * r)
        r = min(b, r + step)
        if b - r < 1e-12 * b:
            r = b
        pts.append(r)
    return np.array(pts)


def _oscillatory_tail_contour(p, y):
    # u = y + i t turns exp(i u) into exp(i y) exp(-t)
    edges = [0.0]
    h = min(y, 1.0) / 8.0
    while edges[-1] < 1.0:
        edges.append(min(1.0, edges[-1] + h))
        h *= 2.0
    edges = np.concatenate([edges, np.arange(2.0, 61.0)])
    t, w = composite_gl(edges, 16)
    val = np.dot(w, (y + 1j * t) ** (-p) * np.exp(-t))
    return 1j * np.exp(1j * y) * val


def oscillatory_tail(p, y, max_terms=200):
    """``int_y^inf exp(i u) u**(-p) du`` for ``y > 0``.

    Uses the asymptotic series when it reaches double precision and a
    rotated contour ``u = y + i t`` otherwise.
    """
    if not y > 0:
        raise ToleranceNotMetError("oscillatory_tail needs y > 0")
    term = 1.0 + 0j
    total = 1.0 + 0j
    prev = math.inf
    for k in range(max_terms):
        term = term * (-1j) * (p + k) / y
        a = abs(term)
        if a > prev:
            break
        total += term
        prev = a
        if a < 1e-17 * abs(total):
            return 1j * np.exp(1j * y) * y ** (-p) * total
    return _oscillatory_tail_contour(p, y)


def power_fourier_tail(p, y):
    """Vectorised ``F_p(y) = int_1^inf v**(-p) exp(-i y v) dv`` for ``p > 1``.

    Small ``|y|`` uses the series
    ``Gamma(1-p) (i y)^(p-1) - sum_k (-i y)^k / (k! (k + 1 - p))``
    (an exponential-integral form when ``p`` is an integer); larger ``|y|``
    rotates the contour onto ``v = 1 - i t / y`` (Gauss-Laguerre once
    ``|y| >= 5``).
    """
    y = np.asarray(y, dtype=float)
    out = np.empty(y.shape, dtype=complex)
    small = np.abs(y) < 1.0
    ys = y[small]
    if ys.size:
        out[small] = _power_fourier_small(p, ys)
    for sel, (t, w) in ((~small & (np.abs(y) < 5.0), _contour_rule()), (np.abs(y) >= 5.0, _laguerre_rule())):
        yl = y[sel]
        if not yl.size:
            continue
        a = np.abs(yl)
        # int_1^inf v^-p e^{-i a v} dv = -i e^{-i a} / a * int_0^inf (1 - i t/a)^-p e^{-t} dt
        z = 1.0 - 1j * t[None, :] / a[:, None]
        val = -1j * np.exp(-1j * a) / a * ((z ** (-p)) @ w)
        out[sel] = np.where(yl > 0, val, np.conj(val))
    return out


@lru_cache(maxsize=1)
def _laguerre_rule():
    from numpy.polynomial.laguerre import laggauss

    return laggauss(32)


@lru_cache(maxsize=1)
def _contour_rule():
    edges = np.concatenate([[0.0, 0.125, 0.25, 0.5], np.arange(1.0, 61.0)])
    t, w = composite_gl(edges, 16)
    return t, w * np.exp(-t)


def _power_fourier_small(p, y):
    z = 1j * y
    k = np.arange(40)
    fact = np.cumprod(np.concatenate([[1.0], np.arange(1.0, 40.0)]))
    powers = (-z[:, None]) ** k[None, :]
    r = p - 1.0
    if abs(r - round(r)) < 1e-12:
        # F_1 = E_1(i y) and F_{q+1} = (exp(-i y) - i y F_q) / q
        zz = np.where(y == 0.0, 1.0, z)
        F = special.exp1(zz)
        for q in range(1, int(round(r)) + 1):
            F = (np.exp(-zz) - zz * F) / q
        return np.where(y == 0.0, 1.0 / r, F)
    series = powers / (fact[None, :] * (k[None, :] - r))
    with np.errstate(divide="ignore", invalid="ignore"):
        lead = math.gamma(-r) * z ** r
    return np.where(y == 0.0, -series[:, 0], lead - series.sum(axis=1))


class RadialDensity:
    """A radial density ``g(r)`` on (0, inf) together with its moments.

    Parameters
    ----------
    func : callable
        Vectorised evaluator of ``g``.
    power : (C, p) or None
        If given, ``g(r) = C * r**(-p)`` exactly for every r > 0.
    cutoff : float or None
        Radius beyond which ``g`` is negligible (exponentially decaying
        densities).
    tail_order : float or None
        Declared algebraic decay ``g(r) = O(r**(-1-tail_order))``; used only
        to bound truncation error when neither of the above applies.
    """

    def __init__(self, func, power=None, cutoff=None, tail_order=None):
        self.func = func
        self.power = power
        self.cutoff = cutoff
        self.tail_order = tail_order
        self._moments = {}

    def __call__(self, r):
        return self.func(np.asarray(r, dtype=float))

    def moment(self, j, a, b):
        """``int_a^b r**j g(r) dr``."""
        if a == b:
            return 0.0
        if self.power is not None:
            C, p = self.power
            e = j + 1.0 - p
            if a == 0.0 and e <= 0.0:
                raise DivergenceError(f"moment r^{j} of r^-{p} diverges at 0")
            if abs(e) < 1e-14:
                return C * math.log(b / a)
            return C * (b**e - (a**e if a > 0 else 0.0)) / e
        key = (j, a, b)
        if key not in self._moments:
            f = lambda r: r**j * float(self.func(np.array([r]))[0])
            val, err = integrate.quad(f, a, b, limit=400, epsabs=0.0, epsrel=1e-13)
            if not np.isfinite(val) or err > 1e-8 * max(abs(val), 1e-300):
                raise ToleranceNotMetError(f"moment {j} on [{a}, {b}] not resolved (err {err:g})")
            self._moments[key] = val
        return self._moments[key]

    def tail_mass(self, R):
        """``int_R^inf g(r) dr``."""
        if self.power is not None:
            C, p = self.power
            return C * R ** (1.0 - p) / (p - 1.0)
        end = self.cutoff if self.cutoff is not None else math.inf
        if R >= end:
            return 0.0
        f = lambda r: float(self.func(np.array([r]))[0])
        val, _ = integrate.quad(f, R, end, limit=400, epsrel=1e-12)
        return val


def _inner_radius(a):
    # Largest power of two <= min(1, 1/(2a)); moments at these radii are cached.
    if a <= 0.5:
        return 1.0
    return 2.0 ** (-math.ceil(math.log2(2.0 * a)))


def _series(rd, a, eps, kind):
    """Small-r Taylor series of the cos/sin integrand integrated on [0, eps]."""
    total = 0.0
    if kind == "cos":
        k, sign, fact = 1, 1.0, 2.0
        while True:
            term = sign * a ** (2 * k) / fact * rd.moment(2 * k, 0.0, eps)
            total += term
            if abs(term) <= 1e-17 * abs(total) or k > 40:
                break
            k += 1
            sign = -sign
            fact *= (2 * k - 1) * (2 * k)
    else:
        k, sign, fact = 1, -1.0, 6.0
        while True:
            term = sign * a ** (2 * k + 1) / fact * rd.moment(2 * k + 1, 0.0, eps)
            total += term
            if abs(term) <= 1e-17 * abs(total) or k > 40:
                break
            k += 1
            sign = -sign
            fact *= (2 * k) * (2 * k + 1)
    return total


def radial_transform(rd, t, kind, n=16):
    """Cosine (``kind='cos'``) or compensated sine transform of ``rd`` at ``t``.

    Returns ``(value, tail_bound)``.  ``tail_bound`` is zero for power and
    cut-off densities (their tails are summed or negligible).
    """
    t = float(t)
    if t == 0.0:
        return 0.0, 0.0
    a = abs(t)
    sgn = 1.0 if (kind == "cos" or t > 0) else -1.0
    eps = _inner_radius(a)
    value = _series(rd, a, eps, kind)

    hmax = 3.0 / a
    if rd.power is not None:
        end = max(1.0, 40.0 / a)
    elif rd.cutoff is not None:
        end = max(rd.cutoff, 1.0)
    else:
        end = max(1.0, 40.0 / a, 200.0)
    brk = [panel_breaks(eps, 1.0, hmax, grow=2.0)] if eps < 1.0 else []
    brk.append(panel_breaks(1.0, end, hmax, grow=2.0))
    tail_bound = 0.0
    for b in brk:
        if len(b) < 2:
            continue
        r, w = composite_gl(b, n)
        g = rd(r)
        if kind == "cos":
            f = 1.0 - np.cos(a * r)
        else:
            f = np.sin(a * r)
            inside = r < 1.0
            f = np.where(inside, f - a * r, f)
        value += float(np.dot(w, f * g))

    if rd.power is not None:
        C, p = rd.power
        osc = a ** (p - 1.0) * oscillatory_tail(p, a * end)
        if kind == "cos":
            value += C * end ** (1.0 - p) / (p - 1.0) - C * osc.real
        else:
            value += C * osc.imag
    elif rd.cutoff is None:
        order = rd.tail_order or 0.0
        gR = abs(float(rd(np.array([end]))[0]))
        tail_bound = 2.0 * gR * end / max(order, 1e-3)
    return sgn * value, tail_bound


@lru_cache(maxsize=32)
def _power_tail_cheb(p, deg=50):
    from numpy.polynomial import chebyshev

    x = np.cos(np.pi * (np.arange(deg + 1) + 0.5) / (deg + 1))
    y = 2.0 / (x + 1.0)
    g = power_fourier_tail(p, y) * np.exp(1j * y) * y
    return chebyshev.chebfit(x, g.real, deg), chebyshev.chebfit(x, g.imag, deg)


def power_fourier_tail_fast(p, y):
    """Interpolated ``power_fourier_tail`` for bulk evaluation.

    For ``|y| >= 1`` the smooth envelope ``y e^{i y} F_p(y)`` is a Chebyshev
    series of degree 50 in ``2 / |y| - 1``, built once per exponent; the
    relative error is about ``1e-12``.  Smaller ``|y|`` defer to the series.
    """
    from numpy.polynomial import chebyshev

    p = float(p)
    y = np.asarray(y, dtype=float)
    shape = y.shape
    y = y.ravel()
    out = np.empty(y.size, dtype=complex)
    a = np.abs(y)
    big = a >= 1.0
    if np.any(~big):
        out[~big] = power_fourier_tail(p, y[~big])
    if np.any(big):
        cr, ci = _power_tail_cheb(p)
        ab = a[big]
        xt = 2.0 / ab - 1.0
        val = (chebyshev.chebval(xt, cr) + 1j * chebyshev.chebval(xt, ci)) * np.exp(-1j * ab) / ab
        out[big] = np.where(y[big] > 0, val, np.conj(val))
    return out.reshape(shape)
