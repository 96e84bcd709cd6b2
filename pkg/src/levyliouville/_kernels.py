"""Far-field kernel sums, the hot loop of operator application.

``far_sum(xs, nodes, wphi, kern)`` returns, for every target ``x``,

    sum_k wphi[k] * kappa(z_k - x) * (1 - chi(|z_k - x|))

where ``chi`` is a smooth step equal to 1 on ``r <= 1`` and 0 on
``r >= 1 + CHI_WIDTH``.  A wide transition keeps the far-field integrand
resolvable by unit-length Gauss-Legendre panels.
The compiled path handles radial profiles in any N and circle anisotropy
(N = 2); everything else runs through the vectorised numpy path, which is
also what ``LEVYLIOUVILLE_BACKEND=numpy`` selects.
"""
import math

import numpy as np

from ._accel import HAVE_NUMBA, njit, prange
from .measures import BESSEL, POWER, SINH, TEMPERED
from .special_fn import _bessel_k_scalar

CHUNK = 64
CHI_WIDTH = 3.0


@njit
def _step(t):
    return math.exp(-1.0 / t) if t > 0.0 else 0.0


@njit
def chi_scalar(r):
    t = (r - 1.0) / CHI_WIDTH
    if t <= 0.0:
        return 1.0
    if t >= 1.0:
        return 0.0
    a = _step(1.0 - t)
    return a / (a + _step(t))


def chi(r):
    """Vectorised smooth step (1 on r <= 1, 0 on r >= 1 + CHI_WIDTH)."""
    t = (np.asarray(r, dtype=float) - 1.0) / CHI_WIDTH
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(t < 1.0, np.exp(-1.0 / np.where(t < 1.0, 1.0 - t, 1.0)), 0.0)
        b = np.where(t > 0.0, np.exp(-1.0 / np.where(t > 0.0, t, 1.0)), 0.0)
        out = np.where(t <= 0.0, 1.0, np.where(t >= 1.0, 0.0, a / (a + b)))
    return out


@njit
def _profile(code, c, p, nu, lam, r):
    if code == 0:
        return c * r ** (-p)
    if code == 1:
        return c * r ** (-nu) * _bessel_k_scalar(nu, r)
    if code == 2:
        sh = math.sinh(r)
        return c / (sh * sh)
    return c * r ** (-p) * math.exp(-lam * r)


@njit(parallel=True)
def _far_sum_numba(xs, nodes, wphi, code, c, p, nu, lam, acos, asin, rmax):
    M = xs.shape[0]
    K = nodes.shape[0]
    N = xs.shape[1]
    L = acos.shape[0]
    out = np.zeros(M)
    for i in prange(M):
        acc = 0.0
        for k in range(K):
            r2 = 0.0
            for d in range(N):
                t = nodes[k, d] - xs[i, d]
                r2 += t * t
            if r2 <= 1.0:
                continue
            r = math.sqrt(r2)
            if r > rmax:
                continue
            val = wphi[k] * _profile(code, c, p, nu, lam, r) * (1.0 - chi_scalar(r))
            if L > 0:
                cx = (nodes[k, 0] - xs[i, 0]) / r
                sx = (nodes[k, 1] - xs[i, 1]) / r
                a = acos[0]
                cl = 1.0
                sl = 0.0
                for l in range(1, L):
                    cl, sl = cl * cx - sl * sx, sl * cx + cl * sx
                    a += acos[l] * cl + asin[l] * sl
                val *= a
            acc += val
        out[i] = acc
    return out


class KernelSpec:
    """Flattened description of ``kappa`` for the far-field sum.

    Parameters
    ----------
    profile : RadialProfile
    angular : SphereFunction or None
        Angular density already reflected if needed.
    rmax : float
        Kernel treated as zero beyond this radius (exponential profiles).
    """

    def __init__(self, profile, angular=None, rmax=math.inf):
        self.profile = profile
        self.angular = angular
        self.rmax = float(rmax)
        self.acos = np.zeros(0)
        self.asin = np.zeros(0)
        if angular is not None and angular.N == 2:
            c = angular.coefficients
            L = angular.L_max
            self.acos = np.zeros(L + 1)
            self.asin = np.zeros(L + 1)
            self.acos[0] = c[0] / math.sqrt(2.0 * math.pi)
            self.acos[1:] = c[1::2] / math.sqrt(math.pi)
            self.asin[1:] = c[2::2] / math.sqrt(math.pi)

    @property
    def compiled(self):
        return HAVE_NUMBA and (self.angular is None or self.angular.N == 2)

    def evaluate(self, d):
        """``kappa`` at difference vectors ``d`` (K, N), all nonzero."""
        r = np.linalg.norm(d, axis=1)
        val = self.profile(r)
        if self.angular is not None:
            val = val * self.angular(d / r[:, None])
        return np.where(r > self.rmax, 0.0, val)


def far_sum_numpy(xs, nodes, wphi, kern):
    out = np.zeros(xs.shape[0])
    for i0 in range(0, xs.shape[0], CHUNK):
        x = xs[i0:i0 + CHUNK]
        d = (nodes[None, :, :] - x[:, None, :]).reshape(-1, xs.shape[1])
        r = np.linalg.norm(d, axis=1)
        keep = (r > 1.0) & (r <= kern.rmax)
        vals = np.zeros(r.size)
        if np.any(keep):
            vals[keep] = kern.evaluate(d[keep]) * (1.0 - chi(r[keep]))
        out[i0:i0 + CHUNK] = vals.reshape(x.shape[0], -1) @ wphi
    return out


def far_sum(xs, nodes, wphi, kern, backend=None):
    """Dispatch to the compiled or numpy far-field sum."""
    xs = np.ascontiguousarray(xs, dtype=float)
    nodes = np.ascontiguousarray(nodes, dtype=float)
    wphi = np.ascontiguousarray(wphi, dtype=float)
    use_numba = kern.compiled if backend is None else (backend == "numba" and kern.compiled)
    if not use_numba:
        return far_sum_numpy(xs, nodes, wphi, kern)
    pr = kern.profile
    code = {POWER: 0, BESSEL: 1, SINH: 2, TEMPERED: 3}[pr.code]
    return _far_sum_numba(xs, nodes, wphi, code, pr.c, pr.p, pr.nu, pr.lam, kern.acos, kern.asin, kern.rmax)


@njit(parallel=True)
def _gauss_poly_numba(T, qc, coef, inv2w2):
    M, N = T.shape
    nt, _, D = qc.shape
    out = np.empty(M)
    for i in prange(M):
        r2 = 0.0
        for j in range(N):
            r2 += T[i, j] * T[i, j]
        tot = 0.0
        for k in range(nt):
            prod = coef[k]
            for j in range(N):
                t = T[i, j]
                acc = 0.0
                for d in range(D - 1, -1, -1):
                    acc = acc * t + qc[k, j, d]
                prod *= acc
            tot += prod
        out[i] = tot * math.exp(-r2 * inv2w2)
    return out


def gauss_poly_numpy(T, qc, coef, inv2w2):
    nt, N, D = qc.shape
    total = np.zeros(T.shape[0])
    for k in range(nt):
        prod = np.full(T.shape[0], coef[k])
        for j in range(N):
            prod = prod * np.polynomial.polynomial.polyval(T[:, j], qc[k, j])
        total += prod
    return total * np.exp(-np.sum(T * T, axis=1) * inv2w2)


def gauss_poly(T, qc, coef, inv2w2, backend=None):
    """``sum_k coef[k] prod_j Q_kj(T[:, j]) exp(-|T|^2 inv2w2)``; ``qc`` holds
    ascending coefficients of ``Q_kj`` padded to a common length."""
    use_numba = HAVE_NUMBA if backend is None else (backend == "numba" and HAVE_NUMBA)
    T = np.ascontiguousarray(T, dtype=float)
    if use_numba and T.shape[0] >= 256:
        return _gauss_poly_numba(T, qc, coef, inv2w2)
    return gauss_poly_numpy(T, qc, coef, inv2w2)
