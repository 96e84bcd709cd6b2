"""Special functions: Gamma, the fractional Laplacian constant, Bessel K,
Gegenbauer polynomials and the odd kernel ``h_s``.
"""
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from ._accel import HAVE_NUMBA, njit
from .errors import DomainError
from .quadrature import RadialDensity, radial_transform


@dataclass(frozen=True)
class SpecialFnConfig:
    quad_abs_tol: float = 1e-13
    quad_rel_tol: float = 1e-12
    tail_cutoff: float = 40.0

    def __post_init__(self):
        if self.quad_abs_tol <= 0 or self.quad_rel_tol <= 0:
            raise DomainError("tolerances must be positive")
        if self.tail_cutoff < 1:
            raise DomainError("tail_cutoff must be >= 1")


DEFAULT_CONFIG = SpecialFnConfig()

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _gamma_lanczos(x):
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * _gamma_lanczos(1.0 - x))
    x -= 1.0
    a = _LANCZOS[0]
    for i in range(1, 9):
        a += _LANCZOS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    # log form: t ** (x + 0.5) alone overflows well before Gamma does
    return math.sqrt(2.0 * math.pi) * math.exp((x + 0.5) * math.log(t) - t) * a


def gamma(x):
    """Gamma function for real ``x > 0`` (Lanczos, g=7)."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"gamma requires x > 0, got {x}")
    if x > 171.6:
        raise DomainError("gamma overflows for x > 171.6")
    return _gamma_lanczos(x)


def frac_laplacian_constant(N, s):
    """c_{N,s} = s(1-s) pi^{-N/2} 4^s Gamma((N+2s)/2) / Gamma(2-s)."""
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N}")
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0, 1), got {s}")
    return s * (1.0 - s) * math.pi ** (-N / 2.0) * 4.0**s * gamma((N + 2.0 * s) / 2.0) / gamma(2.0 - s)


# Taylor coefficients of 1/Gamma(z) = sum c_k z^k (k >= 1).
_RGAMMA = np.array([
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
    -0.0000012504934821,
    0.0000011330272320,
    -0.0000002056338417,
    0.0000000061160950,
    0.0000000050020075,
    -0.0000000011812746,
    0.0000000001043427,
    0.0000000000077823,
    -0.0000000000036968,
    0.0000000000005100,
    -0.0000000000000206,
    -0.0000000000000054,
    0.0000000000000014,
    0.0000000000000001,
])


@njit
def _temme_gammas(mu):
    # 1/Gamma(1+mu), 1/Gamma(1-mu) and gam2 = their mean
    gampl = 0.0
    gammi = 0.0
    p = 1.0
    for k in range(_RGAMMA.shape[0]):
        gampl += _RGAMMA[k] * p
        gammi += _RGAMMA[k] * (p if k % 2 == 0 else -p)
        p *= mu
    return 0.5 * (gampl + gammi), gampl, gammi


@njit
def _gam1_series(mu):
    s = 0.0
    p = 1.0
    for k in range(1, _RGAMMA.shape[0], 2):
        s -= _RGAMMA[k] * p
        p *= mu * mu
    return s


@njit
def _bessel_k_scalar(nu, x):
    eps = 1e-16
    if x > 705.0:
        return 0.0
    nl = int(nu + 0.5)
    xmu = nu - nl
    xmu2 = xmu * xmu
    xi = 1.0 / x
    xi2 = 2.0 * xi
    if x < 2.0:
        gam2, gampl, gammi = _temme_gammas(xmu)
        gam1 = _gam1_series(xmu)
        x2 = 0.5 * x
        pimu = math.pi * xmu
        fact = 1.0 if abs(pimu) < eps else pimu / math.sin(pimu)
        d = -math.log(x2)
        e = xmu * d
        fact2 = 1.0 if abs(e) < eps else math.sinh(e) / e
        ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
        total = ff
        e = math.exp(e)
        p = 0.5 * e / gampl
        q = 0.5 / (e * gammi)
        c = 1.0
        d = x2 * x2
        sum1 = p
        for i in range(1, 10000):
            ff = (i * ff + p + q) / (i * i - xmu2)
            c *= d / i
            p /= i - xmu
            q /= i + xmu
            dl = c * ff
            total += dl
            dl1 = c * (p - i * ff)
            sum1 += dl1
            if abs(dl) < abs(total) * eps:
                break
        rkmu = total
        rk1 = sum1 * xi2
    else:
        b = 2.0 * (1.0 + x)
        d = 1.0 / b
        h = d
        delh = d
        q1 = 0.0
        q2 = 1.0
        a1 = 0.25 - xmu2
        q = a1
        c = a1
        a = -a1
        s = 1.0 + q * delh
        for i in range(2, 100000):
            a -= 2.0 * (i - 1)
            c = -a * c / i
            qnew = (q1 - b * q2) / a
            q1 = q2
            q2 = qnew
            q += c * qnew
            b += 2.0
            d = 1.0 / (b + a * d)
            delh = (b * d - 1.0) * delh
            h += delh
            dels = q * delh
            s += dels
            if abs(dels / s) < eps:
                break
        h = a1 * h
        rkmu = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) / s
        rk1 = rkmu * (xmu + x + 0.5 - h) * xi
    for i in range(1, nl + 1):
        rktemp = (xmu + i) * xi2 * rk1 + rkmu
        rkmu = rk1
        rk1 = rktemp
    return rkmu


@njit
def _bessel_k_array(nu, x, out):
    for i in range(x.shape[0]):
        out[i] = _bessel_k_scalar(nu, x[i])
    return out


def bessel_k(rho, x):
    """Modified Bessel function of the second kind ``K_rho(x)``, ``rho >= 0``, ``x > 0``.

    Temme's series on x < 2 and Steed's continued fraction beyond, followed
    by forward recurrence in the order.  Scalars or arrays.
    """
    rho = abs(float(rho))
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("bessel_k requires x > 0")
    if arr.ndim == 0:
        return float(_bessel_k_scalar(rho, float(arr)))
    flat = np.ascontiguousarray(arr.ravel())
    out = np.empty_like(flat)
    _bessel_k_array(rho, flat, out)
    return out.reshape(arr.shape)


def bessel_k_fast(rho, x):
    """Array Bessel K for hot paths: our kernel under numba, scipy otherwise."""
    if HAVE_NUMBA:
        return bessel_k(rho, x)
    from scipy.special import kv

    return kv(rho, np.asarray(x, dtype=float))


def gegenbauer(l, nu, t):
    """Gegenbauer polynomial ``C_l^nu(t)`` by the three-term recurrence in ``l``.

    ``nu = 0`` returns the Chebyshev polynomial ``T_l`` (the limit
    ``lim C_l^nu / C_l^nu(1)`` normalisation), which is what the circle
    harmonics use.
    """
    if int(l) != l or l < 0:
        raise DomainError("degree must be a non-negative integer")
    if nu < 0:
        raise DomainError("order must be >= 0")
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0 + 1e-14):
        raise DomainError("gegenbauer requires |t| <= 1")
    if nu == 0:
        prev, cur = np.ones_like(t), t.copy()
        if l == 0:
            return _out(prev)
        for _ in range(1, l):
            prev, cur = cur, 2.0 * t * cur - prev
        return _out(cur)
    prev = np.ones_like(t)
    if l == 0:
        return _out(prev)
    cur = 2.0 * nu * t
    for n in range(2, l + 1):
        prev, cur = cur, (2.0 * t * (n + nu - 1.0) * cur - (n + 2.0 * nu - 2.0) * prev) / n
    return _out(cur)


def _out(a):
    return float(a) if a.ndim == 0 else a


def kappa1(N):
    """2^{N-2} pi^{(N-2)/2} Gamma((N-2)/2), N >= 3."""
    if N < 3:
        raise DomainError("kappa1 is defined for N >= 3")
    return 2.0 ** (N - 2) * math.pi ** ((N - 2) / 2.0) * gamma((N - 2) / 2.0)


def kappa2(N):
    """pi 2^{3-N} / Gamma((N-2)/2)^2, N >= 3."""
    if N < 3:
        raise DomainError("kappa2 depends on a normalisation convention for N = 2")
    return math.pi * 2.0 ** (3 - N) / gamma((N - 2) / 2.0) ** 2


def gegenbauer_norm(l, N):
    """Squared norm of ``C_l^{(N-2)/2}`` against ``(1-t^2)^{(N-3)/2} dt``."""
    if N < 3:
        raise DomainError("gegenbauer_norm is not exposed for N = 2")
    if int(l) != l or l < 0:
        raise DomainError("degree must be a non-negative integer")
    lam = (N - 2) / 2.0
    return kappa2(N) * math.exp(math.lgamma(l + N - 2) - math.lgamma(l + 1)) / (l + lam)


@lru_cache(maxsize=64)
def _power_density(s):
    return RadialDensity(lambda r: r ** (-1.0 - 2.0 * s), power=(1.0, 1.0 + 2.0 * s))


def h_s(t, s):
    """The odd kernel ``int_0^1 (sin rt - rt) r^{-1-2s} dr + int_1^inf sin(rt) r^{-1-2s} dr``."""
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0, 1), got {s}")
    rd = _power_density(float(s))
    t = np.asarray(t, dtype=float)
    vals = np.array([radial_transform(rd, ti, "sin")[0] for ti in t.ravel()])
    return _out(vals.reshape(t.shape))


def one_minus_cos_moment(s):
    """``int_0^inf (1 - cos t) t^{-1-2s} dt`` computed by quadrature."""
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0, 1), got {s}")
    return radial_transform(_power_density(float(s)), 1.0, "cos")[0]


@lru_cache(maxsize=64)
def _h_s_amplitude(s):
    # h_s(1) by quadrature; the scaling law below carries it to every t.
    return radial_transform(_power_density(s), 1.0, "sin")[0]


def h_s_fast(t, s):
    """Vectorised ``h_s`` from the exact scaling law in ``t``.

    Substituting ``u = r|t|`` gives, for ``s != 1/2``,
    ``h_s(t) = A sign(t)|t|^{2s} - t/(1-2s)`` with ``A = h_s(1) + 1/(1-2s)``,
    and ``h_{1/2}(t) = t (h_{1/2}(1) - log|t|)``.  Only ``h_s(1)`` is
    integrated numerically.
    """
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0, 1), got {s}")
    s = float(s)
    f1 = _h_s_amplitude(s)
    t = np.asarray(t, dtype=float)
    a = np.abs(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        if abs(s - 0.5) < 1e-12:
            v = np.where(a > 0, t * (f1 - np.log(np.where(a > 0, a, 1.0))), 0.0)
        else:
            amp = f1 + 1.0 / (1.0 - 2.0 * s)
            v = amp * np.sign(t) * a ** (2.0 * s) - t / (1.0 - 2.0 * s)
    return _out(v)
