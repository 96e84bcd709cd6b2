"""Harmonic analysis on the circle (N=2) and the 2-sphere (N=3).

A :class:`SphereFunction` stores coefficients in a real orthonormal basis:

* N=2, flat index ``0`` is ``1/sqrt(2 pi)``, index ``2l-1`` is
  ``cos(l psi)/sqrt(pi)`` and index ``2l`` is ``sin(l psi)/sqrt(pi)``.
* N=3, flat index ``l*l + l + m`` is the real spherical harmonic
  ``Y_{l,m}`` (cosine type for m > 0, sine type for m < 0, no
  Condon-Shortley phase).

Zonal kernels ``h(xi . theta)`` act diagonally on degree-l harmonics with
eigenvalue ``mu(l, N)``; these are computed by :func:`funk_hecke_mu`.
"""
from dataclasses import dataclass
from functools import lru_cache
import math
import warnings

import numpy as np

from .errors import DomainError, InconclusiveError
from .quadrature import composite_gl, gauss_legendre
from .special_fn import gegenbauer, h_s_fast, kappa1, kappa2

MIN_STORED_DEGREE = 8
DEFAULT_L = {2: 64, 3: 32}


class AliasingWarning(UserWarning):
    """Top-degree energy of a sampled expansion is suspiciously large."""


class TruncationWarning(UserWarning):
    """The tail of an eigenvalue-weighted harmonic series is not negligible."""


def _check_N(N):
    if N not in (2, 3):
        raise DomainError(f"sphere harmonics are implemented for N in {{2, 3}}, got {N}")


def n_coefficients(N, L):
    return 2 * L + 1 if N == 2 else (L + 1) ** 2


def coefficient_degrees(N, L):
    """Degree ``l`` of every flat coefficient index."""
    if N == 2:
        return np.concatenate([[0], np.repeat(np.arange(1, L + 1), 2)])
    return np.concatenate([np.full(2 * l + 1, l) for l in range(L + 1)])


def _as_points(theta, N):
    pts = np.asarray(theta, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[1] != N:
        raise DomainError(f"points must have {N} components")
    return pts, single


def _normalized_legendre(L, t):
    """Orthonormal associated Legendre table ``P[l, m]`` (shape (L+1, L+1, M)).

    ``P[l, 0](cos theta)`` is ``Y_{l,0}``; for m > 0 the real harmonics are
    ``sqrt(2) P[l, m] cos(m phi)`` and ``sqrt(2) P[l, m] sin(m phi)``.
    """
    t = np.asarray(t, dtype=float)
    st = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    P = np.zeros((L + 1, L + 1) + t.shape)
    P[0, 0] = 1.0 / math.sqrt(4.0 * math.pi)
    for m in range(1, L + 1):
        P[m, m] = math.sqrt((2.0 * m + 1.0) / (2.0 * m)) * st * P[m - 1, m - 1]
    for m in range(0, L):
        P[m + 1, m] = math.sqrt(2.0 * m + 3.0) * t * P[m, m]
    for m in range(0, L + 1):
        for l in range(m + 2, L + 1):
            a = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = math.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            P[l, m] = a * (t * P[l - 1, m] - b * P[l - 2, m])
    return P


def harmonic_basis(N, L, theta):
    """Matrix of orthonormal basis functions, shape (M, n_coefficients)."""
    _check_N(N)
    pts, _ = _as_points(theta, N)
    M = pts.shape[0]
    B = np.empty((M, n_coefficients(N, L)))
    if N == 2:
        psi = np.arctan2(pts[:, 1], pts[:, 0])
        B[:, 0] = 1.0 / math.sqrt(2.0 * math.pi)
        for l in range(1, L + 1):
            B[:, 2 * l - 1] = np.cos(l * psi) / math.sqrt(math.pi)
            B[:, 2 * l] = np.sin(l * psi) / math.sqrt(math.pi)
        return B
    nrm = np.linalg.norm(pts, axis=1)
    t = np.clip(pts[:, 2] / nrm, -1.0, 1.0)
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    P = _normalized_legendre(L, t)
    r2 = math.sqrt(2.0)
    for l in range(L + 1):
        base = l * l + l
        B[:, base] = P[l, 0]
        for m in range(1, l + 1):
            B[:, base + m] = r2 * P[l, m] * np.cos(m * phi)
            B[:, base - m] = r2 * P[l, m] * np.sin(m * phi)
    return B


class SphereFunction:
    """A real function on S^{N-1} given by orthonormal harmonic coefficients.

    Parameters
    ----------
    N : {2, 3}
        Ambient dimension.
    coefficients : array_like
        Flat coefficient vector; its length fixes ``L_max``.
    """

    def __init__(self, N, coefficients):
        _check_N(N)
        c = np.array(coefficients, dtype=float).ravel()
        if N == 2:
            if c.size % 2 != 1:
                raise DomainError("N=2 coefficient vectors have odd length 2L+1")
            L = (c.size - 1) // 2
        else:
            L = int(round(math.sqrt(c.size))) - 1
            if (L + 1) ** 2 != c.size:
                raise DomainError("N=3 coefficient vectors have length (L+1)^2")
        if not np.all(np.isfinite(c)):
            raise DomainError("coefficients must be finite")
        c.flags.writeable = False
        self.N = N
        self.L_max = L
        self.coefficients = c

    def __repr__(self):
        return f"SphereFunction(N={self.N}, L_max={self.L_max})"

    def __eq__(self, other):
        return (
            isinstance(other, SphereFunction)
            and self.N == other.N
            and self.L_max == other.L_max
            and np.array_equal(self.coefficients, other.coefficients)
        )

    def __hash__(self):
        return hash((self.N, self.coefficients.tobytes()))

    @property
    def degrees(self):
        return coefficient_degrees(self.N, self.L_max)

    def __call__(self, theta):
        pts, single = _as_points(theta, self.N)
        v = harmonic_basis(self.N, self.L_max, pts) @ self.coefficients
        return float(v[0]) if single else v

    def _masked(self, keep):
        return SphereFunction(self.N, np.where(keep, self.coefficients, 0.0))

    def even(self):
        return self._masked(self.degrees % 2 == 0)

    def odd(self):
        return self._masked(self.degrees % 2 == 1)

    def reflected(self):
        """The function ``theta -> a(-theta)``: degree-l parts pick up ``(-1)^l``."""
        sign = np.where(self.degrees % 2 == 0, 1.0, -1.0)
        return SphereFunction(self.N, sign * self.coefficients)

    def has_odd_part(self, tol=0.0):
        return bool(np.any(np.abs(self.odd().coefficients) > tol))

    def degree_energy(self):
        """Sum of squared coefficients per degree, length ``L_max + 1``."""
        return np.bincount(self.degrees, weights=self.coefficients**2, minlength=self.L_max + 1)

    def padded(self, L):
        """Same function stored with at least degree ``L``."""
        if L <= self.L_max:
            return self
        c = np.zeros(n_coefficients(self.N, L))
        c[: self.coefficients.size] = self.coefficients
        return SphereFunction(self.N, c)

    @classmethod
    def constant(cls, N, value=1.0):
        _check_N(N)
        c = np.zeros(n_coefficients(N, MIN_STORED_DEGREE))
        c[0] = value * math.sqrt(2.0 * math.pi if N == 2 else 4.0 * math.pi)
        return cls(N, c)

    @classmethod
    def from_fourier(cls, a0, cos=(), sin=()):
        """Circle function ``a0 + sum_l cos[l-1] cos(l psi) + sin[l-1] sin(l psi)``."""
        L = max(len(cos), len(sin), MIN_STORED_DEGREE)
        c = np.zeros(2 * L + 1)
        c[0] = a0 * math.sqrt(2.0 * math.pi)
        for l, v in enumerate(cos, start=1):
            c[2 * l - 1] = v * math.sqrt(math.pi)
        for l, v in enumerate(sin, start=1):
            c[2 * l] = v * math.sqrt(math.pi)
        return cls(2, c)

    @classmethod
    def from_coefficients(cls, N, coefficients):
        """Orthonormal coefficients, zero-padded to degree ``MIN_STORED_DEGREE``."""
        return cls(N, coefficients).padded(MIN_STORED_DEGREE)


def sphere_rule(N, L):
    """Points and weights on S^{N-1} integrating degree ``2L`` exactly."""
    _check_N(N)
    if N == 2:
        M = 2 * L + 2
        psi = 2.0 * math.pi * np.arange(M) / M
        return np.column_stack([np.cos(psi), np.sin(psi)]), np.full(M, 2.0 * math.pi / M)
    nt = L + 1
    nphi = 2 * L + 2
    t, wt = gauss_legendre(nt)
    phi = 2.0 * math.pi * np.arange(nphi) / nphi
    T, PHI = np.meshgrid(t, phi, indexing="ij")
    st = np.sqrt(1.0 - T * T)
    pts = np.column_stack([(st * np.cos(PHI)).ravel(), (st * np.sin(PHI)).ravel(), T.ravel()])
    w = (wt[:, None] * np.full(nphi, 2.0 * math.pi / nphi)[None, :]).ravel()
    return pts, w


def expand(samples, N, L_max=None, oversample=2):
    """Project a callable on S^{N-1} onto harmonics of degree <= ``L_max``.

    ``samples`` receives an (M, N) array of unit vectors.  The quadrature
    integrates degree ``2 * oversample * L_max`` exactly, which keeps
    aliasing of a smooth function well below its truncation error.
    """
    _check_N(N)
    L = DEFAULT_L[N] if L_max is None else int(L_max)
    if L < 0:
        raise DomainError("L_max must be >= 0")
    pts, w = sphere_rule(N, max(oversample * L, 1))
    f = np.asarray(samples(pts), dtype=float)
    coef = harmonic_basis(N, L, pts).T @ (w * f)
    a = SphereFunction(N, coef)
    energy = a.degree_energy()
    total = energy.sum()
    if L > 0 and total > 0 and energy[-1] > 0.1 * total:
        warnings.warn(f"degree-{L} energy is {energy[-1] / total:.1%} of the total", AliasingWarning)
    return a


# -- Funk-Hecke eigenvalues ---------------------------------------------------

def _u_rule(l, n=24):
    # Panels on [0, pi], graded geometrically toward pi/2 where t = cos u = 0.
    half = math.pi / 2.0
    max_len = min(math.pi / 8.0, 3.0 / (l + 1.0))
    left = [0.0]
    while left[-1] < half - max_len:
        left.append(left[-1] + max_len)
    d = half - left[-1]
    for _ in range(48):
        d *= 0.5
        left.append(half - d)
    left.append(half)
    left = np.array(left)
    br = np.concatenate([left, (math.pi - left[::-1])[1:]])
    return composite_gl(br, n)


def _zonal_poly(l, N, t):
    if N == 2:
        return gegenbauer(l, 0.0, t)
    return gegenbauer(l, (N - 2) / 2.0, t)


def zonal_integral(f, N, l=0):
    """``int_{-1}^{1} f(t) (1-t^2)^{(N-3)/2} dt`` robust to a kink at t=0."""
    u, w = _u_rule(l)
    t = np.cos(u)
    return float(np.dot(w, np.asarray(f(t), dtype=float) * np.sin(u) ** (N - 2)))


def funk_hecke_prefactor(l, N):
    if N == 2:
        return 2.0
    return kappa1(N) * math.exp(math.lgamma(l + 1) - math.lgamma(l + N - 2))


def funk_hecke_mu(h, l, N):
    """Eigenvalue ``mu(l, N)`` of the zonal kernel ``h(xi . theta)`` on degree-l harmonics.

    N >= 3 uses the Gegenbauer form; N = 2 uses ``2 int_0^pi h(cos u) cos(l u) du``.
    ``h`` must be vectorised; a kink or integrable singularity at t = 0 is fine.
    """
    if int(l) != l or l < 0:
        raise DomainError("degree must be a non-negative integer")
    if N < 2:
        raise DomainError("N must be >= 2")
    l = int(l)
    val = zonal_integral(lambda t: h(t) * _zonal_poly(l, N, t), N, l)
    return funk_hecke_prefactor(l, N) * val


@dataclass(frozen=True)
class MuDecayReport:
    d_Nh: float
    bound_constant: float
    degrees: tuple
    observed: tuple
    bounds: tuple
    slope: float
    passed: bool


def mu_decay_report(h, N=3, l_range=range(1, 33)):
    """Compare ``|mu(l, N)|`` with ``kappa1 sqrt(kappa2) d_{N,h} l^{-(N-2)/2}``."""
    if N < 3:
        raise DomainError("the eigenvalue bound needs kappa2(N), N >= 3")
    ls = [int(l) for l in l_range]
    if not ls or min(ls) < 1 or max(ls) > 64:
        raise DomainError("l_range must lie in [1, 64]")
    d = math.sqrt(zonal_integral(lambda t: np.abs(h(t)) ** 2, N, max(ls)))
    C = kappa1(N) * math.sqrt(kappa2(N)) * d
    obs = [abs(funk_hecke_mu(h, l, N)) for l in ls]
    bnd = [C * l ** (-(N - 2) / 2.0) for l in ls]
    passed = all(o <= b * (1.0 + 1e-10) + 1e-14 for o, b in zip(obs, bnd))
    nz = [(l, o) for l, o in zip(ls, obs) if o > 1e-12 * max(max(obs), 1e-300)]
    slope = math.nan
    if len(nz) >= 3:
        x = np.log([l for l, _ in nz])
        y = np.log([o for _, o in nz])
        slope = float(np.polyfit(x, y, 1)[0])
    return MuDecayReport(d, C, tuple(ls), tuple(obs), tuple(bnd), slope, passed)


# -- transforms used by the anisotropic symbol ---------------------------------

@lru_cache(maxsize=4096)
def _mu_power(l, N, s):
    return funk_hecke_mu(lambda t: np.abs(t) ** (2.0 * s), l, N)


@lru_cache(maxsize=4096)
def _mu_signed_power(l, N, s):
    return funk_hecke_mu(lambda t: np.sign(t) * np.abs(t) ** (2.0 * s), l, N)


@lru_cache(maxsize=4096)
def _mu_t_log(l, N):
    return funk_hecke_mu(lambda t: t * np.log(np.where(t == 0.0, 1.0, np.abs(t))), l, N)


def _series_eval(a, weights, xi, tol, what):
    pts, single = _as_points(xi, a.N)
    pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    wc = weights * a.coefficients
    val = harmonic_basis(a.N, a.L_max, pts) @ wc
    per_degree = np.sqrt(np.bincount(a.degrees, weights=wc**2, minlength=a.L_max + 1))
    total = per_degree.sum()
    tail = per_degree[(3 * a.L_max) // 4 + 1:].sum()
    if total > 0 and tail > tol * total:
        warnings.warn(f"{what}: eigenvalue-weighted tail {tail / total:.2e} exceeds {tol:g}", TruncationWarning)
    return float(val[0]) if single else val


def cosine_transform(a, s, xi, tol=1e-8):
    """``int |xi . theta|^{2s} a(theta) d theta`` for unit ``xi`` (scalar or (M, N) array)."""
    if not 0.0 < s < 1.0:
        raise DomainError("s must lie in (0, 1)")
    deg = a.degrees
    mu = np.array([_mu_power(int(l), a.N, float(s)) if l % 2 == 0 else 0.0 for l in range(a.L_max + 1)])
    return _series_eval(a, mu[deg], xi, tol, "cosine_transform")


def h_s_eigenvalues(s, rho, N, L):
    """``mu(l, N)`` of ``t -> h_s(rho t)`` for l = 0..L (zero on even degrees).

    Uses the scaling law of ``h_s``: the kernel is a combination of
    ``sign(t)|t|^{2s}`` and ``t`` (``t log|t|`` and ``t`` when s = 1/2).
    """
    s = float(s)
    f1 = float(h_s_fast(1.0, s))
    out = np.zeros(L + 1)
    mu_t = funk_hecke_mu(lambda t: t, 1, N)
    for l in range(1, L + 1, 2):
        if abs(s - 0.5) < 1e-12:
            out[l] = -rho * _mu_t_log(l, N)
            if l == 1:
                out[l] += rho * (f1 - math.log(rho)) * mu_t
        else:
            amp = f1 + 1.0 / (1.0 - 2.0 * s)
            out[l] = amp * rho ** (2.0 * s) * _mu_signed_power(l, N, s)
            if l == 1:
                out[l] -= rho / (1.0 - 2.0 * s) * mu_t
    return out


def im_symbol_transform(a, s, rho, zeta, tol=1e-8):
    """``int a(theta) h_s(rho zeta . theta) d theta``; only the odd part of ``a`` contributes."""
    if not 0.0 < s < 1.0:
        raise DomainError("s must lie in (0, 1)")
    if not rho > 0:
        raise DomainError("rho must be positive")
    mu = h_s_eigenvalues(s, rho, a.N, a.L_max)
    return _series_eval(a, mu[a.degrees], zeta, tol, "im_symbol_transform")


# -- hypothesis checks ----------------------------------------------------------

def icosphere(level=3):
    """Unit vectors of a subdivided icosahedron (``10 * 4**level + 2`` points)."""
    p = (1.0 + math.sqrt(5.0)) / 2.0
    v = [(-1, p, 0), (1, p, 0), (-1, -p, 0), (1, -p, 0), (0, -1, p), (0, 1, p),
         (0, -1, -p), (0, 1, -p), (p, 0, -1), (p, 0, 1), (-p, 0, -1), (-p, 0, 1)]
    f = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11), (1, 5, 9), (5, 11, 4),
         (11, 10, 2), (10, 7, 6), (7, 1, 8), (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8),
         (3, 8, 9), (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    verts = [np.array(x, dtype=float) / np.linalg.norm(x) for x in v]
    for _ in range(level):
        cache = {}

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = verts[i] + verts[j]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        nf = []
        for a, b, c in f:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            nf += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        f = nf
    return np.array(verts)


def default_direction_grid(N):
    _check_N(N)
    if N == 2:
        psi = 2.0 * math.pi * np.arange(256) / 256
        return np.column_stack([np.cos(psi), np.sin(psi)])
    return icosphere(3)


@dataclass(frozen=True)
class PositivityReport:
    min_value: float
    max_value: float
    margin: float
    passed: bool


def positivity_check(a, s, xi_grid=None, margin=1e-3):
    """Sample the 2s-cosine transform of ``a``; pass iff its minimum exceeds ``margin * max``."""
    grid = default_direction_grid(a.N) if xi_grid is None else np.asarray(xi_grid, dtype=float)
    vals = np.atleast_1d(cosine_transform(a, s, grid))
    lo, hi = float(vals.min()), float(vals.max())
    return PositivityReport(lo, hi, margin, bool(hi > 0 and lo > margin * hi))


@dataclass(frozen=True)
class SobolevReport:
    norm_even: float
    norm_odd: float
    tail_share_even: float
    tail_share_odd: float
    passed: bool


def sobolev_orders(N, s):
    """Orders ``((N-1)/2, (N+2)/2 + 2s)`` required of the even and odd parts."""
    return (N - 1) / 2.0, (N + 2) / 2.0 + 2.0 * s


def sobolev_check(a, s, tail_fraction=0.1):
    """Weighted coefficient norms of ``a_even`` and ``a_odd`` and a summability test.

    A part passes when its weighted energy in the last quartile of stored
    degrees is below ``tail_fraction`` of its total.
    """
    if a.L_max < 8:
        raise InconclusiveError(f"L_max = {a.L_max} < 8 is too short to judge decay")
    tau_e, tau_o = sobolev_orders(a.N, s)
    l = np.arange(a.L_max + 1)
    lb = l * (l + a.N - 2) + 1.0
    E = a.degree_energy()
    cut = l > (3 * a.L_max) // 4

    def part(mask, tau):
        wE = np.where(mask, lb**tau * E, 0.0)
        tot = wE.sum()
        share = float(wE[cut].sum() / tot) if tot > 0 else 0.0
        return math.sqrt(tot), share

    ne, te = part(l % 2 == 0, tau_e)
    no, to = part(l % 2 == 1, tau_o)
    return SobolevReport(ne, no, te, to, bool(te < tail_fraction and to < tail_fraction))


# -- named densities -----------------------------------------------------------

def catalogue(name, N, **params):
    """Analytic densities accepted by name from spec files.

    ``uniform`` (a=1), ``cos2`` (``1 + eps cos 2 psi``, N=2), ``tilt``
    (``1 + eps theta_1``), ``vonmises`` (``exp(kappa theta_1)``) and
    ``cos2_pure`` (``cos 2 psi``, N=2, sign-changing with zero mean).
    """
    _check_N(N)
    if name == "uniform":
        return SphereFunction.constant(N, 1.0)
    if name in ("cos2", "cos2_pure"):
        if N != 2:
            raise DomainError(f"{name} is a circle density")
        eps = float(params.get("eps", 1.0))
        return SphereFunction.from_fourier(0.0 if name == "cos2_pure" else 1.0, cos=[0.0, eps])
    if name == "tilt":
        eps = float(params.get("eps", 0.5))
        c = np.zeros(n_coefficients(N, MIN_STORED_DEGREE))
        if N == 2:
            c[0] = math.sqrt(2.0 * math.pi)
            c[1] = eps * math.sqrt(math.pi)
        else:
            c[0] = math.sqrt(4.0 * math.pi)
            c[3] = eps * math.sqrt(4.0 * math.pi / 3.0)
        return SphereFunction(N, c)
    if name == "vonmises":
        kappa = float(params.get("kappa", 1.0))
        L = 24 if N == 2 else 16
        return expand(lambda th: np.exp(kappa * th[:, 0]), N, L)
    raise DomainError(f"unknown sphere density {name!r}")
