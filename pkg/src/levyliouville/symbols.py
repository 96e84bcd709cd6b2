"""Symbols ``eta(xi) = -int [exp(i xi.y) - 1 - i xi.y 1_B(y)] d nu~(y)``.

``nu~`` is the reflected measure, so that ``F(L_{nu~} phi) = eta phi_hat``
with ``phi_hat(xi) = int phi(x) exp(-i x.xi) dx``.  Two independent routes
are provided:

closed forms
    ``|xi|^{2s}`` (fractional Laplacian), ``(|xi|^2+1)^s - 1`` (relativistic),
    ``xi coth(pi xi / 2) - 2/pi`` (ILW) and, for anisotropic densities,
    the 2s-cosine transform for the real part and the ``h_s`` transform for
    the imaginary part, both diagonal on spherical harmonics.
quadrature
    The radial integrals ``C(tau) = int (1 - cos(r tau)) g r^{N-1} dr`` and
    ``S(tau) = int (sin(r tau) - r tau 1_{r<1}) g r^{N-1} dr`` at every node of
    a zonal rule around ``xi``, then
    ``eta(rho zeta) = int a~(theta) [C(rho zeta.theta) - i S(rho zeta.theta)] d theta``.

:func:`duality_check` compares a discrete Fourier transform of ``L_{nu~} phi``
with ``eta phi_hat``; :func:`zero_set_scan` samples ``eta + P(-i xi)``.
"""
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy import interpolate, ndimage

from ._kernels import CHI_WIDTH, chi
from .errors import BoundaryLeakageError, DomainError, UnsupportedError
from .measures import (
    ANISOTROPIC, FRACTIONAL_LAPLACIAN, ILW, RELATIVISTIC, reflect,
)
from .operator_apply import (
    DEFAULT_APPLY, _multipole_1d_tail, apply,
)
from .polynomial import ComplexPolynomial
from .quadrature import composite_gl, power_fourier_tail_fast, radial_transform
from .special_fn import frac_laplacian_constant
from .sphere import cosine_transform, im_symbol_transform
from .testfunctions import GAUSS, CandidateSolution, Trig

# inner radius of the smooth cutoff in the 2-D monopole model
MONOPOLE_RADIUS = 4.0

__all__ = [
    "ComplexPolynomial", "Symbol", "symbol_closed_form", "symbol_quadrature", "quadrature_symbol",
    "symbol", "DualityReport", "duality_check", "Cluster", "ZeroSetReport", "zero_set_scan",
]


def _as_freqs(xi, N):
    xi = np.asarray(xi, dtype=float)
    if N == 1 and xi.ndim == 1 and xi.size != 1:
        return xi.reshape(-1, 1), False
    single = xi.ndim <= 1
    pts = xi.reshape(1, N) if single else xi
    if pts.shape[1] != N:
        raise DomainError(f"expected frequencies with {N} coordinates")
    return pts, single


class Symbol:
    """Evaluable ``xi -> eta(xi)``.

    Parameters
    ----------
    func : callable
        Maps an (M, N) array of frequencies to M complex values.
    provenance : str
        ``"closed_form:<kind>"`` or ``"quadrature:<kind>"``.
    N : int
    s : float or None
        Growth order (``|eta(xi)| ~ |xi|^{2s}``); used to scale zero-set tolerances.
    smooth_at_origin : bool
        False when ``eta`` is only Hölder at 0 (power-law kernels).
    """

    def __init__(self, func, provenance, N, s, smooth_at_origin):
        self._func = func
        self.provenance = provenance
        self.N = int(N)
        self.s = s
        self.smooth_at_origin = bool(smooth_at_origin)

    def __repr__(self):
        return f"Symbol({self.provenance}, N={self.N}, s={self.s})"

    def __call__(self, xi):
        pts, single = _as_freqs(xi, self.N)
        out = np.asarray(self._func(pts), dtype=complex)
        return complex(out[0]) if single else out


def _symbol_order(m):
    return 0.5 if m.kind == ILW else m.order


# -- closed forms -------------------------------------------------------------

def symbol_closed_form(m):
    """Closed-form :class:`Symbol` of a named measure (UserRadial is unsupported)."""
    N = m.N
    if m.kind == FRACTIONAL_LAPLACIAN:
        s = m.s

        def f(X):
            return np.linalg.norm(X, axis=1) ** (2.0 * s) + 0j
    elif m.kind == RELATIVISTIC:
        s = m.s

        def f(X):
            return (np.sum(X * X, axis=1) + 1.0) ** s - 1.0 + 0j
    elif m.kind == ILW:
        def f(X):
            x = X[:, 0]
            a = 0.5 * math.pi * np.abs(x)
            with np.errstate(divide="ignore", invalid="ignore"):
                v = np.where(a > 1e-4, np.abs(x) / np.tanh(np.where(a > 1e-4, a, 1.0)) - 2.0 / math.pi,
                             # series: (2/pi)(a^2/3 - a^4/45 + ...)
                             (2.0 / math.pi) * (a * a / 3.0 - a**4 / 45.0))
            return v + 0j
    elif m.kind == ANISOTROPIC:
        return _anisotropic_closed_form(m)
    else:
        raise UnsupportedError(f"no closed-form symbol for kind {m.kind}")
    return Symbol(f, f"closed_form:{m.kind}", N, _symbol_order(m), m.kind in (RELATIVISTIC, ILW))


def _anisotropic_closed_form(m):
    N, s, a = m.N, m.s, m.angular
    cN = frac_laplacian_constant(N, s)
    re_fac = cN / (2.0 * frac_laplacian_constant(1, s))
    odd = a.has_odd_part()

    def f(X):
        rho = np.linalg.norm(X, axis=1)
        out = np.zeros(X.shape[0], dtype=complex)
        nz = rho > 0
        if not np.any(nz):
            return out
        zeta = X[nz] / rho[nz, None]
        re = re_fac * rho[nz] ** (2.0 * s) * np.atleast_1d(cosine_transform(a, s, zeta))
        im = np.zeros(re.size)
        if odd:
            # the h_s eigenvalues depend on rho; group equal radii
            r_nz = rho[nz]
            keys, inv = np.unique(r_nz, return_inverse=True)
            for j, r in enumerate(keys):
                sel = inv == j
                im[sel] = cN * np.atleast_1d(im_symbol_transform(a, s, r, zeta[sel]))
        out[nz] = re + 1j * im
        return out

    return Symbol(f, f"closed_form:{m.kind}", N, s, False)


# -- quadrature route --------------------------------------------------------------

@lru_cache(maxsize=32)
def _zonal_u_rule(L, n=10, levels=22):
    # nodes on [0, pi/2), graded toward pi/2 where t = cos u changes sign
    half = 0.5 * math.pi
    h = min(math.pi / 8.0, 3.0 / (L + 1.0))
    br = [0.0]
    while br[-1] < half - h:
        br.append(br[-1] + h)
    d = half - br[-1]
    for _ in range(levels):
        d *= 0.5
        br.append(half - d)
    br.append(half)
    return composite_gl(np.array(br), n)


def _frame(zeta):
    # orthonormal e1, e2 completing zeta in R^3
    k = int(np.argmin(np.abs(zeta)))
    e = np.zeros(3)
    e[k] = 1.0
    e1 = e - zeta * (zeta @ e)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(zeta, e1)


def _zonal_average(at, zeta, u, L):
    """Integral of ``at`` over the (N-2)-sphere ``{theta : zeta.theta = cos u}``."""
    N = zeta.size
    if N == 2:
        psi = math.atan2(zeta[1], zeta[0])
        A = np.zeros(u.size)
        for sgn in (1.0, -1.0):
            th = np.column_stack([np.cos(psi + sgn * u), np.sin(psi + sgn * u)])
            A += at(th) if at is not None else 1.0
        return A
    if N == 3:
        if at is None:
            return np.full(u.size, 2.0 * math.pi)
        e1, e2 = _frame(zeta)
        K = 2 * L + 2
        ph = 2.0 * math.pi * np.arange(K) / K
        ring = np.cos(ph)[:, None] * e1[None, :] + np.sin(ph)[:, None] * e2[None, :]
        th = np.cos(u)[:, None, None] * zeta[None, None, :] + np.sin(u)[:, None, None] * ring[None, :, :]
        return (2.0 * math.pi / K) * at(th.reshape(-1, 3)).reshape(u.size, K).sum(axis=1)
    raise UnsupportedError("quadrature symbols are implemented for N <= 3")


def symbol_quadrature(m, xi):
    """``eta(xi)`` by radial quadrature along a zonal rule (point or (M, N) array)."""
    pts, single = _as_freqs(xi, m.N)
    rd = m.radial_density()
    mt = reflect(m)
    at = mt.angular
    out = np.zeros(pts.shape[0], dtype=complex)
    for i, x in enumerate(pts):
        rho = float(np.linalg.norm(x))
        if rho == 0.0:
            continue
        if m.N == 1:
            wp = float(at(np.array([[1.0]]))[0]) if at is not None else 1.0
            wm = float(at(np.array([[-1.0]]))[0]) if at is not None else 1.0
            sg = 1.0 if x[0] > 0 else -1.0
            C = radial_transform(rd, rho, "cos")[0]
            S = radial_transform(rd, rho, "sin")[0]
            # theta = +1 sees S(xi), theta = -1 sees S(-xi) = -S(xi)
            out[i] = (wp + wm) * C - 1j * sg * (wp - wm) * S
            continue
        zeta = x / rho
        L = at.L_max if at is not None else 0
        u, w = _zonal_u_rule(L)
        t = np.cos(u)
        C = np.array([radial_transform(rd, rho * ti, "cos")[0] for ti in t])
        S = np.array([radial_transform(rd, rho * ti, "sin")[0] for ti in t])
        jac = np.sin(u) ** (m.N - 2)
        # u and pi - u share |t|; S is odd in t
        A1 = _zonal_average(at, zeta, u, L)
        A2 = _zonal_average(at, zeta, math.pi - u, L)
        re = np.dot(w * jac, C * (A1 + A2))
        im = -np.dot(w * jac, S * (A1 - A2))
        out[i] = re + 1j * im
    return complex(out[0]) if single else out


def quadrature_symbol(m):
    """:func:`symbol_quadrature` wrapped as a :class:`Symbol`."""
    return Symbol(lambda X: symbol_quadrature(m, X), f"quadrature:{m.kind}", m.N, _symbol_order(m),
                  m.profile.exponential())


def symbol(m, method="auto"):
    """Closed form where available (``method='auto'``), else quadrature."""
    if method == "quadrature":
        return quadrature_symbol(m)
    try:
        return symbol_closed_form(m)
    except UnsupportedError:
        if method == "closed":
            raise
        return quadrature_symbol(m)


# -- Fourier duality ---------------------------------------------------------------

@dataclass(frozen=True)
class DualityReport:
    max_rel_err: float
    n_frequencies: int
    L: float
    n: int
    symbol: str
    exterior: str


def _centroid(phi):
    # first moment over the mass of a GaussianPoly (cancels the dipole term)
    M0 = phi.moment((0,) * phi.N)
    if M0 == 0.0:
        return phi.center.copy()
    e = np.eye(phi.N, dtype=int)
    return phi.center + np.array([phi.moment(tuple(e[i])) for i in range(phi.N)]) / M0


def duality_check(m, phi, L=20.0, n=None, cfg=None, threshold=1e-4):
    """Compare the discrete transform of ``L_{nu~} phi`` with ``eta phi_hat``.

    The interior ``[-L, L]^N`` is summed by the trapezoid rule on ``n + 1``
    points per axis.  For power-law kernels, where ``L_{nu~} phi`` decays
    only algebraically, the slow part is handled analytically: in 1-D the
    exterior is added from the multipole expansion of ``phi``; in 2-D a
    smoothly cut-off monopole field is subtracted on the grid and its exact
    transform added back, leaving a quadrupole remainder.
    The relative error is taken over the grid frequencies with
    ``|phi_hat| > threshold`` other than ``xi = 0``, where both sides vanish.
    """
    N = m.N
    if N not in (1, 2):
        raise UnsupportedError("duality_check supports N = 1 and N = 2")
    if phi.N != N or getattr(phi, "family", None) != GAUSS:
        raise DomainError("duality_check needs a GaussianPoly test function of matching N")
    n = n or (2048 if N == 1 else 96)
    if cfg is None:
        cfg = DEFAULT_APPLY
    h = 2.0 * L / n
    ax = -L + h * np.arange(n + 1)
    tw = np.full(n + 1, h)
    tw[0] = tw[-1] = 0.5 * h
    mt = reflect(m)
    grid = np.stack(np.meshgrid(*([ax] * N), indexing="ij"), axis=-1).reshape(-1, N)
    edge = np.any(np.abs(np.abs(grid) - L) < 1e-9, axis=1)
    if float(np.max(np.abs(phi(grid[edge])))) > 1e-8:
        raise BoundaryLeakageError("phi is not below 1e-8 on the boundary of the box")
    f = apply(mt, phi, grid, cfg)
    power = m.is_power_law()
    if power and N == 2:
        f = f - _monopole_model(m, phi, grid)
    if not power and float(np.max(np.abs(f[edge]))) > 1e-8 * float(np.max(np.abs(f))):
        raise BoundaryLeakageError("L phi is not negligible on the box boundary; enlarge L")

    dxi = 2.0 * math.pi / (2.0 * L)
    kmax = n // 2
    ks = np.arange(-kmax, kmax)
    fk = np.stack(np.meshgrid(*([ks * dxi] * N), indexing="ij"), axis=-1).reshape(-1, N)
    ph = phi.fourier(fk)
    keep = (np.abs(ph) > threshold) & (np.linalg.norm(fk, axis=1) > 0)
    fk, ph = fk[keep], ph[keep]
    eta = symbol(m)

    if N == 1:
        E = np.exp(-1j * np.outer(fk[:, 0], ax))
        dft = E @ (tw * f)
    else:
        F = f.reshape(n + 1, n + 1) * np.outer(tw, tw)
        E1 = np.exp(-1j * np.outer(fk[:, 0], ax))
        E2 = np.exp(-1j * np.outer(fk[:, 1], ax))
        dft = np.einsum("ka,ab,kb->k", E1, F, E2)

    exterior = "none"
    if power:
        if N == 1:
            dft = dft + _exterior_1d(mt, phi, L, fk[:, 0])
            exterior = "multipole"
        else:
            dft = dft + _monopole_model_fourier(m, phi, fk)
            exterior = "monopole"
    exact = eta(fk) * ph
    rel = np.abs(dft - exact) / np.abs(exact)
    return DualityReport(float(rel.max()) if rel.size else 0.0, int(rel.size), float(L), int(n),
                         eta.provenance, exterior)


def _exterior_1d(mt, phi, L, xis):
    c = _centroid(phi)
    out = np.zeros(xis.size, dtype=complex)
    for j, x in enumerate(xis):
        uc = CandidateSolution(Trig(1, [([x], 1.0, 0.0)]))
        us = CandidateSolution(Trig(1, [([x], 0.0, 1.0)]))
        for side, R in ((1, L - c[0]), (-1, L + c[0])):
            out[j] += _multipole_1d_tail(mt, phi, uc, c, R, side) - 1j * _multipole_1d_tail(mt, phi, us, c, R, side)
    return out


def _angular_on_circle(ang, psi):
    # a(cos psi, sin psi) by Horner in e^{i psi}
    if ang is None:
        return 1.0
    cf = ang.coefficients
    z = np.concatenate([[cf[0] / math.sqrt(2.0 * math.pi)],
                        (cf[1::2] - 1j * cf[2::2]) / math.sqrt(math.pi)])
    e1 = np.exp(1j * psi)
    acc = np.full(np.shape(psi), z[-1])
    for zl in z[-2::-1]:
        acc = acc * e1 + zl
    return np.real(acc)


def _monopole_model(m, phi, grid, rho=MONOPOLE_RADIUS):
    """Values on ``grid`` of ``g = -M0 kappa(x - c) (1 - chi(|x - c| / rho))``.

    ``kappa`` is the density of ``m``; far from the support of ``phi`` the
    field ``L_{nu~} phi`` equals ``g`` up to a quadrupole remainder, because
    the dipole term vanishes about the centroid ``c``.
    """
    c = _centroid(phi)
    M0 = float(np.real(phi.fourier(np.zeros(2))))
    Cp, p = m.radial_density().power  # g r^{N-1} = Cp r^-p
    d = grid - c
    r = np.linalg.norm(d, axis=1)
    out = np.zeros(r.size)
    far = r > rho
    rf = r[far]
    out[far] = -M0 * Cp * rf ** (-p - 1.0) * (1.0 - chi(rf / rho)) * _angular_on_circle(
        m.angular, np.arctan2(d[far, 1], d[far, 0]))
    return out


def _monopole_model_fourier(m, phi, fk, rho=MONOPOLE_RADIUS, chunk=256, n=8):
    # g_hat(xi) = -M0 Cp e^{-i c.xi} int a(theta) H(theta.xi) dtheta with
    # H(w) = int_rho^inf (1 - chi(r / rho)) r^-p e^{-i w r} dr
    c = _centroid(phi)
    M0 = float(np.real(phi.fourier(np.zeros(2))))
    Cp, p = m.radial_density().power
    t, tw = np.polynomial.legendre.leggauss(n)
    base = _relative_angle_edges()
    half = 0.5 * np.diff(base)
    u = ((base[:-1] + half)[:, None] + half[:, None] * t).ravel()
    w = (half[:, None] * tw).ravel()
    top = 1.0 + CHI_WIDTH
    rs, rw = composite_gl(np.linspace(1.0, top, 25), 16)
    rw = rw * (1.0 - chi(rs)) * rs ** (-p)
    # the transition part of H is entire in w; spline it from a fine table
    wmax = rho * float(np.max(np.linalg.norm(fk, axis=1), initial=0.0)) + 1.0
    wt = np.linspace(0.0, wmax, int(wmax / 0.01) + 2)
    tab = np.exp(-1j * np.outer(wt, rs)) @ rw
    spl = interpolate.CubicSpline(wt, np.column_stack([tab.real, tab.imag]))
    out = np.zeros(fk.shape[0], dtype=complex)
    for lo in range(0, fk.shape[0], chunk):
        xi = fk[lo:lo + chunk]
        psi = np.arctan2(xi[:, 1], xi[:, 0])[:, None] + u[None, :]
        om = rho * np.linalg.norm(xi, axis=1)[:, None] * np.cos(u)[None, :]
        tv = spl(np.abs(om))
        H = tv[..., 0] + 1j * np.sign(om) * tv[..., 1]
        H = H + top ** (1.0 - p) * power_fourier_tail_fast(p, om * top)
        val = (H * _angular_on_circle(m.angular, psi)) @ w
        out[lo:lo + chunk] = -M0 * Cp * rho ** (1.0 - p) * np.exp(-1j * (xi @ c)) * val
    return out


@lru_cache(maxsize=1)
def _relative_angle_edges(levels=12):
    # panel edges in the angle relative to xi: graded toward u = +-pi/2, where
    # theta . xi vanishes, and at most pi/48 elsewhere for the oscillation
    br = {0.0, 2.0 * math.pi}
    for k in (0.5 * math.pi, 1.5 * math.pi):
        br.add(k)
        d = math.pi / 64.0
        for _ in range(levels):
            br.update((k - d, k + d))
            d *= 0.5
    br = np.array(sorted(br))
    fine = [br[0]]
    for a, b in zip(br[:-1], br[1:]):
        pieces = max(1, int(math.ceil((b - a) / (math.pi / 48.0))))
        fine.extend(np.linspace(a, b, pieces + 1)[1:])
    return np.array(fine)


# -- zero sets ---------------------------------------------------------------------

@dataclass(frozen=True)
class Cluster:
    center: tuple
    n_points: int
    radius: float
    min_modulus: float
    kind: str  # "zero" or "singular"


@dataclass(frozen=True)
class ZeroSetReport:
    zero_points: tuple
    clusters: tuple
    G_subset_origin: bool
    spacing: float
    certificate: str


def zero_set_scan(eta, P=None, L=4.0, resolution=64, tol=1e-2):
    """Sample ``|eta(xi) + P(-i xi)| / (1 + |xi|^{2s})`` on ``[-L, L]^N``.

    Grid points below ``tol`` are grouped into connected clusters.  When
    ``eta`` is not smooth at the origin, the origin is reported as a
    ``"singular"`` cluster: it then belongs to the exceptional set through
    the regularity requirement on ``eta`` even if it is not a zero.
    ``G_subset_origin`` holds when every cluster lies within two grid
    spacings of 0.  The scan is sampling evidence, not a proof.
    """
    N = eta.N
    P = ComplexPolynomial.zero(N) if P is None else P
    if resolution < 64:
        raise DomainError("resolution must be at least 64 points per axis")
    if not tol > 0:
        raise DomainError("tol must be positive")
    npts = 2 * (resolution // 2) + 1  # odd, so the origin is a grid point
    ax = np.linspace(-L, L, npts)
    h = float(ax[1] - ax[0])
    grid = np.stack(np.meshgrid(*([ax] * N), indexing="ij"), axis=-1).reshape(-1, N)
    r = np.linalg.norm(grid, axis=1)
    order = eta.s if eta.s is not None else 0.5
    val = np.abs(eta(grid) + P.at_minus_i_xi(grid)) / (1.0 + r ** (2.0 * order))
    low = (val < tol).reshape((npts,) * N)
    lab, nlab = ndimage.label(low, structure=np.ones((3,) * N))
    lab = lab.ravel()
    clusters = []
    origin = int(np.argmin(r))
    in_cluster = lab > 0
    for k in range(1, nlab + 1):
        sel = lab == k
        pts = grid[sel]
        cen = pts.mean(axis=0)
        clusters.append(Cluster(tuple(float(v) for v in cen), int(sel.sum()),
                                float(np.max(np.linalg.norm(pts - cen, axis=1))), float(val[sel].min()), "zero"))
    if not eta.smooth_at_origin and lab[origin] == 0:
        clusters.append(Cluster((0.0,) * N, 1, 0.0, float(val[origin]), "singular"))
        in_cluster[origin] = True
    zero_pts = tuple(tuple(float(v) for v in p) for p in grid[lab > 0])
    near = all(
        np.all(np.linalg.norm(grid[lab == k], axis=1) < 2.0 * h) for k in range(1, nlab + 1)
    )
    rest = val[~in_cluster]
    mn = float(rest.min()) if rest.size else math.nan
    cert = (f"min |eta+P|/(1+|xi|^{2 * order:g}) = {mn:.6e} over {rest.size} grid points outside clusters "
            f"(spacing {h:.6g}); sampling evidence, not a proof")
    return ZeroSetReport(zero_pts, tuple(sorted(clusters, key=lambda c: c.center)), bool(near), h, cert)
