"""Lévy measures with a density ``kappa(y) = g(|y|) a(y/|y|)``.

Named kinds are the fractional Laplacian, its anisotropic version, the
relativistic operator (Bessel kernel), the intermediate long wave operator
(``sinh^-2`` kernel, N=1) and user radial profiles.  Every measure carries
an operator order ``s`` where one exists and a declared decay order
``sigma`` (the exponent in ``|nu|(B_1(x)) = O(|x|^{-N-2 sigma})``).
"""
from dataclasses import dataclass, field, replace
import math

import numpy as np

from .errors import DivergenceError, DomainError, ToleranceNotMetError
from .quadrature import RadialDensity, gauss_legendre
from .special_fn import bessel_k_fast, frac_laplacian_constant, gamma
from .sphere import SphereFunction, sphere_rule

FRACTIONAL_LAPLACIAN = "FractionalLaplacian"
ANISOTROPIC = "Anisotropic"
RELATIVISTIC = "Relativistic"
ILW = "IntermediateLongWave"
USER_RADIAL = "UserRadial"
KINDS = (FRACTIONAL_LAPLACIAN, ANISOTROPIC, RELATIVISTIC, ILW, USER_RADIAL)

# radial profile codes shared with the compiled kernels
POWER, BESSEL, SINH, TEMPERED = 0, 1, 2, 3


@dataclass(frozen=True)
class RadialProfile:
    """``g(r)`` by code: POWER ``c r^-p``; BESSEL ``c r^-nu K_nu(r)``;
    SINH ``c / sinh(r)^2``; TEMPERED ``c r^-p exp(-lam r)``."""

    code: int
    c: float
    p: float = 0.0
    nu: float = 0.0
    lam: float = 0.0

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.code == POWER:
            return self.c * r ** (-self.p)
        if self.code == BESSEL:
            return self.c * r ** (-self.nu) * bessel_k_fast(self.nu, r)
        if self.code == SINH:
            with np.errstate(over="ignore"):
                return self.c / np.sinh(r) ** 2
        if self.code == TEMPERED:
            return self.c * r ** (-self.p) * np.exp(-self.lam * r)
        raise DomainError(f"unknown profile code {self.code}")

    def exponential(self):
        return self.code in (BESSEL, SINH) or (self.code == TEMPERED and self.lam > 0)

    def cutoff(self, N, rel=1e-18):
        """Radius beyond which ``int_R^inf g r^{N-1} dr`` is below ``rel * g(1)``."""
        if not self.exponential():
            return None
        ref = abs(float(self(np.array([1.0]))[0]))
        R = 2.0
        while True:
            gR = abs(float(self(np.array([R]))[0])) * R ** (N + 1)
            if gR < rel * ref:
                return R
            R += 1.0


def tempered(c, alpha, lam, N=1):
    """User radial catalogue entry ``c r^{-N-alpha} exp(-lam r)``."""
    if not c > 0 or not 0.0 < alpha < 2.0 or lam < 0:
        raise DomainError("tempered(c, alpha, lam) needs c > 0, 0 < alpha < 2, lam >= 0")
    return RadialProfile(TEMPERED, float(c), p=N + float(alpha), lam=float(lam))


def relativistic_constant(N, s):
    """Constant of ``c r^{-nu} K_nu(r)`` reproducing the symbol ``(|xi|^2+1)^s - 1``."""
    nu = (N + 2.0 * s) / 2.0
    return frac_laplacian_constant(N, s) * 2.0 ** (1.0 - nu) / gamma(nu)


def unit_sphere_area(N):
    return 2.0 * math.pi ** (N / 2.0) / gamma(N / 2.0)


@dataclass(frozen=True)
class LevyMeasure:
    """Immutable description of a Lévy measure; use the constructors below."""

    kind: str
    N: int
    profile: RadialProfile
    s: float = None
    sigma: float = None
    a: SphereFunction = None
    reflected: bool = False
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown measure kind {self.kind!r}")
        if int(self.N) != self.N or self.N < 1:
            raise DomainError("N must be a positive integer")
        if self.s is not None and not 0.0 < self.s < 1.0:
            raise DomainError(f"s must lie in (0, 1), got {self.s}")
        if self.sigma is None or not self.sigma > 0:
            raise DomainError("a positive decay order sigma is required")
        if self.kind == ANISOTROPIC:
            if self.a is None or self.a.N != self.N:
                raise DomainError("anisotropic measures need a SphereFunction of matching N")
        elif self.a is not None:
            raise DomainError("only anisotropic measures carry a sphere density")

    @property
    def order(self):
        """Operator order used for growth scalings: ``s`` if defined else ``sigma``."""
        return self.s if self.s is not None else self.sigma

    @property
    def angular(self):
        """Sphere density of this measure after reflection (None if isotropic)."""
        if self.a is None:
            return None
        return self.a.reflected() if self.reflected else self.a

    def radial_density(self):
        """:class:`RadialDensity` of ``g(r) r^{N-1}`` (polar radial weight)."""
        pr, N = self.profile, self.N
        if pr.code == POWER or (pr.code == TEMPERED and pr.lam == 0):
            return RadialDensity(lambda r: pr(r) * r ** (N - 1), power=(pr.c, pr.p - N + 1))
        return RadialDensity(lambda r: pr(r) * r ** (N - 1), cutoff=pr.cutoff(N))

    def is_power_law(self):
        pr = self.profile
        return pr.code == POWER or (pr.code == TEMPERED and pr.lam == 0)


def fractional_laplacian(N, s):
    c = frac_laplacian_constant(N, s)
    return LevyMeasure(FRACTIONAL_LAPLACIAN, N, RadialProfile(POWER, c, p=N + 2.0 * s), s=s, sigma=s)


def anisotropic(a, s):
    c = frac_laplacian_constant(a.N, s)
    return LevyMeasure(ANISOTROPIC, a.N, RadialProfile(POWER, c, p=a.N + 2.0 * s), s=s, sigma=s, a=a)


def relativistic(N, s, sigma=None):
    nu = (N + 2.0 * s) / 2.0
    pr = RadialProfile(BESSEL, relativistic_constant(N, s), nu=nu)
    return LevyMeasure(RELATIVISTIC, N, pr, s=s, sigma=s if sigma is None else sigma)


def intermediate_long_wave(sigma):
    return LevyMeasure(ILW, 1, RadialProfile(SINH, 1.0 / math.pi), sigma=sigma)


def user_radial(N, profile, sigma, label="user"):
    return LevyMeasure(USER_RADIAL, N, profile, sigma=sigma, label=label)


def reflect(m):
    """The measure ``E -> m(-E)``."""
    return replace(m, reflected=not m.reflected)


def density(m, y):
    """Signed density of ``m`` at ``y != 0``; accepts a point or an (M, N) array."""
    y = np.asarray(y, dtype=float)
    single = y.ndim <= 1
    pts = y.reshape(-1, m.N) if not single else y.reshape(1, m.N)
    r = np.linalg.norm(pts, axis=1)
    if np.any(r == 0):
        raise DomainError("the density is undefined at y = 0")
    val = m.profile(r)
    if m.a is not None:
        val = val * m.angular(pts / r[:, None])
    return float(val[0]) if single else val


def _abs_angular_mass(m):
    if m.N == 1:
        return 2.0
    if m.a is None:
        return unit_sphere_area(m.N)
    pts, w = sphere_rule(m.N, 128 if m.N == 2 else 48)
    return float(np.dot(w, np.abs(m.a(pts))))


def total_mass(m):
    """``int min(1, |y|^2) d|nu|(y)`` by radial quadrature split at r = 1."""
    rd = m.radial_density()
    try:
        inner = rd.moment(2, 0.0, 1.0)
    except (DivergenceError, ToleranceNotMetError) as exc:
        raise DivergenceError(f"min(1,|y|^2) is not integrable near 0: {exc}") from exc
    outer = rd.tail_mass(1.0)
    M = _abs_angular_mass(m) * (inner + outer)
    if not (np.isfinite(M) and M > 0):
        raise DivergenceError(f"total mass is not finite and positive: {M}")
    return M


@dataclass(frozen=True)
class DecayReport:
    radii: tuple
    ratios: tuple
    sigma: float
    passed: bool


def _ball_directions(N):
    if N == 1:
        return np.array([[1.0], [-1.0]]), np.ones(2)
    return sphere_rule(N, 24)


def ball_mass(m, x, n_radial=24):
    """``|nu|(B_1(x))`` for ``|x| >= 2`` by polar product quadrature around ``x``."""
    x = np.asarray(x, dtype=float)
    if np.linalg.norm(x) < 2.0:
        raise DomainError("ball_mass requires |x| >= 2 (singularity outside the ball)")
    t, wt = gauss_legendre(n_radial)
    rho = 0.5 * (t + 1.0)
    wr = 0.5 * wt * rho ** (m.N - 1)
    dirs, wd = _ball_directions(m.N)
    pts = x[None, None, :] + rho[:, None, None] * dirs[None, :, :]
    vals = np.abs(density(m, pts.reshape(-1, m.N))).reshape(rho.size, -1)
    val = float(wr @ vals @ wd)
    if not np.isfinite(val):
        raise ToleranceNotMetError("ball mass quadrature produced a non-finite value")
    return val


def decay_check(m, radii=(4.0, 8.0, 16.0), sigma=None, slack=0.2):
    """Empirical check of ``|nu|(B_1(x)) |x|^{N+2 sigma}`` staying bounded.

    Sample points lie on the coordinate axes (both signs); the ratio at each
    radius is the maximum over them.  Passes when every ratio is finite and
    none exceeds ``(1 + slack)`` times its predecessor.
    """
    radii = tuple(float(r) for r in radii)
    if any(r < 2 for r in radii) or list(radii) != sorted(radii):
        raise DomainError("radii must be increasing and >= 2")
    sig = m.sigma if sigma is None else sigma
    axes = np.vstack([np.eye(m.N), -np.eye(m.N)])
    ratios = []
    for R in radii:
        mass = max(ball_mass(m, R * e) for e in axes)
        ratios.append(mass * R ** (m.N + 2.0 * sig))
    ok = all(np.isfinite(r) for r in ratios) and all(
        b <= (1.0 + slack) * a for a, b in zip(ratios, ratios[1:])
    )
    return DecayReport(radii, tuple(ratios), sig, bool(ok))
