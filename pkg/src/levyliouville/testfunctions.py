"""Closed-form functions with exact derivatives.

Families
--------
GaussianPoly
    ``sum_alpha c_alpha (x-c)^alpha exp(-|x-c|^2 / (2 w^2))``; exact Fourier
    transform ``phi_hat(xi) = int phi(x) exp(-i x.xi) dx``.
Bump
    ``amp * prod_i b((x_i - c_i)/w)`` with ``b(t) = exp(-1/(1-t^2))``.
Trig
    Finite sums of plane waves ``A cos(k.x) + B sin(k.x)`` (bounded, not
    integrable: pointwise use only).
Polynomial
    ``sum_alpha c_alpha x^alpha`` (growth class, pointwise use only).
Sum
    Linear combinations of the above.

All evaluators take an (M, N) array of points (or a single point).
"""
from functools import lru_cache
import itertools
import math

import numpy as np
from numpy.polynomial import Polynomial as P1

from ._kernels import gauss_poly
from .errors import DomainError, InsufficientGridError

GAUSS = "GaussianPoly"
BUMP = "Bump"
TRIG = "Trig"
POLY = "Polynomial"
SUM = "Sum"

# |t| beyond which exp(-t^2/2) t^d is below ~1e-17 of its peak for small d
GAUSS_SUPPORT = 9.0


def multi_indices(N, k):
    """All multi-indices of length ``N`` with total order exactly ``k``."""
    return [a for a in itertools.product(range(k + 1), repeat=N) if sum(a) == k]


def _points(X, N):
    X = np.asarray(X, dtype=float)
    single = X.ndim <= 1
    X = X.reshape(1, N) if single else X
    if X.shape[1] != N:
        raise DomainError(f"expected points with {N} coordinates")
    return X, single


def _ret(v, single):
    return v[0] if single else v


class TestFunction:
    """Common interface; see the module docstring for the families."""

    __test__ = False  # not a pytest class
    family = None
    localized = False
    pointwise_only = True

    def __init__(self, N):
        if int(N) != N or N < 1:
            raise DomainError("N must be a positive integer")
        self.N = int(N)

    # -- evaluation ---------------------------------------------------------
    def __call__(self, X):
        return self.derivative((0,) * self.N, X)

    def derivative(self, alpha, X):
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.N or min(alpha) < 0:
            raise DomainError("bad multi-index")
        Xa, single = _points(X, self.N)
        return _ret(self._derivative(alpha, Xa), single)

    def gradient(self, X):
        Xa, single = _points(X, self.N)
        g = np.column_stack([self._derivative(tuple(int(i == j) for i in range(self.N)), Xa) for j in range(self.N)])
        return _ret(g, single)

    def hessian(self, X):
        Xa, single = _points(X, self.N)
        H = np.empty((Xa.shape[0], self.N, self.N))
        for i in range(self.N):
            for j in range(i, self.N):
                a = [0] * self.N
                a[i] += 1
                a[j] += 1
                H[:, i, j] = H[:, j, i] = self._derivative(tuple(a), Xa)
        return _ret(H, single)

    def directional(self, k, x, dirs):
        """``D^k phi(x)[theta, ..., theta]`` for each row ``theta`` of ``dirs``."""
        x = np.asarray(x, dtype=float).reshape(1, self.N)
        dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
        out = np.zeros(dirs.shape[0])
        fk = math.factorial(k)
        for a in multi_indices(self.N, k):
            coef = fk / math.prod(math.factorial(ai) for ai in a)
            d = float(self._derivative(a, x)[0])
            if d != 0.0:
                out += coef * d * np.prod(dirs ** np.array(a), axis=1)
        return out

    # -- structure ----------------------------------------------------------
    def components(self):
        """Pairs ``(weight, atom)`` whose weighted sum is this function."""
        return [(1.0, self)]

    def __add__(self, other):
        return Sum([(1.0, self), (1.0, other)])

    def __mul__(self, c):
        return Sum([(float(c), self)])

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def translated(self, h):
        raise NotImplementedError

    @property
    def length_scale(self):
        return 1.0


class GaussianPoly(TestFunction):
    """Polynomial times a Gaussian, centred at ``center`` with width ``width``.

    Parameters
    ----------
    N : int
    terms : dict
        Multi-index -> real coefficient of ``(x - center)^alpha``.
    center : array_like, optional
    width : float, optional
    """

    family = GAUSS
    localized = True
    pointwise_only = False

    def __init__(self, N, terms=None, center=None, width=1.0):
        super().__init__(N)
        terms = {(0,) * self.N: 1.0} if terms is None else terms
        self.terms = {}
        for a, c in terms.items():
            a = tuple(int(v) for v in a)
            if len(a) != self.N or min(a) < 0:
                raise DomainError(f"bad multi-index {a}")
            if c != 0:
                self.terms[a] = float(c)
        self.center = np.zeros(self.N) if center is None else np.asarray(center, dtype=float).reshape(self.N)
        if not width > 0:
            raise DomainError("width must be positive")
        self.width = float(width)
        self._tab_cache = {}

    def __repr__(self):
        return f"GaussianPoly(N={self.N}, terms={self.terms}, center={self.center.tolist()}, width={self.width})"

    @property
    def length_scale(self):
        return self.width

    @property
    def degree(self):
        return max((sum(a) for a in self.terms), default=0)

    def support_halfwidth(self):
        return (GAUSS_SUPPORT + 1.5 * math.sqrt(self.degree)) * self.width

    @staticmethod
    @lru_cache(maxsize=None)
    def _q(a, k, w):
        # d^k/dt^k [t^a exp(-t^2/(2w^2))] = Q(t) exp(-t^2/(2w^2))
        q = P1([0.0] * a + [1.0])
        lin = P1([0.0, -1.0 / (w * w)])
        for _ in range(k):
            q = q.deriv() + lin * q
        return q

    def _tables(self, beta):
        tab = self._tab_cache.get(beta)
        if tab is None:
            qs = [[self._q(a[i], beta[i], self.width).coef for i in range(self.N)] for a in self.terms]
            D = max([q.size for row in qs for q in row], default=1)
            qc = np.zeros((len(qs), self.N, D))
            for k, row in enumerate(qs):
                for i, q in enumerate(row):
                    qc[k, i, :q.size] = q
            tab = (qc, np.array(list(self.terms.values()), dtype=float))
            self._tab_cache[beta] = tab
        return tab

    def _derivative(self, beta, X):
        if not self.terms:
            return np.zeros(X.shape[0])
        qc, coef = self._tables(tuple(beta))
        return gauss_poly(X - self.center, qc, coef, 0.5 / self.width**2)

    @staticmethod
    @lru_cache(maxsize=None)
    def _g(a, w):
        # F[t^a exp(-t^2/2w^2)](xi) = G(xi) * w sqrt(2 pi) exp(-w^2 xi^2 / 2), complex coefficients
        g = np.array([1.0 + 0j])
        for _ in range(a):
            dg = np.polynomial.polynomial.polyder(g) if g.size > 1 else np.array([0j])
            shifted = np.concatenate([[0j], g]) * (w * w)
            dg = np.pad(dg, (0, shifted.size - dg.size))
            g = 1j * (dg - shifted)
        return g

    def fourier(self, Xi):
        """Exact ``int phi(x) exp(-i x.xi) dx``."""
        Xi, single = _points(Xi, self.N)
        w = self.width
        env = (w * math.sqrt(2.0 * math.pi)) ** self.N * np.exp(-0.5 * w * w * np.sum(Xi * Xi, axis=1))
        total = np.zeros(Xi.shape[0], dtype=complex)
        for a, c in self.terms.items():
            prod = np.full(Xi.shape[0], c, dtype=complex)
            for i in range(self.N):
                prod *= np.polynomial.polynomial.polyval(Xi[:, i], self._g(a[i], w))
            total += prod
        out = total * env * np.exp(-1j * (Xi @ self.center))
        return _ret(out, single)

    def moment(self, beta):
        """``int (x-center)^beta phi(x) dx`` (exact)."""
        total = 0.0
        for a, c in self.terms.items():
            prod = c
            for i in range(self.N):
                e = a[i] + beta[i]
                if e % 2:
                    prod = 0.0
                    break
                # int t^e exp(-t^2/2w^2) dt = w^{e+1} sqrt(2 pi) (e-1)!!
                prod *= self.width ** (e + 1) * math.sqrt(2.0 * math.pi) * _double_factorial(e - 1)
            total += prod
        return total

    def translated(self, h):
        return GaussianPoly(self.N, self.terms, self.center + np.asarray(h, dtype=float), self.width)


def _double_factorial(n):
    return 1 if n <= 0 else math.prod(range(n, 0, -2))


class Bump(TestFunction):
    """Tensor-product ``C_c^inf`` bump supported in ``center + [-w, w]^N``."""

    family = BUMP
    localized = True
    pointwise_only = False

    def __init__(self, N, center=None, width=1.0, amp=1.0):
        super().__init__(N)
        self.center = np.zeros(self.N) if center is None else np.asarray(center, dtype=float).reshape(self.N)
        if not width > 0:
            raise DomainError("width must be positive")
        self.width = float(width)
        self.amp = float(amp)

    def __repr__(self):
        return f"Bump(N={self.N}, center={self.center.tolist()}, width={self.width}, amp={self.amp})"

    @property
    def length_scale(self):
        return 0.25 * self.width

    def support_halfwidth(self):
        return self.width

    @staticmethod
    @lru_cache(maxsize=None)
    def _num(k):
        # b^{(k)}(t) = N_k(t) (1-t^2)^{-2k} b(t)
        n = P1([1.0])
        one_m = P1([1.0, 0.0, -1.0])
        t = P1([0.0, 1.0])
        for j in range(k):
            n = n.deriv() * one_m**2 + 4.0 * j * t * n * one_m - 2.0 * t * n
        return n

    def _1d(self, k, t):
        out = np.zeros_like(t)
        inside = np.abs(t) < 1.0
        ti = t[inside]
        om = 1.0 - ti * ti
        out[inside] = self._num(k)(ti) * om ** (-2.0 * k) * np.exp(-1.0 / om)
        return out / self.width**k

    def _derivative(self, beta, X):
        T = (X - self.center) / self.width
        v = np.full(X.shape[0], self.amp)
        for i in range(self.N):
            v = v * self._1d(beta[i], T[:, i])
        return v

    def translated(self, h):
        return Bump(self.N, self.center + np.asarray(h, dtype=float), self.width, self.amp)


class Trig(TestFunction):
    """``sum_j A_j cos(k_j . x) + B_j sin(k_j . x)``."""

    family = TRIG

    def __init__(self, N, waves):
        super().__init__(N)
        self.waves = [(np.asarray(k, dtype=float).reshape(self.N), float(A), float(B)) for k, A, B in waves]

    def __repr__(self):
        return f"Trig(N={self.N}, waves={[(k.tolist(), A, B) for k, A, B in self.waves]})"

    @property
    def length_scale(self):
        kmax = max((np.linalg.norm(k) for k, _, _ in self.waves), default=0.0)
        return 1.0 / max(kmax, 1.0)

    def sup_norm_bound(self):
        return sum(math.hypot(A, B) for _, A, B in self.waves)

    def _derivative(self, beta, X):
        out = np.zeros(X.shape[0])
        n = sum(beta)
        for k, A, B in self.waves:
            ph = X @ k + 0.5 * math.pi * n
            out += float(np.prod(k ** np.array(beta))) * (A * np.cos(ph) + B * np.sin(ph))
        return out

    def translated(self, h):
        h = np.asarray(h, dtype=float)
        waves = []
        for k, A, B in self.waves:
            d = float(k @ h)
            # cos(k.(x-h)) = cos(k.x)cos(k.h) + sin(k.x)sin(k.h)
            waves.append((k, A * math.cos(d) - B * math.sin(d), A * math.sin(d) + B * math.cos(d)))
        return Trig(self.N, waves)


class Polynomial(TestFunction):
    """``sum_alpha c_alpha x^alpha`` with real coefficients."""

    family = POLY

    def __init__(self, N, coeffs):
        super().__init__(N)
        self.coeffs = {tuple(int(v) for v in a): float(c) for a, c in coeffs.items() if c != 0}
        for a in self.coeffs:
            if len(a) != self.N or min(a) < 0:
                raise DomainError(f"bad multi-index {a}")

    def __repr__(self):
        return f"Polynomial(N={self.N}, coeffs={self.coeffs})"

    @property
    def degree(self):
        return max((sum(a) for a in self.coeffs), default=0)

    def _derivative(self, beta, X):
        out = np.zeros(X.shape[0])
        for a, c in self.coeffs.items():
            if any(b > ai for b, ai in zip(beta, a)):
                continue
            f = c
            term = np.ones(X.shape[0])
            for i in range(self.N):
                f *= math.perm(a[i], beta[i])
                term = term * X[:, i] ** (a[i] - beta[i])
            out += f * term
        return out

    def homogeneous_parts(self):
        parts = {}
        for a, c in self.coeffs.items():
            parts.setdefault(sum(a), {})[a] = c
        return parts

    def translated(self, h):
        # expand c (x - h)^a by the binomial theorem
        h = np.asarray(h, dtype=float)
        out = {}
        for a, c in self.coeffs.items():
            for b in itertools.product(*[range(ai + 1) for ai in a]):
                f = c
                for i in range(self.N):
                    f *= math.comb(a[i], b[i]) * (-h[i]) ** (a[i] - b[i])
                out[b] = out.get(b, 0.0) + f
        return Polynomial(self.N, out)


class Sum(TestFunction):
    """Weighted sum of test functions (flattened)."""

    family = SUM

    def __init__(self, parts):
        parts = list(parts)
        if not parts:
            raise DomainError("empty sum")
        N = parts[0][1].N
        super().__init__(N)
        flat = []
        for w, f in parts:
            if f.N != N:
                raise DomainError("summands must share N")
            for w2, g in f.components():
                flat.append((float(w) * w2, g))
        self.parts = flat
        self.localized = all(g.localized for _, g in flat)
        self.pointwise_only = any(g.pointwise_only for _, g in flat)

    def __repr__(self):
        return f"Sum({self.parts})"

    def components(self):
        return list(self.parts)

    @property
    def length_scale(self):
        return min(g.length_scale for _, g in self.parts)

    def _derivative(self, beta, X):
        return sum(w * g._derivative(beta, X) for w, g in self.parts)

    def fourier(self, Xi):
        return sum(w * g.fourier(Xi) for w, g in self.parts)

    def translated(self, h):
        return Sum([(w, g.translated(h)) for w, g in self.parts])


class CandidateSolution:
    """A candidate ``u`` of polynomial growth, wrapping a Polynomial or Trig.

    ``degree`` is the growth exponent (``|u(x)| = O(|x|^degree)``).
    """

    def __init__(self, func, degree=None, label=""):
        if func.family not in (POLY, TRIG):
            raise DomainError("candidates are Polynomial or Trig functions")
        self.func = func
        self.N = func.N
        self.degree = (func.degree if func.family == POLY else 0) if degree is None else int(degree)
        self.label = label or repr(func)

    def __repr__(self):
        return f"CandidateSolution({self.label})"

    def __call__(self, X):
        return self.func(X)

    def in_L1s(self, sigma):
        """``int |u| / (1 + |x|^{N+2 sigma}) dx < inf``, i.e. degree < 2 sigma."""
        return self.degree < 2.0 * sigma


def gaussian(N, width=1.0, center=None, amp=1.0):
    return GaussianPoly(N, {(0,) * N: amp}, center=center, width=width)


def sks_norm(phi, k, s, grid=None, n=None, polish=True):
    """``sup_x (1 + |x|^{N+2s}) sum_{|alpha|<=k} |d^alpha phi(x)|``.

    The supremum is taken over ``grid`` (an (M, N) array) or over a default
    uniform grid on ``[-R, R]^N``, then polished by a local search from the
    best grid point.  Raises InsufficientGridError when the weighted summand
    on the outer shell of the grid is not below ``1e-3`` of the maximum.
    """
    N = phi.N
    orders = [a for j in range(k + 1) for a in multi_indices(N, j)]

    def summand(X):
        X = np.atleast_2d(X)
        r = np.linalg.norm(X, axis=1)
        tot = np.zeros(X.shape[0])
        for a in orders:
            tot += np.abs(phi._derivative(a, X))
        return (1.0 + r ** (N + 2.0 * s)) * tot

    if grid is None:
        R = 1.0
        for _, g in phi.components():
            if not g.localized:
                raise DomainError("sks_norm needs a localized function")
            R = max(R, float(np.max(np.abs(g.center))) + g.support_halfwidth() + 2.0)
        n = n or {1: 4001, 2: 241, 3: 61}.get(N, 21)
        ax = np.linspace(-R, R, n)
        grid = np.stack(np.meshgrid(*([ax] * N), indexing="ij"), axis=-1).reshape(-1, N)
    grid = np.asarray(grid, dtype=float)
    vals = summand(grid)
    best = float(vals.max())
    if best == 0.0:
        return 0.0
    lim = np.max(np.abs(grid), axis=0)
    shell = np.any(np.abs(grid) >= lim * (1.0 - 1e-12), axis=1)
    if float(vals[shell].max()) > 1e-3 * best:
        raise InsufficientGridError("weighted summand is not negligible on the grid boundary")
    if polish:
        from scipy.optimize import minimize

        x0 = grid[int(np.argmax(vals))]
        res = minimize(lambda x: -summand(x)[0], x0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 2000})
        best = max(best, float(-res.fun))
    return best


def apply_differential(P, phi, X):
    """``P(-grad) phi`` at ``X`` for a :class:`~levyliouville.symbols.ComplexPolynomial`."""
    Xa, single = _points(X, phi.N)
    out = np.zeros(Xa.shape[0], dtype=complex)
    for a, c in P.coeffs.items():
        out += c * (-1.0) ** sum(a) * phi._derivative(a, Xa)
    return _ret(out, single)
