"""Liouville-type classification of ``L_nu u + P(grad) u = 0`` in ``L^1_sigma``.

The engine combines three pieces of evidence:

1. hypothesis checks on the measure (integrability, decay, and for
   anisotropic densities the positivity and regularity proxies);
2. a zero-set scan of ``eta(xi) + P(-i xi)``, which locates the set ``G``
   that can carry the Fourier transform of a solution;
3. an exact finite-dimensional computation once ``G`` is known: when
   ``G`` lies in ``{0}`` the solutions are polynomials of degree below
   ``2 sigma``, and the operator is applied to every such monomial to find
   the null space.

Conclusions are optionally backed by residuals of the distributional
pairing on witnesses from the null space and on one negative control.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import DivergenceError, DomainError, HypothesisError, ToleranceNotMetError
from .measures import (
    ANISOTROPIC, FRACTIONAL_LAPLACIAN, RELATIVISTIC, decay_check, fractional_laplacian, total_mass,
)
from .operator_apply import DEFAULT_PAIRING, apply, normalized_residual
from .polynomial import ComplexPolynomial
from .sphere import MIN_STORED_DEGREE, positivity_check, sobolev_check
from .symbols import symbol, zero_set_scan
from .testfunctions import CandidateSolution, GaussianPoly, Polynomial, Trig, gaussian, multi_indices

__all__ = [
    "ZERO", "CONSTANTS", "AFFINE", "POLYNOMIAL", "HARMONIC", "TRIG_SPAN", "INCONCLUSIVE", "CAVEAT",
    "ClassifyOptions", "ClassificationReport", "classify", "VerificationReport", "verify_solution",
    "default_suite", "check_hypotheses", "polynomial_null_space", "LevyDriftReport", "levy_drift_orthogonality", "operator_id", "polynomial_label",
]

ZERO = "u = 0"
CONSTANTS = "constants only"
AFFINE = "affine"
POLYNOMIAL = "polynomial degree < 2sigma"
HARMONIC = "harmonic polynomial degree < 2sigma"
TRIG_SPAN = "span{cos, sin}"
INCONCLUSIVE = "inconclusive"

CAVEAT = ("zero sets are located by sampling and solutions are checked by quadrature; "
          "numerical scanning is evidence, not proof")

RESIDUAL_TOL = 1e-4
NEGATIVE_TOL = 1e-2


@dataclass(frozen=True)
class ClassifyOptions:
    """Numerical knobs of :func:`classify`.

    Attributes
    ----------
    scan_L, scan_resolution, scan_tol : float, int, float
        Box half-width, points per axis and relative tolerance of the zero-set scan.
    null_tol : float
        Relative singular-value cutoff for the polynomial null space.
    verify : bool
        Compute pairing residuals for witnesses and a negative control.
    residual_tol : float
        A witness verifies when its normalized residual is below this.
    max_witnesses : int
        Cap on the number of null-space witnesses that are paired.
    """

    scan_L: float = 4.0
    scan_resolution: int = 64
    scan_tol: float = 1e-2
    null_tol: float = 1e-8
    verify: bool = True
    residual_tol: float = RESIDUAL_TOL
    max_witnesses: int = 3

    def __post_init__(self):
        for name in ("scan_L", "scan_tol", "null_tol", "residual_tol"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.scan_resolution < 64:
            raise DomainError("scan_resolution must be at least 64")
        if self.max_witnesses < 1:
            raise DomainError("max_witnesses must be at least 1")


DEFAULT_CLASSIFY = ClassifyOptions()


@dataclass(frozen=True)
class ClassificationReport:
    operator_id: str
    hypotheses: dict
    zero_set: object
    conclusion: str
    degree_bound: float
    null_space: tuple
    residuals: tuple  # (candidate label, normalized residual, role)
    notes: tuple = ()
    caveat: str = CAVEAT

    @property
    def verified(self):
        """Witnesses below tolerance and negative controls above ``1e-2``."""
        ok = True
        for _, r, role in self.residuals:
            ok &= (r <= RESIDUAL_TOL) if role == "witness" else (r > NEGATIVE_TOL)
        return bool(ok)


def operator_id(m):
    """Short stable identifier of a measure, e.g. ``FractionalLaplacian(N=1,s=0.75)``."""
    parts = [f"N={m.N}"]
    if m.s is not None:
        parts.append(f"s={m.s:g}")
    if m.sigma is not None and m.sigma != m.s:
        parts.append(f"sigma={m.sigma:g}")
    if m.reflected:
        parts.append("reflected")
    name = m.label or m.kind
    return f"{name}({','.join(parts)})"


def polynomial_label(coeffs, N, digits=6):
    """Readable form of a real polynomial ``{multi-index: coefficient}``."""
    names = ["x"] if N == 1 else [f"x{i + 1}" for i in range(N)]
    terms = []
    for a in sorted(coeffs, key=lambda a: (-sum(a), [-v for v in a])):
        c = round(float(coeffs[a]), digits)
        if c == 0:
            continue
        mono = "*".join(f"{names[i]}^{k}" if k > 1 else names[i] for i, k in enumerate(a) if k)
        mag = abs(c)
        body = mono if (mono and mag == 1) else (f"{mag:g}*{mono}" if mono else f"{mag:g}")
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sg, body in terms[1:]:
        out += f" {sg} {body}"
    return out


# -- hypotheses -----------------------------------------------------------------

def check_hypotheses(m):
    """Run the measure checks; returns ``{name: bool}`` (positivity only if anisotropic)."""
    hyp = {}
    try:
        total_mass(m)
        hyp["mass_ok"] = True
    except (DivergenceError, ToleranceNotMetError):
        hyp["mass_ok"] = False
    try:
        hyp["decay_ok"] = decay_check(m).passed
    except (DivergenceError, ToleranceNotMetError):
        hyp["decay_ok"] = False
    if m.kind == ANISOTROPIC:
        a = m.angular.padded(MIN_STORED_DEGREE)
        hyp["regularity_proxy_ok"] = sobolev_check(a, m.s).passed
        hyp["positivity_ok"] = positivity_check(a, m.s).passed
    else:
        # radial kernels: the symbol is smooth away from the origin
        hyp["regularity_proxy_ok"] = True
    return hyp


# -- polynomial null space ---------------------------------------------------------

def _monomials(N, bound):
    """Multi-indices of degree ``< bound``, highest degree first."""
    dmax = math.ceil(bound) - 1
    out = []
    for d in range(dmax, -1, -1):
        out.extend(multi_indices(N, d) if d else [(0,) * N])
    return out


def _sample_points(N, k):
    rng = np.random.default_rng(20240601)
    return rng.uniform(-2.0, 2.0, size=(max(3 * k, 8), N))


def _operator_on_monomials(m, P, monos):
    """Columns ``(L_m + P(grad)) x^alpha`` at fixed sample points."""
    X = _sample_points(m.N, len(monos))
    A = np.zeros((X.shape[0], len(monos)), dtype=complex)
    for j, a in enumerate(monos):
        u = Polynomial(m.N, {a: 1.0})
        col = apply(m, u, X).astype(complex) if sum(a) else np.zeros(X.shape[0], dtype=complex)
        for b, c in P.coeffs.items():
            col += c * u._derivative(b, X)
        A[:, j] = col
    return A


def _rref(B, tol):
    B = B.copy()
    rows, cols = B.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = r + int(np.argmax(np.abs(B[r:, c])))
        if abs(B[p, c]) <= tol:
            continue
        B[[r, p]] = B[[p, r]]
        B[r] /= B[r, c]
        for i in range(rows):
            if i != r:
                B[i] -= B[i, c] * B[r]
        r += 1
    return B[:r]


def polynomial_null_space(m, P, bound, tol=1e-8):
    """Real basis of ``{u polynomial, deg u < bound : L_m u + P(grad) u = 0}``.

    Returns ``(basis, worst)``: ``basis`` is a list of coefficient dicts in
    reduced echelon form (leading monomials of highest degree), ``worst`` the
    coefficient dict of the right singular vector with the largest singular
    value, a natural non-solution (None when every monomial solves).
    """
    monos = _monomials(m.N, bound)
    A = _operator_on_monomials(m, P, monos)
    # real unknowns: stack real and imaginary parts of the equations
    Ar = np.vstack([A.real, A.imag])
    scale = max(1.0, float(np.max(np.abs(Ar))))
    _, sv, Vt = np.linalg.svd(Ar)
    rank = int(np.sum(sv > tol * scale))
    V = Vt[rank:]
    basis = []
    if V.shape[0]:
        R = _rref(V, 1e-6)
        for row in R:
            row = np.where(np.abs(row) < 1e-9, 0.0, row)
            basis.append({a: float(c) for a, c in zip(monos, row) if c != 0})
    worst = None
    if rank:
        v = Vt[0] / Vt[0][int(np.argmax(np.abs(Vt[0])))]
        worst = {a: float(c) for a, c in zip(monos, v) if abs(c) > 1e-12}
    return basis, worst


# -- verification -------------------------------------------------------------------

def default_suite(N):
    """Two Gaussian-type test functions: a unit-mass Gaussian and an off-centre odd one."""
    g = gaussian(N, amp=(2.0 * math.pi) ** (-N / 2.0))
    e1 = (1,) + (0,) * (N - 1)
    odd = GaussianPoly(N, {e1: 1.0, (0,) * N: 0.5}, center=np.full(N, 0.3), width=0.8)
    return [g, odd]


@dataclass(frozen=True)
class VerificationReport:
    residual: float
    per_phi: tuple
    tol: float
    verified: bool


def verify_solution(u, m, P=None, phis=None, tol=RESIDUAL_TOL, cfg=DEFAULT_PAIRING):
    """Largest normalized pairing residual of ``u`` over a test-function suite.

    The residual for one ``phi`` is ``|<u, L_{nu~} phi + P(-grad) phi>|``
    divided by ``||phi||_{k,sigma}`` with ``k = max(2, deg P)``; ``u``
    outside ``L^1_sigma`` gives ``inf``.
    """
    P = ComplexPolynomial.zero(m.N) if P is None else P
    phis = default_suite(m.N) if phis is None else list(phis)
    if not phis:
        raise DomainError("empty test-function suite")
    res = tuple(float(normalized_residual(u, m, P, phi, cfg)) for phi in phis)
    worst = max(res)
    return VerificationReport(worst, res, float(tol), bool(worst <= tol))


def _candidate(coeffs, N):
    return CandidateSolution(Polynomial(N, coeffs), label=polynomial_label(coeffs, N))


def _trig_candidate(k, A, B, label):
    return CandidateSolution(Trig(1, [([k], A, B)]), label=label)


# -- classification -------------------------------------------------------------------

def _real_constant(P, tol=1e-12):
    """``c`` if ``P`` is the real constant ``c`` (possibly 0), else None."""
    if any(sum(a) for a in P.coeffs):
        return None
    c = P.constant_term()
    return float(c.real) if abs(c.imag) <= tol else None


def _trig_frequency(m, P, scan):
    # 1-D (-Delta)^s - lam with lam > 0: zeros at +-lam^(1/(2s)), origin singular
    if m.N != 1 or m.kind != FRACTIONAL_LAPLACIAN:
        return None
    c = _real_constant(P)
    if c is None or not c < 0:
        return None
    k = (-c) ** (1.0 / (2.0 * m.s))
    zeros = [cl for cl in scan.clusters if cl.kind == "zero"]
    others = [cl for cl in scan.clusters if cl.kind != "zero"]
    if len(zeros) != 2 or any(abs(cl.center[0]) > 2.0 * scan.spacing for cl in others):
        return None
    centres = sorted(cl.center[0] for cl in zeros)
    if abs(centres[0] + k) > 2.0 * scan.spacing or abs(centres[1] - k) > 2.0 * scan.spacing:
        return None
    return k


def _polynomial_label(m, P, basis):
    if not basis:
        return ZERO
    dmax = max(sum(a) for b in basis for a in b)
    if m.kind in (FRACTIONAL_LAPLACIAN, ANISOTROPIC):
        return CONSTANTS if dmax == 0 else AFFINE
    if m.kind == RELATIVISTIC and P.is_zero():
        return HARMONIC
    return POLYNOMIAL


def classify(m, P=None, opts=DEFAULT_CLASSIFY):
    """Classify the solutions ``u in L^1_sigma`` of ``L_m u + P(grad) u = 0``.

    Parameters
    ----------
    m : LevyMeasure
    P : ComplexPolynomial, optional
        Defaults to zero.
    opts : ClassifyOptions

    Returns
    -------
    ClassificationReport

    Raises
    ------
    HypothesisError
        If a hypothesis on ``m`` fails; ``failed`` lists the checks.
    """
    P = ComplexPolynomial.zero(m.N) if P is None else P
    if P.N != m.N:
        raise DomainError("dimension mismatch between measure and polynomial")
    hyp = check_hypotheses(m)
    failed = [k for k, v in hyp.items() if not v]
    if failed:
        raise HypothesisError(failed, f"{operator_id(m)}: failed {', '.join(failed)}")

    eta = symbol(m)
    scan = zero_set_scan(eta, P, L=opts.scan_L, resolution=opts.scan_resolution, tol=opts.scan_tol)
    bound = 2.0 * m.sigma
    notes = []
    witnesses, negatives = [], []
    basis = ()
    k = None if scan.G_subset_origin else _trig_frequency(m, P, scan)

    if scan.G_subset_origin:
        basis, worst = polynomial_null_space(m, P, bound, opts.null_tol)
        conclusion = _polynomial_label(m, P, basis)
        if conclusion == HARMONIC:
            notes.append("harmonicity from the factorisation |xi|^2 = h(xi) eta(xi) with h smooth")
        witnesses = [_candidate(b, m.N) for b in basis[: opts.max_witnesses]]
        if not basis:
            negatives = [_candidate({(0,) * m.N: 1.0}, m.N)]
        elif worst is not None:
            negatives = [_candidate(worst, m.N)]
        else:
            d = math.ceil(bound) if math.ceil(bound) > bound else int(bound) + 1
            negatives = [_candidate({(d,) + (0,) * (m.N - 1): 1.0}, m.N)]
    elif k is not None:
        conclusion = TRIG_SPAN
        basis0, _ = polynomial_null_space(m, P, bound, opts.null_tol)
        if basis0:
            notes.append("a polynomial part at the origin also solves")
        else:
            notes.append("no constant or polynomial part: the origin carries no solution")
        notes.append(f"frequency {k:.12g}")
        arg = "x" if k == 1.0 else f"{k:.12g}*x"
        witnesses = [_trig_candidate(k, 1.0, 0.0, f"cos({arg})"), _trig_candidate(k, 0.0, 1.0, f"sin({arg})")]
        negatives = [_candidate({(0,): 1.0}, 1)]
    else:
        conclusion = INCONCLUSIVE
        notes.append(f"{len(scan.clusters)} cluster(s) away from the recognised patterns")

    residuals = []
    if opts.verify:
        suite = default_suite(m.N)
        for role, group in (("witness", witnesses), ("negative", negatives)):
            for u in group:
                r = verify_solution(u, m, P, suite, opts.residual_tol).residual
                residuals.append((u.label, r, role))
    null_labels = tuple(polynomial_label(b, m.N) for b in basis)
    return ClassificationReport(operator_id(m), hyp, scan, conclusion, bound, null_labels,
                                tuple(residuals), tuple(notes))


# -- Levy-type drift --------------------------------------------------------------------

@dataclass(frozen=True)
class LevyDriftReport:
    residual: float
    orthogonal: bool
    consistent: bool
    b_dot_bstar: float


def levy_drift_orthogonality(A, b, s, b_star, tol=RESIDUAL_TOL, phis=None):
    """Test ``u(x) = b_* . x`` against ``(-Delta)^s u - div(A grad u) + b . grad u = 0``.

    ``P(z) = -z.Az + b.z``.  ``consistent`` records whether a small residual
    coincides with the predicted solution set: ``b . b_* = 0`` and
    ``s > 1/2``, or ``b_* = 0``.

    Raises
    ------
    DomainError
        If ``A`` is not symmetric positive semidefinite or ``s`` is outside (0, 1).
    """
    b = np.atleast_1d(np.asarray(b, dtype=float))
    b_star = np.atleast_1d(np.asarray(b_star, dtype=float))
    N = b.size
    A = np.asarray(A, dtype=float).reshape(N, N) if np.ndim(A) else np.full((N, N), float(A))
    if b_star.size != N:
        raise DomainError("b and b_star must have the same length")
    if not np.allclose(A, A.T, atol=1e-12):
        raise DomainError("A must be symmetric")
    if np.linalg.eigvalsh(A).min() < -1e-12 * max(1.0, float(np.abs(A).max())):
        raise DomainError("A must be positive semidefinite")
    m = fractional_laplacian(N, s)
    P = ComplexPolynomial.levy(A, b)
    coeffs = {tuple(int(i == j) for j in range(N)): float(v) for i, v in enumerate(b_star) if v != 0}
    if coeffs:
        res = verify_solution(_candidate(coeffs, N), m, P, phis, tol).residual
    else:
        res = 0.0
    dot = float(b @ b_star)
    orth = abs(dot) <= tol
    predicted = (orth and s > 0.5) or not coeffs
    return LevyDriftReport(float(res), bool(orth), bool((res <= tol) == predicted), dot)
