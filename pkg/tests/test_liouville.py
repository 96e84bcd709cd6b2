"""Classification engine, solution verification and the drift orthogonality test."""
import math

import numpy as np
import pytest

from levyliouville.errors import DomainError, HypothesisError
from levyliouville.liouville import (
    AFFINE, CONSTANTS, HARMONIC, POLYNOMIAL, TRIG_SPAN, ZERO, ClassifyOptions, check_hypotheses,
    classify, default_suite, levy_drift_orthogonality, operator_id, polynomial_label,
    polynomial_null_space, verify_solution,
)
from levyliouville.measures import (
    anisotropic, fractional_laplacian, intermediate_long_wave, relativistic,
)
from levyliouville.polynomial import ComplexPolynomial
from levyliouville.sphere import catalogue
from levyliouville.testfunctions import CandidateSolution, Polynomial, Trig


def _poly(coeffs, N=1):
    return CandidateSolution(Polynomial(N, coeffs))


def test_labels():
    assert operator_id(fractional_laplacian(1, 0.75)) == "FractionalLaplacian(N=1,s=0.75)"
    assert polynomial_label({(1,): 3.0, (0,): -2.0}, 1) == "3*x - 2"
    assert polynomial_label({(1, 0): 1.0, (0, 2): -1.0}, 2) == "-x2^2 + x1"


def test_options_validation():
    with pytest.raises(DomainError):
        ClassifyOptions(scan_resolution=10)
    with pytest.raises(DomainError):
        ClassifyOptions(residual_tol=0.0)


def test_hypotheses():
    assert all(check_hypotheses(fractional_laplacian(2, 0.5)).values())
    hyp = check_hypotheses(anisotropic(catalogue("cos2", 2, eps=0.3), 0.5))
    assert hyp["positivity_ok"] and hyp["regularity_proxy_ok"]
    with pytest.raises(HypothesisError) as exc:
        classify(anisotropic(catalogue("cos2_pure", 2), 0.5))
    assert exc.value.failed == ["positivity_ok"]


def test_null_space_fractional():
    basis, worst = polynomial_null_space(fractional_laplacian(1, 0.75), ComplexPolynomial.zero(1), 1.5)
    labels = sorted(polynomial_label(b, 1) for b in basis)
    assert labels == ["1", "x"]


def test_null_space_relativistic_harmonic():
    basis, _ = polynomial_null_space(relativistic(2, 0.5, sigma=1.2), ComplexPolynomial.zero(2), 2.4)
    assert len(basis) == 5  # 1, x1, x2, x1 x2, x1^2 - x2^2


@pytest.mark.parametrize("s,expected", [(0.75, AFFINE), (0.5, CONSTANTS), (0.3, CONSTANTS)])
def test_classify_fractional_1d(s, expected):
    rep = classify(fractional_laplacian(1, s))
    assert rep.conclusion == expected
    assert rep.verified


def test_classify_massive_is_zero():
    rep = classify(fractional_laplacian(1, 0.3), ComplexPolynomial.constant(1, 1.0))
    assert rep.conclusion == ZERO and rep.null_space == ()
    assert rep.verified


@pytest.mark.parametrize("s", [0.4, 0.6])
def test_classify_helmholtz(s):
    rep = classify(fractional_laplacian(1, s), ComplexPolynomial.constant(1, -1.0))
    assert rep.conclusion == TRIG_SPAN
    assert sorted(round(c.center[0], 1) for c in rep.zero_set.clusters) == [-1.0, 0.0, 1.0]
    wit = {lab: r for lab, r, role in rep.residuals if role == "witness"}
    assert set(wit) == {"cos(x)", "sin(x)"} and max(wit.values()) <= 1e-4
    assert rep.verified


def test_classify_helmholtz_other_frequency():
    # (-Delta)^{1/2} - 4: zeros at |xi| = 4
    rep = classify(fractional_laplacian(1, 0.5), ComplexPolynomial.constant(1, -4.0))
    assert rep.conclusion == TRIG_SPAN and "cos(4*x)" in [r[0] for r in rep.residuals]


def test_classify_ilw_polynomial():
    rep = classify(intermediate_long_wave(0.6))
    assert rep.conclusion == POLYNOMIAL
    assert sorted(rep.null_space) == ["1", "x"]


def test_classify_relativistic_1d_harmonic():
    rep = classify(relativistic(1, 0.5, sigma=1.2))
    assert rep.conclusion == HARMONIC
    assert rep.verified


def test_verify_solution_positive_and_negative():
    m = fractional_laplacian(1, 0.75)
    assert verify_solution(_poly({(1,): 3.0, (0,): -2.0}), m).verified
    cos = CandidateSolution(Trig(1, [([1.0], 1.0, 0.0)]))
    assert verify_solution(cos, m).residual > 1e-2
    assert math.isinf(verify_solution(_poly({(2,): 1.0}), m).residual)


def test_default_suite_mass():
    g, odd = default_suite(2)
    assert g.moment((0, 0)) == pytest.approx(1.0, rel=1e-14)
    assert odd.terms[(1, 0)] == 1.0


def test_levy_drift():
    A = np.eye(2)
    orth = levy_drift_orthogonality(A, [1.0, 0.0], 0.75, [0.0, 1.0])
    assert orth.orthogonal and orth.residual <= 1e-4 and orth.consistent
    par = levy_drift_orthogonality(A, [1.0, 0.0], 0.75, [1.0, 0.0])
    assert not par.orthogonal and par.residual > 1e-2 and par.consistent
    assert levy_drift_orthogonality(0.0, [1.0, 0.0], 0.75, [0.0, 0.0]).residual == 0.0


def test_levy_drift_rejects_bad_matrix():
    with pytest.raises(DomainError):
        levy_drift_orthogonality([[1.0, 1.0], [0.0, 1.0]], [1.0, 0.0], 0.75, [0.0, 1.0])
    with pytest.raises(DomainError):
        levy_drift_orthogonality(-np.eye(2), [1.0, 0.0], 0.75, [0.0, 1.0])
