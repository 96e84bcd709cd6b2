"""Complex polynomials ``P(z) = sum_alpha c_alpha z^alpha`` of degree <= 4."""
import numpy as np

from .errors import DomainError

MAX_DEGREE = 4


class ComplexPolynomial:
    """Coefficients indexed by multi-index.

    ``P(-i xi)`` is the multiplier of the differential operator ``P(-grad)``:
    ``P(-grad) exp(i xi.x) = P(-i xi) exp(i xi.x)``.
    """

    def __init__(self, N, coeffs=None):
        if int(N) != N or N < 1:
            raise DomainError("N must be a positive integer")
        self.N = int(N)
        self.coeffs = {}
        for a, c in (coeffs or {}).items():
            a = tuple(int(v) for v in a)
            if len(a) != self.N or min(a) < 0:
                raise DomainError(f"bad multi-index {a}")
            if sum(a) > MAX_DEGREE:
                raise DomainError(f"degree {sum(a)} exceeds the supported maximum {MAX_DEGREE}")
            c = complex(c)
            if c != 0:
                self.coeffs[a] = self.coeffs.get(a, 0j) + c

    def __repr__(self):
        return f"ComplexPolynomial(N={self.N}, coeffs={self.coeffs})"

    def __eq__(self, other):
        return isinstance(other, ComplexPolynomial) and self.N == other.N and self.coeffs == other.coeffs

    @classmethod
    def constant(cls, N, c):
        return cls(N, {(0,) * N: c})

    @classmethod
    def zero(cls, N):
        return cls(N)

    @classmethod
    def levy(cls, A, b):
        """``P(z) = -z.Az + b.z``."""
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        N = b.size
        co = {}
        for i in range(N):
            e = [0] * N
            e[i] = 1
            co[tuple(e)] = co.get(tuple(e), 0) + b[i]
            for j in range(N):
                e2 = [0] * N
                e2[i] += 1
                e2[j] += 1
                co[tuple(e2)] = co.get(tuple(e2), 0) - A[i, j]
        return cls(N, co)

    @property
    def degree(self):
        return max((sum(a) for a in self.coeffs), default=0)

    def is_zero(self):
        return not self.coeffs

    def __call__(self, Z):
        Z = np.asarray(Z, dtype=complex)
        single = Z.ndim <= 1
        Z = Z.reshape(-1, self.N)
        out = np.zeros(Z.shape[0], dtype=complex)
        for a, c in self.coeffs.items():
            out += c * np.prod(Z ** np.array(a), axis=1)
        return out[0] if single else out

    def at_minus_i_xi(self, Xi):
        """``P(-i xi)`` for real frequencies."""
        return self(-1j * np.asarray(Xi, dtype=float))

    def constant_term(self):
        return self.coeffs.get((0,) * self.N, 0j)

    def homogeneous_degrees(self):
        return sorted({sum(a) for a in self.coeffs})

