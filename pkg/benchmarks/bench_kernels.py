"""Compare the numba and pure-numpy backends of the hot kernels.

Run ``python benchmarks/bench_kernels.py [--repeat R]``.  Each row reports
the best wall time of ``R`` runs per backend, the speed-up and the largest
absolute difference between the two results.  The first numba call is
excluded (compilation is cached on disk after the first run anyway).
"""
import argparse
import time

import numpy as np

from levyliouville import _kernels
from levyliouville._accel import HAVE_NUMBA
from levyliouville.measures import anisotropic, fractional_laplacian, relativistic
from levyliouville.operator_apply import ApplyConfig, apply, box_rule, kernel_spec
from levyliouville.sphere import catalogue
from levyliouville.testfunctions import GaussianPoly, gaussian


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def far_sum_case(m, n_x, rng):
    phi = gaussian(m.N)
    z, wz = box_rule(phi)
    X = rng.uniform(-8.0, 8.0, size=(n_x, m.N))
    kern = kernel_spec(m)
    wphi = wz * phi(z)
    return lambda backend: _kernels.far_sum(X, z, wphi, kern, backend)


def gauss_poly_case(n_x, rng):
    g = GaussianPoly(2, {(0, 0): 1.0, (2, 1): 0.5, (1, 3): -0.25}, width=1.3)
    qc, coef = g._tables((1, 1))
    T = rng.normal(size=(n_x, 2))
    return lambda backend: _kernels.gauss_poly(T, qc, coef, 0.5 / g.width**2, backend)


def apply_case(m, n_x, rng):
    X = rng.uniform(-6.0, 6.0, size=(n_x, m.N))
    phi = gaussian(m.N)
    return lambda backend: apply(m, phi, X, ApplyConfig(backend=backend))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba is not available; nothing to compare")
        return 0
    rng = np.random.default_rng(7)
    cases = [
        ("far_sum power N=1", far_sum_case(fractional_laplacian(1, 0.5), 4000, rng)),
        ("far_sum power N=2", far_sum_case(fractional_laplacian(2, 0.5), 400, rng)),
        ("far_sum Bessel N=2", far_sum_case(relativistic(2, 0.5), 400, rng)),
        ("far_sum anisotropic N=2", far_sum_case(anisotropic(catalogue("cos2", 2, eps=0.5), 0.5), 400, rng)),
        ("gauss_poly 2-D", gauss_poly_case(200000, rng)),
        ("apply power N=2", apply_case(fractional_laplacian(2, 0.5), 60, rng)),
    ]
    print(f"{'case':28s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speed-up':>9s} {'max |diff|':>11s}")
    for name, fn in cases:
        fn("numba")  # compile
        t_nb, v_nb = best_of(lambda: fn("numba"), args.repeat)
        t_np, v_np = best_of(lambda: fn("numpy"), args.repeat)
        diff = float(np.max(np.abs(np.asarray(v_nb) - np.asarray(v_np))))
        print(f"{name:28s} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:9.1f} {diff:11.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
