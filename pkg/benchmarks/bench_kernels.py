"""Time the compiled kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--repeat 5]

The first numba call (compilation or cache load) is excluded.
"""
import argparse
import time

import numpy as np

from ballpoincare.geometry import build_elliptic, build_translation
from ballpoincare.kernels import HAS_NUMBA, IMPLEMENTATIONS
from ballpoincare.quadrature import EDGE_OFFSETS, PEAK_OFFSETS, gauss_legendre


def cases(rng):
    m, p, n = 400, 4000, 2
    outer = 0.3 * (rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))) / np.sqrt(2 * n)
    inner = 0.3 * (rng.normal(size=(m, p, n)) + 1j * rng.normal(size=(m, p, n))) / np.sqrt(2 * n)
    yield "pairing_block", (outer, inner, rng.random((m, p)), 384.0)

    mats = []
    for _ in range(20000):
        g = build_elliptic(0.5 * rng.random() * np.exp(2j * np.pi * rng.random()), 2 * np.pi * rng.random())
        mats.append((g @ build_translation(0.4 * rng.random())).matrix)
    yield "series_terms", (np.array(mats), np.array([0.1 + 0.2j]), np.array([0.3 - 0.1j]), 4.0, -np.log(np.pi))

    gx, gw = (np.ascontiguousarray(a) for a in gauss_legendre(8))
    rho = np.linspace(0.02, 0.48, 24)
    yield "cr_ball_radial", (rho, 384.0, 0.5, gx, gw, PEAK_OFFSETS, np.sort(EDGE_OFFSETS))


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not HAS_NUMBA:
        print("numba is not installed; only the numpy timings are meaningful")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<16}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}{'max rel diff':>15}")
    for name, call_args in cases(rng):
        nb = IMPLEMENTATIONS["numba"][name]
        npf = IMPLEMENTATIONS["numpy"][name]
        ref = npf(*call_args)
        got = nb(*call_args)
        diff = float(np.max(np.abs(got - ref) / np.maximum(np.abs(ref), 1e-300)))
        t_nb = best_of(nb, call_args, args.repeat)
        t_np = best_of(npf, call_args, args.repeat)
        print(f"{name:<16}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>10.1f}{diff:>15.2e}")


if __name__ == "__main__":
    main()
