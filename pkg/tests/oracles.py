"""Independent reference computations used by the tests.

Nothing here goes through the package's quadrature or enumeration code.
"""
import itertools
import math

import numpy as np


def binomial_c(n, k):
    return math.comb((n + 1) * (k - 1) + n, n)


def mc_segment_pairing(alpha, k, samples=10_000_000, seed=12345, chunk=1_000_000):
    """Plain Monte-Carlo for I1 on the segment example in B^1.

    Returns (estimate, standard error).
    """
    rng = np.random.default_rng(seed)
    big_n = 2 * k
    c = binomial_c(1, k)
    vol = (2 * alpha) ** 2
    s1 = s2 = 0.0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        t = rng.uniform(-alpha, alpha, m)
        u = rng.uniform(-alpha, alpha, m)
        f = np.exp(0.5 * big_n * (np.log1p(-t * t) + np.log1p(-u * u)) - big_n * np.log1p(-t * u))
        s1 += f.sum()
        s2 += (f * f).sum()
        done += m
    mean = s1 / samples
    var = s2 / samples - mean * mean
    return c * vol * mean, c * vol * math.sqrt(var / samples)


def mc_cr_ball_pairing(alpha, k, samples=10_000_000, seed=2024, chunk=1_000_000):
    """Six-dimensional Monte-Carlo for I1 on the CR half-ball in B^2.

    Both points are drawn uniformly in the box [-a,a]^2 x [0,a] of
    (x1, y1, x2) and the indicator of the half-ball is applied.  The real
    part of the integrand is averaged.  Returns (estimate, standard error).
    """
    rng = np.random.default_rng(seed)
    big_n = 3 * k
    c = binomial_c(2, k)
    vol = ((2 * alpha) ** 2 * alpha) ** 2
    s1 = s2 = 0.0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        p = rng.uniform(0.0, 1.0, (m, 6)) * np.array([2, 2, 1, 2, 2, 1]) * alpha
        p -= np.array([alpha, alpha, 0.0, alpha, alpha, 0.0])
        rz = np.sum(p[:, :3] ** 2, axis=1)
        rw = np.sum(p[:, 3:] ** 2, axis=1)
        inside = (rz < alpha * alpha) & (rw < alpha * alpha)
        z1 = p[:, 0] + 1j * p[:, 1]
        w1 = p[:, 3] + 1j * p[:, 4]
        log_f = 0.5 * big_n * (np.log1p(-rz) + np.log1p(-rw)) - big_n * np.log(1.0 - z1 * np.conj(w1) - p[:, 2] * p[:, 5])
        f = np.where(inside, np.exp(log_f).real, 0.0)
        s1 += f.sum()
        s2 += (f * f).sum()
        done += m
    mean = s1 / samples
    var = s2 / samples - mean * mean
    return c * vol * mean, c * vol * math.sqrt(var / samples)


def brute_force_count(generators, radius, tol=1e-9):
    """Distinct elements (mod +-I) among all words of length <= radius in SU(1,1).

    Every word is multiplied out from scratch and compared against every
    stored matrix, so this is quadratic and only meant for small radii.
    """
    letters = [np.asarray(g, dtype=complex) for g in generators]
    letters += [np.linalg.inv(g) for g in letters]
    found = [np.eye(2, dtype=complex)]
    for length in range(1, radius + 1):
        for word in itertools.product(range(len(letters)), repeat=length):
            m = np.eye(2, dtype=complex)
            for i in word:
                m = m @ letters[i]
            scale = max(1.0, np.abs(m).max())
            if not any(min(np.abs(m - f).max(), np.abs(m + f).max()) <= tol * scale for f in found):
                found.append(m)
    return len(found)


def polar_disc_integral(f, radial_nodes=200, angular_nodes=256):
    """int_D f(w) dV_e(w) with GL in the radius and the trapezoid rule in the angle."""
    x, wx = np.polynomial.legendre.leggauss(radial_nodes)
    r = 0.5 * (x + 1.0)
    wr = 0.5 * wx
    th = 2 * math.pi * np.arange(angular_nodes) / angular_nodes
    w = r[:, None] * np.exp(1j * th[None, :])
    weights = (wr * r)[:, None] * (2 * math.pi / angular_nodes)
    return np.sum(weights * f(w))
