"""Normalisation of the weighted Bergman kernel on the ball.

c(B^n, k) = binom((n+1)(k-1) + n, n) makes c K(z,w)^k the reproducing
kernel for the weight K(z,z)^{-k} dV.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import ConvergenceError, DomainError
from .quadrature import gl_rule


@dataclass(frozen=True)
class WeightConstant:
    n: int
    k: int
    value_log: float

    @property
    def value(self):
        return math.exp(self.value_log)

    def exact(self):
        """The integer binomial itself (arbitrary precision)."""
        return math.comb((self.n + 1) * (self.k - 1) + self.n, self.n)


def log_binomial(top, bottom):
    return math.lgamma(top + 1) - math.lgamma(bottom + 1) - math.lgamma(top - bottom + 1)


def c_ball(n, k):
    if n < 1 or k < 1:
        raise ValueError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    return WeightConstant(n, k, log_binomial((n + 1) * (k - 1) + n, n))


def c_ball_stirling(n, k):
    """Leading large-k behaviour (n+1)^n / n! * k^n."""
    if k < 2:
        raise ValueError("the Stirling form is meant for k >= 2")
    return (n + 1) ** n / math.factorial(n) * float(k) ** n


def radial_moment(m, nodes=64):
    """int_0^1 (1 - R^2)^m R dR by Gauss-Legendre (exact for small m)."""
    r, w = gl_rule(0.0, 1.0, nodes)
    return float(np.sum(w * (1.0 - r * r) ** m * r))


def c_ball_integral_check(n, k, nodes=64, rel_tol=1e-12):
    """c(B^n, k) n!/pi^n times the iterated radial integral of (1-|w|^2)^{(n+1)(k-1)}.

    Each radial factor is computed with ``nodes`` and ``2 * nodes`` points;
    a disagreement above ``rel_tol`` raises ConvergenceError.  Equals 1 when
    the normalisation identity holds at z = 0.
    """
    if n < 1 or k < 1:
        raise ValueError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    base = (n + 1) * (k - 1)
    log_integral = n * math.log(2.0 * math.pi)
    for j in range(n):
        coarse = radial_moment(base + j, nodes)
        fine = radial_moment(base + j, 2 * nodes)
        if abs(fine - coarse) > rel_tol * abs(fine):
            raise ConvergenceError(
                f"radial factor {j} not converged ({coarse!r} vs {fine!r})",
                value=fine, est_rel_err=abs(fine - coarse) / abs(fine), nodes=2 * nodes)
        log_integral += math.log(fine)
    c = c_ball(n, k)
    return math.exp(c.value_log + math.lgamma(n + 1) - n * math.log(math.pi) + log_integral)


def weighted_reproduction(f, z, k=1, radial_nodes=64, angular_nodes=64):
    """c(B^1, k) int_D f(w) K(z,w)^k K(w,w)^{-k} dV(w) on the unit disc.

    ``f`` is a vectorised holomorphic function; the integral is done in polar
    coordinates (GL in the radius, trapezoid in the angle, which is
    spectrally accurate for periodic integrands).
    """
    z = complex(np.asarray(z).ravel()[0])
    if not abs(z) < 1.0:
        raise DomainError(f"{z} is not in the unit disc")
    r, wr = gl_rule(0.0, 1.0, radial_nodes)
    th = 2.0 * math.pi * np.arange(angular_nodes) / angular_nodes
    wth = np.full(angular_nodes, 2.0 * math.pi / angular_nodes)
    w = (r[:, None] * np.exp(1j * th[None, :])).ravel()
    weights = (wr[:, None] * r[:, None] * wth[None, :]).ravel()
    # K(z,w)^k K(w,w)^{-k} K(w,w) dV_e with K(z,w) = 1/(pi (1 - z conj(w))^2)
    log_k_zw = -math.log(math.pi) - 2.0 * np.log(1.0 - z * np.conj(w))
    log_k_ww = -math.log(math.pi) - 2.0 * np.log1p(-np.abs(w) ** 2)
    integrand = f(w) * np.exp(k * log_k_zw + (1 - k) * log_k_ww)
    return c_ball(1, k).value * np.sum(weights * integrand)
