"""Leading-order Laplace asymptotics for int e^{-lam f(t)} g(t) dt and
numerical checks of its error order.

The phases shipped here are the ones behind the submanifold examples.  They
all follow one convention: the phase is ln cosh(tau/2) between the two
points (or the one-sided variant of the radial example), and ``lam`` is
(n + 1) k.  Callers pass ``lam`` explicitly.
"""
from dataclasses import dataclass, field
import math
from typing import Callable, Optional

import numpy as np

from .errors import ConvergenceError, DegeneratePhaseError
from .quadrature import QuadratureConfig, composite_rule, graded_breaks

EIG_FLOOR = 1e-10


@dataclass(frozen=True)
class LaplaceProblem:
    """``phase`` and ``amplitude`` take arrays of shape (..., q)."""

    dim: int
    phase: Callable
    amplitude: Callable
    minimum: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    hessian: Optional[Callable] = None
    name: str = ""

    def __post_init__(self):
        for attr in ("minimum", "lo", "hi"):
            v = np.atleast_1d(np.asarray(getattr(self, attr), dtype=float))
            if v.size != self.dim:
                raise ValueError(f"{attr} must have {self.dim} entries")
            object.__setattr__(self, attr, v)

    def hessian_at_minimum(self):
        if self.hessian is not None:
            return np.atleast_2d(np.asarray(self.hessian(self.minimum), dtype=float))
        return hessian_fd(self.phase, self.minimum)


def hessian_fd(phase, t0, step=None):
    """Symmetrised central second differences of ``phase`` at ``t0``.

    Default step is max(1e-4, 1e-4 |t0_i|) per axis.
    """
    t0 = np.atleast_1d(np.asarray(t0, dtype=float))
    q = t0.size
    h = np.maximum(1e-4, 1e-4 * np.abs(t0)) if step is None else np.broadcast_to(step, (q,)).astype(float)
    f0 = float(phase(t0))
    hess = np.empty((q, q))
    for i in range(q):
        ei = np.zeros(q)
        ei[i] = h[i]
        hess[i, i] = (float(phase(t0 + ei)) - 2.0 * f0 + float(phase(t0 - ei))) / h[i] ** 2
        for j in range(i + 1, q):
            ej = np.zeros(q)
            ej[j] = h[j]
            v = (float(phase(t0 + ei + ej)) - float(phase(t0 + ei - ej))
                 - float(phase(t0 - ei + ej)) + float(phase(t0 - ei - ej))) / (4.0 * h[i] * h[j])
            hess[i, j] = hess[j, i] = v
    return 0.5 * (hess + hess.T)


def laplace_leading(problem, lam, boundary=False):
    """e^{-lam f(t0)} (2 pi / lam)^{q/2} g(t0) det(H)^{-1/2}, halved on a boundary."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    hess = problem.hessian_at_minimum()
    eig = np.linalg.eigvalsh(hess)
    if eig.min() <= EIG_FLOOR:
        raise DegeneratePhaseError(f"Hessian at the minimum is not positive definite (eigenvalues {eig})")
    t0 = problem.minimum
    q = problem.dim
    log_val = (-lam * float(problem.phase(t0)) + 0.5 * q * math.log(2.0 * math.pi / lam)
               - 0.5 * float(np.sum(np.log(eig))))
    val = math.exp(log_val) * float(problem.amplitude(t0))
    return 0.5 * val if boundary else val


def _peak_grid(problem, lam, order, refine):
    t0 = problem.minimum
    hess = problem.hessian_at_minimum()
    diag = np.maximum(np.diag(hess), 1e-300)
    width = 1.0 / np.sqrt(lam * diag) / (2 ** refine)
    axes = []
    for d in range(problem.dim):
        br = graded_breaks(t0[d], width[d], problem.lo[d], problem.hi[d])
        axes.append(composite_rule(br, order))
    pts = np.stack(np.meshgrid(*[a[0] for a in axes], indexing="ij"), axis=-1).reshape(-1, problem.dim)
    wts = np.ones(1)
    for a in axes:
        wts = np.multiply.outer(wts, a[1]).ravel()
    return pts, wts


def laplace_quadrature(problem, lam, config=QuadratureConfig()):
    """int_box e^{-lam f} g by graded tensor GL centred on the minimum.

    The rule is rebuilt with doubled panel order until two successive
    values agree to ``config.rel_tol``.  Returns (value, est_rel_err).
    """
    f0 = float(problem.phase(problem.minimum))
    order = config.panel_order
    prev = None
    for level in range(config.max_refine + 2):
        pts, wts = _peak_grid(problem, lam, order, 0)
        vals = np.exp(-lam * (problem.phase(pts) - f0)) * problem.amplitude(pts)
        cur = math.exp(-lam * f0) * float(np.sum(wts * vals))
        if prev is not None:
            err = abs(cur - prev) / max(abs(cur), 1e-300)
            if err <= config.rel_tol:
                return cur, err
        prev = cur
        order *= 2
    raise ConvergenceError(f"Laplace quadrature did not converge at lam={lam}", value=cur,
                           est_rel_err=err, nodes=pts.shape[0])


@dataclass
class ErrorOrderResult:
    slope: float
    constant: float
    lams: np.ndarray
    quadrature: np.ndarray
    leading: np.ndarray
    skipped: bool = False
    ratios: np.ndarray = field(init=False)

    def __post_init__(self):
        self.ratios = self.quadrature / self.leading


def laplace_error_order(problem, lams, boundary=False, config=QuadratureConfig(rel_tol=1e-12)):
    """Fit log|Q/L - 1| against log lam.

    A first correction of order 1/lam shows up as slope -1.  When Q/L is 1
    to rounding (a pure Gaussian) the fit is skipped and slope is nan.
    ``constant`` is max lam |Q/L - 1| over the sample.
    """
    lams = np.asarray(lams, dtype=float)
    if lams.size < 4:
        raise ValueError("need at least four lam values")
    quad = np.array([laplace_quadrature(problem, lam, config)[0] for lam in lams])
    lead = np.array([laplace_leading(problem, lam, boundary) for lam in lams])
    dev = np.abs(quad / lead - 1.0)
    if np.all(dev < 1e-10):
        return ErrorOrderResult(float("nan"), 0.0, lams, quad, lead, skipped=True)
    slope = float(np.polyfit(np.log(lams), np.log(dev), 1)[0])
    return ErrorOrderResult(slope, float(np.max(lams * dev)), lams, quad, lead)


# ---------------------------------------------------------------------------
# Shipped phases
# ---------------------------------------------------------------------------


def gaussian_problem(halfwidth=8.0):
    return LaplaceProblem(
        dim=1, phase=lambda t: 0.5 * np.asarray(t)[..., 0] ** 2,
        amplitude=lambda t: np.ones(np.shape(t)[:-1]), minimum=[0.0],
        lo=[-halfwidth], hi=[halfwidth], hessian=lambda t: [[1.0]], name="gaussian")


def quartic_problem(halfwidth=3.0):
    """f = t^2/2 + t^4."""
    def phase(t):
        t = np.asarray(t)[..., 0]
        return 0.5 * t**2 + t**4
    return LaplaceProblem(
        dim=1, phase=phase, amplitude=lambda t: np.ones(np.shape(t)[:-1]), minimum=[0.0],
        lo=[-halfwidth], hi=[halfwidth], hessian=lambda t: [[1.0]], name="quartic")


def segment_problem(T, alpha):
    """Inner integral of the segment example: f(t) = ln cosh(tau(t, T)/2) on (-alpha, alpha)."""
    def phase(t):
        t = np.asarray(t)[..., 0]
        return np.log1p(-t * T) - 0.5 * (np.log1p(-t * t) + math.log1p(-T * T))
    return LaplaceProblem(
        dim=1, phase=phase, amplitude=lambda t: np.ones(np.shape(t)[:-1]), minimum=[T],
        lo=[-alpha], hi=[alpha], hessian=lambda t: [[1.0 / (1.0 - T * T) ** 2]],
        name=f"segment(T={T})")


def circle_problem(alpha, phi=0.0):
    """Inner integral of the circle example: f = -ln((1-a^2)/(1-a^2 cos(theta-phi)))."""
    a2 = alpha * alpha

    def phase(t):
        t = np.asarray(t)[..., 0]
        return np.log1p(-a2 * np.cos(t - phi)) - math.log1p(-a2)
    return LaplaceProblem(
        dim=1, phase=phase, amplitude=lambda t: np.ones(np.shape(t)[:-1]), minimum=[phi],
        lo=[phi - math.pi], hi=[phi + math.pi], hessian=lambda t: [[a2 / (1.0 - a2)]],
        name=f"circle(alpha={alpha})")


def disc_problem(u1, u2, alpha):
    """Inner integral of the disc example at (u1, u2), Cartesian, box [-alpha, alpha]^2.

    Half-log convention: f = -1/2 ln((1-|x|^2)(1-|u|^2)/(1-x.u)^2), so
    det H = 1/(1-|u|^2)^3 and lam = (n+1) k.  Only meaningful away from the
    disc edge, where the box and the disc agree near the peak.
    """
    uu = u1 * u1 + u2 * u2

    def phase(t):
        t = np.asarray(t)
        x1, x2 = t[..., 0], t[..., 1]
        return np.log1p(-(x1 * u1 + x2 * u2)) - 0.5 * (np.log1p(-(x1 * x1 + x2 * x2)) + math.log1p(-uu))

    def hessian(t):
        c = 1.0 / (1.0 - uu) ** 2
        return [[c * (1.0 - u2 * u2), c * u1 * u2], [c * u1 * u2, c * (1.0 - u1 * u1)]]

    return LaplaceProblem(
        dim=2, phase=phase, amplitude=lambda t: np.ones(np.shape(t)[:-1]), minimum=[u1, u2],
        lo=[-alpha, -alpha], hi=[alpha, alpha], hessian=hessian, name=f"disc({u1},{u2})")


def segment_disc_problem(u1, alpha):
    """Inner integral of the segment-disc example, minimum at (u1, 0)."""
    return disc_problem(u1, 0.0, alpha)


def cr_radial_problem(u2_cos_phi, alpha):
    """Radial integral of the CR-ball example: f(rho) = -ln(sqrt(1-rho^2)/(1 - c rho)), amplitude rho^2."""
    c = u2_cos_phi

    def phase(t):
        t = np.asarray(t)[..., 0]
        return np.log1p(-c * t) - 0.5 * np.log1p(-t * t)
    return LaplaceProblem(
        dim=1, phase=phase, amplitude=lambda t: np.asarray(t)[..., 0] ** 2, minimum=[c],
        lo=[0.0], hi=[alpha], hessian=lambda t: [[1.0 / (1.0 - c * c) ** 2]],
        name=f"cr_radial(c={c})")


SHIPPED_PROBLEMS = {
    "gaussian": lambda: gaussian_problem(),
    "quartic": lambda: quartic_problem(),
    "segment": lambda: segment_problem(0.0, 0.5),
    "circle": lambda: circle_problem(0.5),
    "disc": lambda: disc_problem(0.2, 0.1, 0.9),
    "segment_disc": lambda: segment_disc_problem(0.2, 0.6),
    "cr_radial": lambda: cr_radial_problem(0.4, 0.9),
}
