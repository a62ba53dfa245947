"""Parametrised submanifolds of the ball and the dominant pairing integral

    I1 = c(B^n, k) int_Y int_X (<z,z><zeta,zeta>)^{N/2} / (-<z,zeta>)^N  nu_X(zeta) nu_Y(z)

with N = (n+1) k, together with the shipped example geometries and their
predicted large-k laws.

The outer integral over Y is done by adaptive box bisection.  For every
outer node the inner integrand is peaked (width ~ N^{-1/2}) at the point of
X nearest to z, so the inner rule is a composite Gauss-Legendre grid graded
around that peak, which is located numerically.
"""
from dataclasses import dataclass
import json
import math
from typing import Callable

import numpy as np

from .constants import c_ball
from .errors import ConvergenceError, DomainError, PreconditionError
from .geometry import KernelContext
from .kernels import cr_ball_radial, pairing_block
from .quadrature import (EDGE_OFFSETS, PEAK_OFFSETS, QuadratureConfig, adaptive_integrate,
                         composite_rule, gauss_legendre)

INNER_OFFSETS = np.array([0.75, 1.5, 2.5, 3.5, 5.0, 7.0, 10.0, 16.0, 32.0, 64.0])
INNER_ORDER = 6
# cap on inner points held in memory at once (outer chunk * inner nodes * n)
CHUNK_BUDGET = 3_000_000


@dataclass(frozen=True)
class ParamSubmanifold:
    """A q-parameter chart t -> z in B^n with volume density.

    ``chart`` maps (M, q) reals to (M, n) complex points and ``density`` maps
    (M, q) to (M,) positive weights.  Axes flagged in ``periodic`` must be
    genuinely periodic in the chart with period hi - lo.
    """

    q: int
    n: int
    chart: Callable
    density: Callable
    lo: tuple
    hi: tuple
    periodic: tuple = ()
    name: str = ""

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        if len(lo) != self.q or len(hi) != self.q:
            raise ValueError("box does not match q")
        if any(b <= a for a, b in zip(lo, hi)):
            raise ValueError("empty parameter box")
        per = tuple(bool(p) for p in self.periodic) or (False,) * self.q
        if len(per) != self.q:
            raise ValueError("periodic flags do not match q")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "periodic", per)

    @property
    def box_lo(self):
        return np.array(self.lo)

    @property
    def box_hi(self):
        return np.array(self.hi)

    def points(self, t):
        t = np.asarray(t, dtype=float)
        flat = t.reshape(-1, self.q)
        return np.asarray(self.chart(flat), dtype=complex).reshape(t.shape[:-1] + (self.n,))

    def weights(self, t):
        t = np.asarray(t, dtype=float)
        return np.asarray(self.density(t.reshape(-1, self.q)), dtype=float).reshape(t.shape[:-1])

    def max_radius(self, per_axis=33):
        """Largest |z| over a grid of the box (a check of the r0 < 1 condition)."""
        axes = [np.linspace(a, b, per_axis) for a, b in zip(self.lo, self.hi)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.q)
        return float(np.max(np.linalg.norm(self.points(grid), axis=-1)))


@dataclass(frozen=True)
class PairingResult:
    value: complex
    k: int
    n: int
    quad_nodes: int
    est_rel_err: float
    is_complex: bool = False


@dataclass(frozen=True)
class AsymptoticLaw:
    """I1(k) ~ constant * k^exponent.

    ``kind`` is "asymptotic" (closed-form constant), "exponent_only"
    (constant not known, stored as nan) or "upper_bound".
    """

    constant: float
    exponent: float
    description: str
    kind: str = "asymptotic"

    def __post_init__(self):
        if self.constant < 0:
            raise ValueError("law constant must be non-negative")

    def predict(self, k):
        return self.constant * float(k) ** self.exponent


# ---------------------------------------------------------------------------
# Peak location on the inner manifold
# ---------------------------------------------------------------------------


def _inner_phase(X, z, t):
    """-1/2 ln(1-|zeta|^2) + Re Log(1 - z.conj(zeta)) for zeta = X(t); z (M, n), t (M, ..., q)."""
    zeta = X.points(t)
    extra = zeta.ndim - 2
    zb = z.reshape(z.shape[:1] + (1,) * extra + z.shape[1:])
    rr = np.sum(np.abs(zeta) ** 2, axis=-1)
    cross = 1.0 - np.sum(zb * np.conj(zeta), axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        val = -0.5 * np.log1p(-rr) + np.log(np.abs(cross))
    return np.where(rr < 1.0, val, np.inf)


def _wrap(X, t):
    lo, hi = X.box_lo, X.box_hi
    out = np.clip(t, lo, hi)
    for d, per in enumerate(X.periodic):
        if per:
            out[..., d] = lo[d] + np.mod(t[..., d] - lo[d], hi[d] - lo[d])
    return out


def _fd_derivs(X, z, t, h):
    """Central-difference gradient and Hessian of the inner phase, batched over rows."""
    m, q = t.shape
    f0 = _inner_phase(X, z, t)
    grad = np.empty((m, q))
    hess = np.empty((m, q, q))
    for i in range(q):
        e = np.zeros(q)
        e[i] = h[i]
        fp = _inner_phase(X, z, t + e)
        fm = _inner_phase(X, z, t - e)
        grad[:, i] = (fp - fm) / (2 * h[i])
        hess[:, i, i] = (fp - 2 * f0 + fm) / h[i] ** 2
        for j in range(i + 1, q):
            e2 = np.zeros(q)
            e2[j] = h[j]
            v = (_inner_phase(X, z, t + e + e2) - _inner_phase(X, z, t + e - e2)
                 - _inner_phase(X, z, t - e + e2) + _inner_phase(X, z, t - e - e2)) / (4 * h[i] * h[j])
            hess[:, i, j] = hess[:, j, i] = v
    return f0, grad, hess


def locate_peaks(X, z, coarse=9, iterations=12):
    """Per-row minimiser of the inner phase over X's box.

    Coarse grid search followed by damped projected Newton steps with
    finite-difference derivatives.  Returns (t_star, grad, hess).
    """
    lo, hi = X.box_lo, X.box_hi
    span = hi - lo
    axes = []
    for d in range(X.q):
        if X.periodic[d]:
            axes.append(lo[d] + span[d] * np.arange(coarse) / coarse)
        else:
            axes.append(np.linspace(lo[d], hi[d], coarse))
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, X.q)
    m = z.shape[0]
    vals = _inner_phase(X, z, np.broadcast_to(grid, (m,) + grid.shape))
    t = grid[np.argmin(vals, axis=1)].copy()
    # keep finite differences inside the closed box
    h = 1e-5 * span
    inner_lo = lo + np.where(X.periodic, -np.inf, h)
    inner_hi = hi - np.where(X.periodic, -np.inf, h)

    def clamp(tt):
        return np.clip(_wrap(X, tt), inner_lo, inner_hi)

    t = clamp(t)
    f, g, hs = _fd_derivs(X, z, t, h)
    for _ in range(iterations):
        w, v = np.linalg.eigh(hs)
        w = np.maximum(np.abs(w), 1e-8)
        step = -np.einsum("mij,mj,mkj,mk->mi", v, 1.0 / w, v, g)
        limit = 0.25 * span
        step = np.clip(step, -limit, limit)
        accepted = np.zeros(m, dtype=bool)
        for _half in range(6):
            cand = clamp(t + step)
            fc = _inner_phase(X, z, cand)
            ok = (fc < f) & ~accepted
            t[ok] = cand[ok]
            accepted |= ok
            step *= 0.5
        if not np.any(accepted):
            break
        f, g, hs = _fd_derivs(X, z, t, h)
    at_bound = np.zeros_like(t, dtype=bool)
    for d in range(X.q):
        if not X.periodic[d]:
            at_bound[:, d] = (t[:, d] <= inner_lo[d] + 1e-12 * span[d]) | (t[:, d] >= inner_hi[d] - 1e-12 * span[d])
    g = np.where(at_bound, g, 0.0)
    return t, g, hs


def _breaks(center, scale, lo, hi, offsets):
    offs = np.concatenate([-offsets[::-1], [0.0], offsets])
    br = np.clip(center[:, None] + scale[:, None] * offs, lo[:, None], hi[:, None])
    return np.concatenate([lo[:, None], br, hi[:, None]], axis=1)


def _axis_sigma(curv, slope, span):
    return np.minimum(span, 1.0 / np.maximum(np.maximum(curv, slope), 1e-300))


def _last_axis_conditional(X, z, lead, s0, big_n, newton=3):
    """Peak, curvature and boundary slope of the phase along the last axis,
    with the leading coordinates held at ``lead`` (M, P0, q-1)."""
    d = X.q - 1
    lo, hi = X.box_lo[d], X.box_hi[d]
    span = hi - lo
    h = 1e-5 * span
    per = X.periodic[d]
    s_lo, s_hi = (-np.inf, np.inf) if per else (lo + h, hi - h)

    def phase_at(v):
        return _inner_phase(X, z, np.concatenate([lead, v[..., None]], axis=-1))

    # start from the best of the global peak and a coarse scan of the axis
    scan = lo + span * (np.arange(16) + 0.5) / 16
    cands = np.concatenate([np.broadcast_to(s0[:, None, None], lead.shape[:2] + (1,)),
                            np.broadcast_to(scan, lead.shape[:2] + (16,))], axis=-1)
    vals = np.stack([phase_at(cands[..., i]) for i in range(cands.shape[-1])], axis=-1)
    s = np.take_along_axis(cands, np.argmin(vals, axis=-1)[..., None], axis=-1)[..., 0].copy()

    for _ in range(newton + 1):
        fm, f0, fp = phase_at(s - h), phase_at(s), phase_at(s + h)
        g = (fp - fm) / (2 * h)
        c = (fp - 2 * f0 + fm) / h**2
        if _ == newton:
            break
        step = np.where(c > 0, -g / np.where(c > 0, c, 1.0), -np.sign(g) * 0.05 * span)
        step = np.clip(step, -0.25 * span, 0.25 * span)
        cand = np.clip(s + step, s_lo, s_hi)
        better = phase_at(cand) < f0
        s = np.where(better, cand, s)
    if not per:
        at_bound = (s <= s_lo + 1e-12 * span) | (s >= s_hi - 1e-12 * span)
        g = np.where(at_bound, g, 0.0)
    else:
        g = np.zeros_like(g)
    curv = np.sqrt(big_n * np.maximum(c, 0.0))
    return s, _axis_sigma(curv, big_n * np.abs(g), span)


def _inner_rule(X, z, t_star, grad, hess, big_n, order):
    """Graded rule on X's box for every row: points (M, P, q) and weights (M, P).

    Leading axes are graded around the peak as a tensor grid; the last axis
    (when q >= 2) is re-graded for every leading node, which keeps polar
    style charts accurate near their centre.
    """
    m = t_star.shape[0]
    span = X.box_hi - X.box_lo

    def axis_rule(center, sigma, d):
        if X.periodic[d]:
            lo = center - 0.5 * span[d]
            hi = center + 0.5 * span[d]
        else:
            lo = np.full(center.shape, X.box_lo[d])
            hi = np.full(center.shape, X.box_hi[d])
        flat = _breaks(center.ravel(), sigma.ravel(), lo.ravel(), hi.ravel(), INNER_OFFSETS)
        x, w = composite_rule(flat, order)
        return x.reshape(center.shape + (-1,)), w.reshape(center.shape + (-1,))

    if X.q == 1:
        sig = _axis_sigma(np.sqrt(big_n * np.maximum(hess[:, 0, 0], 0.0)), big_n * np.abs(grad[:, 0]), span[0])
        x, w = axis_rule(t_star[:, 0], sig, 0)
        return x[:, :, None], w
    lead_x, lead_w = [], []
    for d in range(X.q - 1):
        sig = _axis_sigma(np.sqrt(big_n * np.maximum(hess[:, d, d], 0.0)), big_n * np.abs(grad[:, d]), span[d])
        x, w = axis_rule(t_star[:, d], sig, d)
        lead_x.append(x)
        lead_w.append(w)
    grids = np.meshgrid(*[np.arange(a.shape[1]) for a in lead_x], indexing="ij")
    idx = [g.ravel() for g in grids]
    lead = np.stack([lead_x[d][:, idx[d]] for d in range(X.q - 1)], axis=-1)
    lw = np.ones((m, idx[0].size))
    for d in range(X.q - 1):
        lw = lw * lead_w[d][:, idx[d]]
    s_star, sig = _last_axis_conditional(X, z, lead, t_star[:, -1], big_n)
    x, w = axis_rule(s_star, sig, X.q - 1)
    p0, p1 = lead.shape[1], x.shape[2]
    pts = np.concatenate([np.broadcast_to(lead[:, :, None, :], (m, p0, p1, X.q - 1)), x[..., None]], axis=-1)
    wts = lw[:, :, None] * w
    return pts.reshape(m, p0 * p1, X.q), wts.reshape(m, p0 * p1)


def inner_integral(X, z, big_n, order=INNER_ORDER):
    """int_X (<z,z><zeta,zeta>)^{N/2} (-<z,zeta>)^{-N} nu_X for each row of z (M, n)."""
    z = np.ascontiguousarray(z, dtype=complex)
    out = np.empty(z.shape[0], dtype=complex)
    per_row = (len(INNER_OFFSETS) * 2 + 2) ** X.q * order ** X.q * X.n
    chunk = max(1, CHUNK_BUDGET // per_row)
    for s in range(0, z.shape[0], chunk):
        zc = z[s:s + chunk]
        t_star, g, h = locate_peaks(X, zc)
        pts, wts = _inner_rule(X, zc, t_star, g, h, big_n, order)
        zeta = np.ascontiguousarray(X.points(pts))
        wts = np.ascontiguousarray(wts * X.weights(pts))
        out[s:s + chunk] = pairing_block(zc, zeta, wts, float(big_n))
    return out


def i1_pairing(X, Y, ctx, quad=QuadratureConfig()):
    """c(B^n, k) times the double integral over Y x X (outer Y, inner X).

    The outer rule is adaptive to ``quad.rel_tol``.  The inner rule's error
    is estimated by rerunning a strided subset of outer nodes with doubled
    panel order; the reported ``est_rel_err`` is the larger of the two.
    """
    if X.n != Y.n or X.n != ctx.n:
        raise ValueError("dimension mismatch between submanifolds and context")
    if X.q < 1 or Y.q < 1:
        raise PreconditionError("submanifolds must have q >= 1")
    big_n = ctx.big_n
    last = {}

    def outer(t):
        vals = Y.weights(t) * inner_integral(X, Y.points(t), big_n)
        last["t"] = t
        return vals

    split = max(1, math.ceil(quad.nodes_per_axis / quad.panel_order))
    res = adaptive_integrate(outer, Y.box_lo, Y.box_hi, quad, initial_split=split)

    # inner check: doubled order on up to 256 of the outer nodes
    t_all = last["t"]
    stride = max(1, t_all.shape[0] // 256)
    ts = t_all[::stride]
    zs = Y.points(ts)
    base = inner_integral(X, zs, big_n, INNER_ORDER)
    fine = inner_integral(X, zs, big_n, 2 * INNER_ORDER)
    wy = Y.weights(ts)
    inner_err = float(np.sum(np.abs(wy * (fine - base))) / max(np.sum(np.abs(wy * fine)), 1e-300))

    est = max(res.est_rel_err, inner_err)
    if est > quad.rel_tol and inner_err > quad.rel_tol:
        raise ConvergenceError(f"inner rule not converged (rel change {inner_err:.3e})",
                               value=res.value, est_rel_err=est, nodes=res.n_evals)
    c = c_ball(ctx.n, ctx.k).value
    value = c * res.value
    is_complex = bool(abs(value.imag) > 1e-10 * max(abs(value), 1e-300))
    out = complex(value) if is_complex else float(value.real)
    return PairingResult(out, ctx.k, ctx.n, int(res.n_evals), float(est), is_complex)


# ---------------------------------------------------------------------------
# Example geometries
# ---------------------------------------------------------------------------


def _embed(n, *cols):
    def build(t):
        m = t.shape[0]
        z = np.zeros((m, n), dtype=complex)
        for j, col in enumerate(cols):
            z[:, j] = col(t)
        return z
    return build


def _ones(t):
    return np.ones(t.shape[0])


def _check_alpha(alpha, name="alpha"):
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {alpha}")


def _check_n(n, minimum):
    if n < minimum:
        raise DomainError(f"this example needs n >= {minimum}, got {n}")


def segment(n, alpha, phi=0.0):
    """z_1 = t e^{i phi}, |t| < alpha, nu = dt."""
    _check_n(n, 1)
    _check_alpha(alpha)
    rot = complex(math.cos(phi), math.sin(phi))
    return ParamSubmanifold(1, n, _embed(n, lambda t: rot * t[:, 0]), _ones,
                            (-alpha,), (alpha,), name=f"segment(alpha={alpha})")


def circle(n, alpha):
    """(x_1, x_2) = alpha (cos T, sin T), nu = dT."""
    _check_n(n, 2)
    _check_alpha(alpha)
    return ParamSubmanifold(
        1, n, _embed(n, lambda t: alpha * np.cos(t[:, 0]), lambda t: alpha * np.sin(t[:, 0])),
        _ones, (0.0,), (2 * math.pi,), periodic=(True,), name=f"circle(alpha={alpha})")


def disc_polar(n, alpha):
    """Real disc of radius alpha in the x_1 x_2 plane, polar chart (r, theta), nu = r dr dtheta."""
    _check_n(n, 2)
    _check_alpha(alpha)
    return ParamSubmanifold(
        2, n, _embed(n, lambda t: t[:, 0] * np.cos(t[:, 1]), lambda t: t[:, 0] * np.sin(t[:, 1])),
        lambda t: t[:, 0], (0.0, 0.0), (alpha, 2 * math.pi), periodic=(False, True),
        name=f"disc(alpha={alpha})")


def square_cartesian(n, half):
    """Real square |x_1|, |x_2| < half in the x_1 x_2 plane, Cartesian chart."""
    _check_n(n, 2)
    _check_alpha(half * math.sqrt(2.0), "half * sqrt(2)")
    return ParamSubmanifold(2, n, _embed(n, lambda t: t[:, 0], lambda t: t[:, 1]), _ones,
                            (-half, -half), (half, half), name=f"square(half={half})")


def real_segment(n, a, b):
    """Real segment a < x_1 < b, nu = dx_1."""
    _check_n(n, 1)
    if not -1.0 < a < b < 1.0:
        raise DomainError(f"need -1 < a < b < 1, got {a}, {b}")
    return ParamSubmanifold(1, n, _embed(n, lambda t: t[:, 0]), _ones, (a,), (b,),
                            name=f"segment[{a},{b}]")


def cr_ball(n, alpha):
    """Half 3-ball x_1^2 + y_1^2 + x_2^2 < alpha^2, x_2 > 0, spherical chart (rho, Phi, Theta).

    Density rho^2 sin(Phi) so that nu = dx_1 dy_1 dx_2.
    """
    _check_n(n, 2)
    _check_alpha(alpha)

    def z1(t):
        return t[:, 0] * np.sin(t[:, 1]) * np.exp(1j * t[:, 2])

    def z2(t):
        return t[:, 0] * np.cos(t[:, 1])

    return ParamSubmanifold(
        3, n, _embed(n, z1, z2), lambda t: t[:, 0] ** 2 * np.sin(t[:, 1]),
        (0.0, 0.0, 0.0), (alpha, 0.5 * math.pi, 2 * math.pi), periodic=(False, False, True),
        name=f"cr_ball(alpha={alpha})")


def _c_half(n):
    return (n + 1) ** (n - 0.5) / math.factorial(n)


def example_segment(n, alpha, phi=0.0):
    X = segment(n, alpha, phi)
    C = _c_half(n) * 2.0 * math.sqrt(2 * math.pi) * (alpha - alpha**3 / 3.0)
    return X, X, AsymptoticLaw(C, n - 0.5, "segment: c(n)(alpha - alpha^3/3) k^(n-1/2)")


def example_circle(n, alpha):
    X = circle(n, alpha)
    C = _c_half(n) * 2.0 * math.pi * math.sqrt(2 * math.pi) * math.sqrt(1 - alpha**2) / alpha
    return X, X, AsymptoticLaw(C, n - 0.5, "circle: c(n) sqrt(1-alpha^2)/alpha k^(n-1/2)")


def example_disc(n, alpha):
    X = disc_polar(n, alpha)
    C = (4 * math.pi**2 / 5.0) * (n + 1) ** (n - 1) / math.factorial(n) * (1 - (1 - alpha**2) ** 2.5)
    return X, X, AsymptoticLaw(C, n - 1.0, "disc: (4 pi^2/5)(n+1)^(n-1)/n! (1-(1-alpha^2)^(5/2)) k^(n-1)")


def example_segment_disc(n, alpha, beta):
    """Y = real segment |x_1| < beta, X = real disc of radius alpha."""
    if not 0.0 < beta < alpha:
        raise DomainError(f"need 0 < beta < alpha, got beta={beta}, alpha={alpha}")
    X = disc_polar(n, alpha)
    Y = real_segment(n, -beta, beta)
    return X, Y, AsymptoticLaw(float("nan"), n - 1.0, "segment-disc: const(n, beta) k^(n-1)",
                               kind="exponent_only")


def example_cr_ball(n, alpha):
    X = cr_ball(n, alpha)
    return X, X, AsymptoticLaw(float("nan"), n - 2.0, "CR half-ball: |I1| <= const k^(n-2)",
                               kind="upper_bound")


EXAMPLES = {
    "segment": example_segment,
    "circle": example_circle,
    "disc": example_disc,
    "segment_disc": example_segment_disc,
    "cr_ball": example_cr_ball,
}


# ---------------------------------------------------------------------------
# CR half-ball: analytic angular integrations leave a 4-D integral
# ---------------------------------------------------------------------------


def cr_ball_reduced_integrand(rho, phi, r, psi, ctx):
    """(1-rho^2)^{N/2} (1-r^2)^{N/2} (1 - u_2 rho cos Phi)^{-N} rho^2 sin Phi r^2 sin psi, u_2 = r cos psi."""
    rho, phi, r, psi = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (rho, phi, r, psi)))
    big_n = ctx.big_n
    x = rho * r * np.cos(phi) * np.cos(psi)
    expo = 0.5 * big_n * (np.log1p(-rho**2) + np.log1p(-r**2)) - big_n * np.log1p(-x)
    return np.exp(expo) * rho**2 * np.sin(phi) * r**2 * np.sin(psi)


def i1_cr_ball(alpha, ctx, quad=QuadratureConfig(), order=8):
    """I1 for the CR half-ball via the reduced integral.

    With a = cos Phi and b = cos psi the remaining integral is
    4 pi^2 c int_0^alpha drho int_0^alpha dr int_0^1 da int_0^1 db of the
    reduced integrand; the (r, a, b) part is a compiled kernel and rho is
    integrated adaptively.  Inner error: doubled panel order on a subset
    of the rho nodes.
    """
    _check_alpha(alpha)
    _check_n(ctx.n, 2)
    big_n = float(ctx.big_n)
    offs_r = np.ascontiguousarray(PEAK_OFFSETS)
    offs_ab = np.ascontiguousarray(np.sort(EDGE_OFFSETS))

    def radial(rho, p):
        gx, gw = (np.ascontiguousarray(a) for a in gauss_legendre(p))
        return cr_ball_radial(np.ascontiguousarray(rho), big_n, float(alpha), gx, gw, offs_r, offs_ab)

    last = {}

    def outer(t):
        last["rho"] = t[:, 0]
        return radial(t[:, 0], order)

    split = max(1, math.ceil(quad.nodes_per_axis / quad.panel_order))
    res = adaptive_integrate(outer, [0.0], [alpha], quad, initial_split=split)
    rho = last["rho"]
    sub = rho[:: max(1, rho.size // 24)]
    base = radial(sub, order)
    fine = radial(sub, 2 * order)
    inner_err = float(np.sum(np.abs(fine - base)) / max(np.sum(np.abs(fine)), 1e-300))
    est = max(res.est_rel_err, inner_err)
    if inner_err > quad.rel_tol:
        raise ConvergenceError(f"CR radial kernel not converged (rel change {inner_err:.3e})",
                               value=res.value, est_rel_err=est, nodes=res.n_evals)
    value = c_ball(ctx.n, ctx.k).value * 4.0 * math.pi**2 * float(np.real(res.value))
    return PairingResult(value, ctx.k, ctx.n, int(res.n_evals), float(est))


# ---------------------------------------------------------------------------
# Growth and decay diagnostics
# ---------------------------------------------------------------------------


@dataclass
class LawRow:
    k: int
    value: float
    ratio: float


def ratio_to_law(X, Y, law, ks, n, quad=QuadratureConfig()):
    """Rows (k, I1, I1 / (C k^exponent)) for a law with a known constant."""
    if not math.isfinite(law.constant) or law.kind != "asymptotic":
        raise PreconditionError(f"law has no closed-form constant ({law.kind})")
    rows = []
    for k in ks:
        res = i1_pairing(X, Y, KernelContext(n, int(k)), quad)
        rows.append(LawRow(int(k), float(np.real(res.value)), float(np.real(res.value)) / law.predict(k)))
    return rows


def fit_power(ks, values):
    """Least-squares slope and intercept of log|values| against log k."""
    slope, icpt = np.polyfit(np.log(np.asarray(ks, float)), np.log(np.abs(np.asarray(values, float))), 1)
    return float(slope), float(math.exp(icpt))


def min_distance(X, Y, per_axis=65):
    """Minimum hyperbolic distance between grid samples of X and Y (box edges included)."""
    def sample(S):
        axes = [np.linspace(a, b, per_axis) for a, b in zip(S.lo, S.hi)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, S.q)
        return S.points(grid)

    zx, zy = sample(X), sample(Y)
    pair = zy @ np.conj(zx).T - 1.0
    nx = np.sum(np.abs(zx) ** 2, axis=-1) - 1.0
    ny = np.sum(np.abs(zy) ** 2, axis=-1) - 1.0
    ratio = np.abs(pair) ** 2 / (ny[:, None] * nx[None, :])
    ratio = np.maximum(ratio, 1.0)
    return float(2.0 * np.arccosh(np.sqrt(ratio.min())))


@dataclass
class DecayResult:
    d_eff: float
    slope: float
    bound: float
    ks: np.ndarray
    log_values: np.ndarray

    @property
    def passed(self):
        return self.slope <= self.bound


def separated_decay(X, Y, n, ks, quad=QuadratureConfig()):
    """Fit ln I1 against k for two disjoint submanifolds.

    The bound is -(n+1) ln cosh(d_eff/2) + 0.05 with d_eff the measured
    minimum distance between them.
    """
    d_eff = min_distance(X, Y)
    if d_eff <= 1e-9:
        raise PreconditionError(f"submanifolds are not separated (d_eff = {d_eff:.3e})")
    logs = []
    for k in ks:
        res = i1_pairing(X, Y, KernelContext(n, int(k)), quad)
        if not np.real(res.value) > 0:
            raise ConvergenceError("separated pairing underflowed", value=res.value,
                                   est_rel_err=res.est_rel_err, nodes=res.quad_nodes)
        logs.append(math.log(float(np.real(res.value))))
    ks = np.asarray(ks, dtype=float)
    logs = np.asarray(logs)
    slope = float(np.polyfit(ks, logs, 1)[0])
    bound = -(n + 1) * math.log(math.cosh(0.5 * d_eff)) + 0.05
    return DecayResult(d_eff, slope, bound, ks, logs)


DECAY_GEOMETRIES = {
    "near": ((-0.6, -0.2), (0.2, 0.6)),
    "far": ((-0.8, -0.4), (0.4, 0.8)),
}


def decay_geometry(name, n=1):
    (a0, a1), (b0, b1) = DECAY_GEOMETRIES[name]
    return real_segment(n, a0, a1), real_segment(n, b0, b1)


def tangent_hessian_check(X, t0, step=1e-6):
    """Smallest eigenvalue of B conj(B)^T + conj(B) B^T, B_{ij} = d z_j / d t_i."""
    t0 = np.asarray(t0, dtype=float).reshape(X.q)
    rows = []
    for i in range(X.q):
        e = np.zeros(X.q)
        e[i] = step
        rows.append((X.points(t0 + e) - X.points(t0 - e)) / (2 * step))
    B = np.array(rows)
    H = B @ np.conj(B).T + np.conj(B) @ B.T
    return float(np.linalg.eigvalsh(0.5 * (H + np.conj(H).T)).min())


# ---------------------------------------------------------------------------
# Config files
# ---------------------------------------------------------------------------

CUSTOM_CHARTS = {
    "real_segment": lambda n, p: real_segment(n, p["a"], p["b"]),
    "square": lambda n, p: square_cartesian(n, p["half"]),
    "segment": lambda n, p: segment(n, p["alpha"], p.get("phi", 0.0)),
    "circle": lambda n, p: circle(n, p["alpha"]),
    "disc": lambda n, p: disc_polar(n, p["alpha"]),
    "cr_ball": lambda n, p: cr_ball(n, p["alpha"]),
}


def submanifold_from_config(cfg):
    """Build (X, Y, law) from a mapping or a JSON file path.

    Example types take {type, n, alpha, beta?, phi?}.  A ``custom_chart``
    entry names a built-in chart: {type: custom_chart, n, chart, params}.
    A mapping with keys X and Y pairs two such entries (law is None).
    """
    if isinstance(cfg, str):
        with open(cfg, encoding="utf-8") as fh:
            cfg = json.load(fh)
    if "X" in cfg and "Y" in cfg:
        X = _single(cfg["X"])
        Y = _single(cfg["Y"])
        return X, Y, None
    kind = cfg.get("type")
    if kind in EXAMPLES:
        kwargs = {"n": int(cfg["n"]), "alpha": float(cfg["alpha"])}
        if kind == "segment_disc":
            kwargs["beta"] = float(cfg["beta"])
        if kind == "segment" and "phi" in cfg:
            kwargs["phi"] = float(cfg["phi"])
        return EXAMPLES[kind](**kwargs)
    X = _single(cfg)
    return X, X, None


def _single(entry):
    kind = entry.get("type")
    n = int(entry["n"])
    if kind == "custom_chart":
        name = entry["chart"]
        if name not in CUSTOM_CHARTS:
            raise ValueError(f"unknown chart {name!r}; available: {sorted(CUSTOM_CHARTS)}")
        return CUSTOM_CHARTS[name](n, entry.get("params", {}))
    if kind in CUSTOM_CHARTS:
        return CUSTOM_CHARTS[kind](n, entry)
    raise ValueError(f"unknown submanifold type {kind!r}")
