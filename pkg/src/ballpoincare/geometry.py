"""Complex hyperbolic ball: pairing, Bergman kernel, distance, SU(n,1) action.

Points of the ball are 1-d complex arrays ``z`` with ``|z| < 1``.  All
non-integer powers go through the principal logarithm; on the ball
``-<z, w>`` has positive real part, so no branch cut is ever crossed.
"""
from dataclasses import dataclass
import cmath
import math

import numpy as np

from .errors import DomainError, SingularMapError

ACOSH_CLAMP = 1e-12
SU_TOL = 1e-10


@dataclass(frozen=True)
class KernelContext:
    n: int
    k: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"ball dimension must be >= 1, got {self.n}")
        if self.k < 1:
            raise ValueError(f"weight must be a positive integer, got {self.k}")

    @property
    def big_n(self):
        """(n + 1) k, the exponent that controls every Laplace peak."""
        return (self.n + 1) * self.k


def ball_point(coords, n=None):
    """Validate and return ``coords`` as a complex vector inside the ball."""
    z = np.atleast_1d(np.asarray(coords, dtype=np.complex128))
    if z.ndim != 1:
        raise ValueError(f"a ball point is a 1-d vector, got shape {z.shape}")
    if n is not None and z.size != n:
        raise ValueError(f"expected a point of B^{n}, got {z.size} coordinates")
    if not np.sum(np.abs(z) ** 2) < 1.0:
        raise DomainError(f"point {z} is not inside the unit ball")
    return z


def _check_dims(z, w):
    if z.shape[-1] != w.shape[-1]:
        raise ValueError(f"dimension mismatch: {z.shape[-1]} vs {w.shape[-1]}")


def pairing(z, w):
    """<z, w> = sum z_j conj(w_j) - 1 (broadcasts over leading axes)."""
    z = np.asarray(z, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    _check_dims(z, w)
    return np.sum(z * np.conj(w), axis=-1) - 1.0


def log_bergman_kernel(z, w):
    """Principal log of K(z, w) = n!/pi^n (-<z,w>)^{-(n+1)}."""
    z = np.asarray(z, dtype=np.complex128)
    n = z.shape[-1]
    log_norm = math.lgamma(n + 1) - n * math.log(math.pi)
    return log_norm - (n + 1) * np.log(-pairing(z, w))


def bergman_kernel(z, w, ctx=None):
    z = np.asarray(z, dtype=np.complex128)
    if ctx is not None and ctx.n != z.shape[-1]:
        raise ValueError(f"context dimension {ctx.n} does not match point dimension {z.shape[-1]}")
    return np.exp(log_bergman_kernel(z, w))


def bergman_kernel_power(z, w, k):
    """K(z, w)^k assembled in the log domain."""
    return np.exp(k * log_bergman_kernel(z, w))


def hyperbolic_distance(z, w):
    """Complex hyperbolic distance tau with cosh^2(tau/2) = <z,w><w,z>/(<z,z><w,w>)."""
    z = np.asarray(z, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    _check_dims(z, w)
    # cosh^2 - 1 = sinh^2(tau/2), with the numerator written without cancellation:
    # |1 - z.conj(w)|^2 - (1-|z|^2)(1-|w|^2) = |z-w|^2 - (|z|^2|w|^2 - |z.conj(w)|^2)
    # and the bracket is the Lagrange sum 1/2 sum_ij |z_i w_j - z_j w_i|^2.
    den = (1.0 - np.sum(np.abs(z) ** 2, axis=-1)) * (1.0 - np.sum(np.abs(w) ** 2, axis=-1))
    if np.any(den <= 0.0):
        raise DomainError("points outside the ball")
    wedge = z[..., :, None] * w[..., None, :] - z[..., None, :] * w[..., :, None]
    num = np.sum(np.abs(z - w) ** 2, axis=-1) - 0.5 * np.sum(np.abs(wedge) ** 2, axis=(-2, -1))
    excess = np.asarray(num / den, dtype=float)
    if np.any(excess < -ACOSH_CLAMP):
        raise DomainError(f"cosh^2 ratio {1.0 + excess.min():.17g} below 1; points outside the ball?")
    out = 2.0 * np.arcsinh(np.sqrt(np.maximum(excess, 0.0)))
    return float(out) if out.ndim == 0 else out


def log_cosh_half_distance(z, w):
    """ln cosh(tau(z, w)/2), computed without forming tau."""
    z = np.asarray(z, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    zz = np.sum(np.abs(z) ** 2, axis=-1)
    ww = np.sum(np.abs(w) ** 2, axis=-1)
    return np.log(np.abs(pairing(z, w))) - 0.5 * (np.log1p(-zz) + np.log1p(-ww))


@dataclass(frozen=True, eq=False)
class BallAutomorphism:
    """An element of SU(n, 1) acting on B^n by fractional-linear maps."""

    matrix: np.ndarray

    def __post_init__(self):
        a = np.array(self.matrix, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 2:
            raise ValueError(f"expected an (n+1)x(n+1) matrix, got shape {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    @property
    def n(self):
        return self.matrix.shape[0] - 1

    def su_residual(self):
        """max(|A^T sigma conj(A) - sigma|), |det A - 1|."""
        a = self.matrix
        sigma = np.diag([1.0] * self.n + [-1.0])
        return float(np.max(np.abs(a.T @ sigma @ np.conj(a) - sigma))), float(abs(np.linalg.det(a) - 1.0))

    def validate(self, tol=SU_TOL):
        form, det = self.su_residual()
        scale = max(1.0, float(np.max(np.abs(self.matrix))) ** 2)
        if form > tol * scale or det > tol * scale:
            raise ValueError(f"matrix is not in SU({self.n},1): form residual {form:.2e}, det residual {det:.2e}")
        return self

    def __matmul__(self, other):
        return BallAutomorphism(self.matrix @ other.matrix)

    def inverse(self):
        # A^{-1} = sigma A^* sigma for A in U(n, 1)
        sigma = np.diag([1.0] * self.n + [-1.0])
        return BallAutomorphism(sigma @ np.conj(self.matrix.T) @ sigma)

    def __call__(self, z):
        return apply_automorphism(self, z)


def _denominator(g, z):
    a = g.matrix
    n = g.n
    z = np.asarray(z, dtype=np.complex128)
    _check_dims(z, a[n, :n])
    den = z @ a[n, :n] + a[n, n]
    if np.any(np.abs(den) < 1e-14):
        raise SingularMapError("vanishing denominator; matrix is not in SU(n,1)")
    return den


def apply_automorphism(g, z):
    a = g.matrix
    n = g.n
    z = np.asarray(z, dtype=np.complex128)
    den = _denominator(g, z)
    num = z @ a[:n, :n].T + a[:n, n]
    return num / np.asarray(den)[..., None]


def jacobian(g, z):
    """Complex Jacobian 1/(a_{n+1,1} z_1 + ... + a_{n+1,n+1})^{n+1}."""
    return 1.0 / _denominator(g, z) ** (g.n + 1)


def kernel_transform_residual(g, z, w, ctx=None, relative=False):
    """|J(g,z) conj(J(g,w)) K(gz, gw) - K(z, w)|."""
    lhs = jacobian(g, z) * np.conj(jacobian(g, w)) * bergman_kernel(g(z), g(w))
    rhs = bergman_kernel(z, w, ctx)
    res = float(np.abs(lhs - rhs))
    return res / float(np.abs(rhs)) if relative else res


def build_translation(a):
    """Boost of B^n taking 0 to ``a``.

    For n = 1 this is (1 - |a|^2)^{-1/2} [[1, a], [conj(a), 1]].
    """
    a = np.atleast_1d(np.asarray(a, dtype=np.complex128))
    r2 = float(np.sum(np.abs(a) ** 2))
    if not r2 < 1.0:
        raise DomainError(f"translation target {a} is not inside the ball")
    n = a.size
    s = 1.0 / math.sqrt(1.0 - r2)
    m = np.zeros((n + 1, n + 1), dtype=np.complex128)
    if r2 > 0.0:
        proj = np.outer(a, np.conj(a)) / r2
        m[:n, :n] = np.eye(n) + (s - 1.0) * proj
    else:
        m[:n, :n] = np.eye(n)
    m[:n, n] = s * a
    m[n, :n] = s * np.conj(a)
    m[n, n] = s
    return BallAutomorphism(m)


def build_rotation(theta):
    """diag(e^{i theta/2}, e^{-i theta/2}) in SU(1,1): z -> e^{i theta} z."""
    h = cmath.exp(0.5j * theta)
    return BallAutomorphism(np.diag([h, 1.0 / h]))


def build_unitary(u):
    """Embed a unitary n x n matrix as diag(u, 1), rescaled to determinant 1."""
    u = np.asarray(u, dtype=np.complex128)
    n = u.shape[0]
    if np.max(np.abs(u @ np.conj(u.T) - np.eye(n))) > 1e-12:
        raise ValueError("matrix is not unitary")
    m = np.eye(n + 1, dtype=np.complex128)
    m[:n, :n] = u
    m = m * np.linalg.det(m) ** (-1.0 / (n + 1))
    return BallAutomorphism(m)


def build_elliptic(fix, theta):
    """Rotation by ``theta`` about ``fix`` in B^1: T_a R_theta T_a^{-1}."""
    t = build_translation(np.atleast_1d(fix))
    if t.n != 1:
        raise ValueError("build_elliptic is defined on B^1")
    return t @ build_rotation(theta) @ t.inverse()


def metric_tensor(z):
    """Hermitian coefficient matrix h_{jl} = (conj(z_j) z_l - <z,z> delta_jl) / <z,z>^2.

    This is -d_j dbar_l log(-<z,z>), the positive-definite invariant metric.
    """
    z = np.asarray(z, dtype=np.complex128)
    zz = pairing(z, z).real
    return (np.outer(np.conj(z), z) - zz * np.eye(z.size)) / zz**2


def real_metric(z, u, v):
    """Real inner product of real tangent vectors u, v in (x_1, y_1, ..., x_n, y_n) order."""
    h = metric_tensor(z)
    uc = np.asarray(u, dtype=float).reshape(-1, 2) @ np.array([1.0, 1.0j])
    vc = np.asarray(v, dtype=float).reshape(-1, 2) @ np.array([1.0, 1.0j])
    return float(np.real(uc @ h @ np.conj(vc)))


def complex_structure(v):
    """J d/dx_j = -d/dy_j, J d/dy_j = d/dx_j on vectors in (x_1, y_1, ...) order."""
    v = np.asarray(v, dtype=float).reshape(-1, 2)
    return np.stack([v[:, 1], -v[:, 0]], axis=1).ravel()


def cr_structure_check(alpha, point, n=2, tol=1e-9):
    """Check the CR splitting of the half 3-ball {x1^2 + y1^2 + x2^2 < alpha^2, x2 > 0}.

    ``point`` is (x1, y1, x2).  Returns a dict with the two booleans plus the
    raw residuals: the holomorphic distribution span{d/dx1, d/dy1} must be
    J-invariant, and J of the complementary generator
    d/dx2 - x1 x2/(1-x2^2) d/dx1 - x2 y1/(1-x2^2) d/dy1 must be orthogonal
    to the tangent space.
    """
    x1, y1, x2 = (float(c) for c in point)
    if n < 2:
        raise ValueError("the CR ball lives in B^n with n >= 2")
    if not (x1**2 + y1**2 + x2**2 < alpha**2 and x2 > 0.0):
        raise DomainError(f"sample {point} is not on the half 3-ball of radius {alpha}")
    z = np.zeros(n, dtype=np.complex128)
    z[0] = complex(x1, y1)
    z[1] = x2
    dim = 2 * n

    def unit(i):
        e = np.zeros(dim)
        e[i] = 1.0
        return e

    dx1, dy1, dx2 = unit(0), unit(1), unit(2)
    tangent = [dx1, dy1, dx2]

    def tangent_residual(v):
        # component outside span{dx1, dy1, dx2} in coordinates
        return float(np.max(np.abs(np.delete(v, [0, 1, 2]))))

    hol = max(tangent_residual(complex_structure(dx1)), tangent_residual(complex_structure(dy1)))
    c = 1.0 - x2**2
    perp = dx2 - (x1 * x2 / c) * dx1 - (x2 * y1 / c) * dy1
    jp = complex_structure(perp)
    norm = math.sqrt(real_metric(z, jp, jp))
    ortho = max(abs(real_metric(z, jp, t)) / (norm * math.sqrt(real_metric(z, t, t))) for t in tangent)
    # the generator itself is orthogonal to the holomorphic distribution
    pn = math.sqrt(real_metric(z, perp, perp))
    split = max(abs(real_metric(z, perp, t)) / (pn * math.sqrt(real_metric(z, t, t))) for t in (dx1, dy1))
    return {
        "holomorphic_dist_ok": hol == 0.0,
        "totally_real_dist_ok": ortho <= tol and split <= tol,
        "holomorphic_residual": hol,
        "orthogonality_residual": ortho,
        "splitting_residual": split,
    }
