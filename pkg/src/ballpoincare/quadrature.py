"""Gauss-Legendre rules: tensor grids, graded composite panels, and an
adaptive box-bisection integrator for vectorised integrands."""
from dataclasses import dataclass
from functools import lru_cache
import itertools

import numpy as np

from .errors import ConvergenceError

# Panel edges around a peak, in units of the peak width.
PEAK_OFFSETS = np.array([0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 32.0, 64.0])
# Panel edges for a one-sided grading (e.g. towards an endpoint).
EDGE_OFFSETS = np.array([0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0])


@dataclass(frozen=True)
class QuadratureConfig:
    """Quadrature settings.

    ``nodes_per_axis`` is the node count of a plain tensor rule; composite
    rules use ``panel_order`` nodes per panel.  ``scheme`` is ``"tensor"``
    (one fixed rule, checked against a doubled one) or ``"adaptive"``.
    """

    nodes_per_axis: int = 32
    scheme: str = "adaptive"
    rel_tol: float = 1e-7
    panel_order: int = 8
    max_boxes: int = 4000
    max_refine: int = 3

    def __post_init__(self):
        if self.nodes_per_axis < 8:
            raise ValueError(f"nodes_per_axis must be >= 8, got {self.nodes_per_axis}")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.scheme not in ("tensor", "adaptive"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.panel_order < 2:
            raise ValueError("panel_order must be >= 2")


@lru_cache(maxsize=64)
def gauss_legendre(order):
    """Nodes and weights on [-1, 1] (read-only arrays)."""
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gl_rule(a, b, order):
    x, w = gauss_legendre(order)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def tensor_rule(lo, hi, order):
    """Tensor-product GL rule on the box [lo, hi]; returns (points (M, q), weights (M,))."""
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    axes = [gl_rule(a, b, order) for a, b in zip(lo, hi)]
    pts = np.stack(np.meshgrid(*[ax[0] for ax in axes], indexing="ij"), axis=-1).reshape(-1, lo.size)
    wts = np.ones(1)
    for ax in axes:
        wts = np.multiply.outer(wts, ax[1]).ravel()
    return pts, wts


def graded_breaks(center, scale, lo, hi, offsets=PEAK_OFFSETS):
    """Panel edges on [lo, hi] clustered around ``center`` at width ``scale``.

    Vectorised over ``center``/``scale`` (leading axes).  Edges that fall
    outside the interval are clipped, which yields empty panels of zero
    weight; the shape therefore never depends on the data.
    """
    center = np.asarray(center, dtype=float)
    scale = np.asarray(scale, dtype=float)
    offs = np.concatenate([-offsets[::-1], [0.0], offsets])
    br = np.clip(center[..., None] + scale[..., None] * offs, lo, hi)
    shape = br.shape[:-1] + (1,)
    return np.concatenate([np.full(shape, lo), br, np.full(shape, hi)], axis=-1)


def edge_breaks(lo, hi, scale, offsets=EDGE_OFFSETS, both=True):
    """Panel edges on [lo, hi] graded towards ``hi`` (and ``lo`` if ``both``)."""
    inner = []
    if both:
        inner.append(np.clip(lo + scale * offsets, lo, hi))
    inner.append(np.clip(hi - scale * offsets[::-1], lo, hi))
    return np.sort(np.concatenate([[lo], *inner, [hi]]))


def composite_rule(breaks, order):
    """GL nodes on consecutive panels given by ``breaks`` (last axis).

    Returns arrays with the panel axis flattened into the last axis.
    """
    x, w = gauss_legendre(order)
    a = breaks[..., :-1]
    width = np.diff(breaks, axis=-1)
    nodes = a[..., None] + 0.5 * width[..., None] * (x + 1.0)
    wts = 0.5 * width[..., None] * w
    shape = breaks.shape[:-1] + (-1,)
    return nodes.reshape(shape), wts.reshape(shape)


def integrate_tensor(f, lo, hi, config=QuadratureConfig(scheme="tensor")):
    """Fixed tensor GL rule with a doubled-node check.

    Returns (value, estimated relative error).  Raises ConvergenceError when
    the two rules disagree by more than ``config.rel_tol``.
    """
    n0 = config.nodes_per_axis
    pts, wts = tensor_rule(lo, hi, n0)
    v0 = np.sum(wts * f(pts))
    pts, wts = tensor_rule(lo, hi, 2 * n0)
    v1 = np.sum(wts * f(pts))
    err = abs(v1 - v0) / max(abs(v1), 1e-300)
    if err > config.rel_tol and abs(v1 - v0) > 1e-300:
        raise ConvergenceError(
            f"tensor rule not converged: rel change {err:.3e} > {config.rel_tol:.1e}",
            value=v1, est_rel_err=err, nodes=(2 * n0) ** len(np.atleast_1d(lo)))
    return v1, err


@dataclass
class AdaptiveResult:
    value: complex
    est_abs_err: float
    n_boxes: int
    n_evals: int

    @property
    def est_rel_err(self):
        return self.est_abs_err / max(abs(self.value), 1e-300)


def adaptive_integrate(f, lo, hi, config=QuadratureConfig(), initial_split=4, abs_floor=0.0):
    """Box-bisection cubature for a vectorised integrand ``f((M, q)) -> (M,)``.

    Each box is integrated with tensor GL of ``panel_order`` nodes per axis
    and of half that order; the difference is the box error estimate.
    Boxes whose error exceeds their share of ``rel_tol * |total|`` are split
    along every axis, all of them in one batched evaluation.  Box order is
    kept deterministic (lexicographic creation order) so sums reproduce.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    q = lo.size
    p_hi = config.panel_order
    p_lo = max(2, p_hi // 2)
    ref_hi = tensor_rule(np.zeros(q), np.ones(q), p_hi)
    ref_lo = tensor_rule(np.zeros(q), np.ones(q), p_lo)

    edges = [np.linspace(a, b, initial_split + 1) for a, b in zip(lo, hi)]
    boxes_lo = np.array(list(itertools.product(*[e[:-1] for e in edges])))
    boxes_hi = np.array(list(itertools.product(*[e[1:] for e in edges])))

    def evaluate(blo, bhi):
        width = bhi - blo
        vol = np.prod(width, axis=1)
        pts_h = blo[:, None, :] + width[:, None, :] * ref_hi[0][None]
        pts_l = blo[:, None, :] + width[:, None, :] * ref_lo[0][None]
        nb = blo.shape[0]
        allpts = np.concatenate([pts_h.reshape(-1, q), pts_l.reshape(-1, q)])
        vals = np.asarray(f(allpts))
        vh = vals[: nb * ref_hi[0].shape[0]].reshape(nb, -1)
        vl = vals[nb * ref_hi[0].shape[0]:].reshape(nb, -1)
        qh = vol * np.sum(vh * ref_hi[1], axis=1)
        ql = vol * np.sum(vl * ref_lo[1], axis=1)
        return qh, np.abs(qh - ql), allpts.shape[0]

    vals, errs, n_evals = evaluate(boxes_lo, boxes_hi)
    halves = list(itertools.product((0, 1), repeat=q))
    while True:
        total = np.sum(vals)
        tol = max(config.rel_tol * abs(total), abs_floor)
        err_total = np.sum(errs)
        if err_total <= tol:
            break
        n = vals.size
        if n + len(halves) > config.max_boxes:
            raise ConvergenceError(
                f"adaptive cubature exceeded {config.max_boxes} boxes "
                f"(est rel err {err_total / max(abs(total), 1e-300):.3e})",
                value=total, est_rel_err=err_total / max(abs(total), 1e-300), nodes=n_evals)
        split = errs > tol / n
        if not np.any(split):
            split = errs >= np.max(errs)
        slo, shi = boxes_lo[split], boxes_hi[split]
        mid = 0.5 * (slo + shi)
        new_lo, new_hi = [], []
        for h in halves:
            sel = np.array(h, dtype=bool)
            new_lo.append(np.where(sel, mid, slo))
            new_hi.append(np.where(sel, shi, mid))
        new_lo = np.stack(new_lo, axis=1).reshape(-1, q)
        new_hi = np.stack(new_hi, axis=1).reshape(-1, q)
        nv, ne, ncount = evaluate(new_lo, new_hi)
        n_evals += ncount
        keep = ~split
        boxes_lo = np.concatenate([boxes_lo[keep], new_lo])
        boxes_hi = np.concatenate([boxes_hi[keep], new_hi])
        vals = np.concatenate([vals[keep], nv])
        errs = np.concatenate([errs[keep], ne])
    return AdaptiveResult(total, float(err_total), vals.size, n_evals)
