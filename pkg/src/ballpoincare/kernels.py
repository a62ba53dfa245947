"""Hot inner loops.

Every kernel exists twice: a loop version compiled with numba and a
vectorised numpy version.  ``USE_NUMBA`` (see ``_accel``) picks the exported
name; both implementations stay importable so they can be compared.

Reductions inside a kernel run sequentially per output slot, so results do
not depend on the number of numba threads.
"""
import cmath
import math

import numpy as np

from ._accel import HAS_NUMBA, USE_NUMBA, jit, njit, prange

__all__ = [
    "pairing_block",
    "series_terms",
    "cr_ball_radial",
    "IMPLEMENTATIONS",
]


# --------------------------------------------------------------------------
# Cross-integrand of the submanifold pairing
#
#   out[i] = sum_j w[i, j] * exp(N/2 (log(-<z,z>) + log(-<x,x>)) - N Log(-<z,x>))
#
# with z = outer[i], x = inner[i, j].  |summand| <= w since cosh(tau/2) >= 1.
# --------------------------------------------------------------------------


def _pairing_block_py(outer, inner, weights, big_n):
    m, p, n = inner.shape
    out = np.zeros(m, dtype=np.complex128)
    half = 0.5 * big_n
    for i in prange(m):
        zz = 0.0
        for d in range(n):
            zz += outer[i, d].real ** 2 + outer[i, d].imag ** 2
        lz = math.log1p(-zz)
        acc = 0.0 + 0.0j
        for j in range(p):
            w = weights[i, j]
            if w == 0.0:
                continue
            xx = 0.0
            cross = 1.0 + 0.0j
            for d in range(n):
                x = inner[i, j, d]
                xx += x.real ** 2 + x.imag ** 2
                cross -= outer[i, d] * x.conjugate()
            expo = half * (lz + math.log1p(-xx)) - big_n * cmath.log(cross)
            acc += w * cmath.exp(expo)
        out[i] = acc
    return out


def _pairing_block_np(outer, inner, weights, big_n):
    zz = np.sum(np.abs(outer) ** 2, axis=-1)
    xx = np.sum(np.abs(inner) ** 2, axis=-1)
    cross = 1.0 - np.einsum("id,ijd->ij", outer, np.conj(inner))
    expo = 0.5 * big_n * (np.log1p(-zz)[:, None] + np.log1p(-xx)) - big_n * np.log(cross)
    return np.sum(weights * np.exp(expo), axis=1)


# --------------------------------------------------------------------------
# Poincare series terms (K(g z, p) J(g, z))^k for a stack of matrices.
# --------------------------------------------------------------------------


def _series_terms_py(mats, z, p, k, log_norm):
    e = mats.shape[0]
    n = z.shape[0]
    out = np.zeros(e, dtype=np.complex128)
    for idx in prange(e):
        den = mats[idx, n, n]
        for l in range(n):
            den += mats[idx, n, l] * z[l]
        pair = -1.0 + 0.0j
        for r in range(n):
            num = mats[idx, r, n]
            for l in range(n):
                num += mats[idx, r, l] * z[l]
            pair += (num / den) * p[r].conjugate()
        log_kj = log_norm - (n + 1) * cmath.log(-pair) - (n + 1) * cmath.log(den)
        out[idx] = cmath.exp(k * log_kj)
    return out


def _series_terms_np(mats, z, p, k, log_norm):
    n = z.shape[0]
    den = mats[:, n, :n] @ z + mats[:, n, n]
    num = mats[:, :n, :n] @ z + mats[:, :n, n]
    gz = num / den[:, None]
    pair = gz @ np.conj(p) - 1.0
    log_kj = log_norm - (n + 1) * np.log(-pair) - (n + 1) * np.log(den)
    return np.exp(k * log_kj)


# --------------------------------------------------------------------------
# Reduced CR-ball integrand.  For each radial node rho returns
#
#   rho^2 * int_0^alpha dr r^2 (1-rho^2)^{N/2} (1-r^2)^{N/2}
#           * int_0^1 int_0^1 (1 - rho r a b)^{-N} da db
#
# where a = cos(Phi), b = cos(psi).  Panels are graded around r = rho and
# towards a = 1, b = 1 where the integrand peaks.
# --------------------------------------------------------------------------


def _graded_breaks(center, scale, lo, hi, offsets):
    nb = 2 * offsets.shape[0] + 3
    br = np.empty(nb)
    br[0] = lo
    k = 1
    for q in range(offsets.shape[0] - 1, -1, -1):
        br[k] = min(max(center - scale * offsets[q], lo), hi)
        k += 1
    br[k] = min(max(center, lo), hi)
    k += 1
    for q in range(offsets.shape[0]):
        br[k] = min(max(center + scale * offsets[q], lo), hi)
        k += 1
    br[k] = hi
    return br


def _edge_breaks(scale, offsets):
    # breakpoints on [0, 1] graded towards 1
    nb = offsets.shape[0] + 2
    br = np.empty(nb)
    br[0] = 0.0
    for q in range(offsets.shape[0]):
        br[q + 1] = max(1.0 - scale * offsets[offsets.shape[0] - 1 - q], 0.0)
    br[nb - 1] = 1.0
    return br


def _cr_ball_radial_py(rho, big_n, alpha, gx, gw, r_offsets, ab_offsets):
    m = rho.shape[0]
    out = np.zeros(m)
    order = gx.shape[0]
    half = 0.5 * big_n
    sq = math.sqrt(big_n)
    for i in prange(m):
        ro = rho[i]
        lro = half * math.log1p(-ro * ro)
        sig = max((1.0 - ro * ro) / sq, 1e-300)
        rb = _graded_breaks(ro, sig, 0.0, alpha, r_offsets)
        total = 0.0
        for pr in range(rb.shape[0] - 1):
            ra = rb[pr]
            rw = rb[pr + 1] - ra
            if rw <= 0.0:
                continue
            for qr in range(order):
                r = ra + 0.5 * rw * (gx[qr] + 1.0)
                wr = 0.5 * rw * gw[qr]
                x = ro * r
                base = lro + half * math.log1p(-r * r)
                if x > 0.0:
                    s = min(1.0, (1.0 - x) / (big_n * x))
                else:
                    s = 1.0
                ab = _edge_breaks(s, ab_offsets)
                inner = 0.0
                for pa in range(ab.shape[0] - 1):
                    aa = ab[pa]
                    aw = ab[pa + 1] - aa
                    if aw <= 0.0:
                        continue
                    for qa in range(order):
                        a = aa + 0.5 * aw * (gx[qa] + 1.0)
                        wa = 0.5 * aw * gw[qa]
                        for pb in range(ab.shape[0] - 1):
                            ba = ab[pb]
                            bw = ab[pb + 1] - ba
                            if bw <= 0.0:
                                continue
                            for qb in range(order):
                                b = ba + 0.5 * bw * (gx[qb] + 1.0)
                                wb = 0.5 * bw * gw[qb]
                                inner += wa * wb * math.exp(base - big_n * math.log1p(-x * a * b))
                total += wr * r * r * inner
        out[i] = ro * ro * total
    return out


def _breaks_np(center, scale, lo, hi, offsets):
    offs = np.concatenate([-offsets[::-1], [0.0], offsets])
    br = np.clip(center + scale * offs, lo, hi)
    return np.concatenate([[lo], br, [hi]])


def _panel_nodes_np(breaks, gx, gw):
    a = breaks[:-1]
    w = np.diff(breaks)
    x = a[:, None] + 0.5 * w[:, None] * (gx[None, :] + 1.0)
    ww = 0.5 * w[:, None] * gw[None, :]
    return x.ravel(), ww.ravel()


def _cr_ball_radial_np(rho, big_n, alpha, gx, gw, r_offsets, ab_offsets):
    out = np.zeros(rho.shape[0])
    half = 0.5 * big_n
    ab_offs = np.sort(ab_offsets)
    for i, ro in enumerate(rho):
        sig = max((1.0 - ro * ro) / math.sqrt(big_n), 1e-300)
        r, wr = _panel_nodes_np(_breaks_np(ro, sig, 0.0, alpha, r_offsets), gx, gw)
        x = ro * r
        with np.errstate(divide="ignore"):
            s = np.where(x > 0.0, np.minimum(1.0, (1.0 - x) / (big_n * np.where(x > 0, x, 1.0))), 1.0)
        # per-r graded rule on [0, 1]: breaks shape (len(r), nb)
        inner_br = np.concatenate(
            [np.zeros((r.size, 1)), np.maximum(1.0 - s[:, None] * ab_offs[::-1][None, :], 0.0),
             np.ones((r.size, 1))], axis=1)
        lo = inner_br[:, :-1]
        wd = np.diff(inner_br, axis=1)
        a = (lo[:, :, None] + 0.5 * wd[:, :, None] * (gx + 1.0)).reshape(r.size, -1)
        wa = (0.5 * wd[:, :, None] * gw).reshape(r.size, -1)
        prod = x[:, None, None] * a[:, :, None] * a[:, None, :]
        base = half * (math.log1p(-ro * ro) + np.log1p(-r * r))
        vals = np.exp(base[:, None, None] - big_n * np.log1p(-prod))
        inner = np.einsum("ra,rb,rab->r", wa, wa, vals)
        out[i] = ro * ro * np.sum(wr * r * r * inner)
    return out


if HAS_NUMBA:
    # called from the compiled radial kernel, so they must be compiled too
    _graded_breaks = njit(cache=True)(_graded_breaks)
    _edge_breaks = njit(cache=True)(_edge_breaks)

_pairing_block_nb = jit(_pairing_block_py)
_series_terms_nb = jit(_series_terms_py)
_cr_ball_radial_nb = jit(_cr_ball_radial_py)

IMPLEMENTATIONS = {
    "numba": {
        "pairing_block": _pairing_block_nb,
        "series_terms": _series_terms_nb,
        "cr_ball_radial": _cr_ball_radial_nb,
    },
    "numpy": {
        "pairing_block": _pairing_block_np,
        "series_terms": _series_terms_np,
        "cr_ball_radial": _cr_ball_radial_np,
    },
}

_active = IMPLEMENTATIONS["numba" if USE_NUMBA else "numpy"]
pairing_block = _active["pairing_block"]
series_terms = _active["series_terms"]
cr_ball_radial = _active["cr_ball_radial"]
