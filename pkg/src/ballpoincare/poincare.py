"""Word-enumerated truncations of discrete subgroups of SU(1,1), unitary
representations on them, and truncated Poincare series.

Group elements are kept modulo the centre ({+I, -I} for n = 1): both act
identically on the ball and share the automorphy factor J, which enters
with exponent n + 1 = 2.
"""
from dataclasses import dataclass
import json
import math

import numpy as np
from scipy.spatial import cKDTree

from .constants import c_ball
from .errors import (ConvergenceError, DomainError, NumericalError, RepresentationError,
                     TruncationOverflowError)
from .geometry import (BallAutomorphism, apply_automorphism, build_elliptic,
                       build_rotation, build_translation, jacobian)
from .kernels import series_terms
from .quadrature import gl_rule

DEDUP_TOL = 1e-9
RELATION_TOL = 1e-6
RECHECK_TOL = 1e-7
UNITARY_TOL = 1e-10
CANCEL_TOL = 1e-13


@dataclass(frozen=True)
class GroupSpec:
    generators: tuple
    names: tuple = ()

    def __post_init__(self):
        gens = tuple(g if isinstance(g, BallAutomorphism) else BallAutomorphism(g) for g in self.generators)
        if not gens:
            raise ValueError("a group needs at least one generator")
        dims = {g.n for g in gens}
        if len(dims) != 1:
            raise ValueError("generators act on balls of different dimension")
        for g in gens:
            g.validate()
        names = tuple(self.names) or tuple(chr(ord("a") + i) for i in range(len(gens)))
        if len(names) != len(gens):
            raise ValueError("one name per generator")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "names", names)

    @property
    def n(self):
        return self.generators[0].n

    def letters(self):
        """Generators followed by their inverses, in a fixed order: (name, matrix, gen index, inverse?)."""
        out = [(nm, g.matrix, i, False) for i, (nm, g) in enumerate(zip(self.names, self.generators))]
        out += [(nm + "^-1", g.inverse().matrix, i, True) for i, (nm, g) in enumerate(zip(self.names, self.generators))]
        return out


@dataclass(frozen=True)
class UnitaryRep:
    m: int
    generator_images: tuple

    def __post_init__(self):
        imgs = []
        for u in self.generator_images:
            u = np.array(u, dtype=np.complex128)
            if u.shape != (self.m, self.m):
                raise RepresentationError(f"image of shape {u.shape}, expected ({self.m}, {self.m})")
            if np.max(np.abs(u @ np.conj(u.T) - np.eye(self.m))) > UNITARY_TOL:
                raise RepresentationError("generator image is not unitary")
            u.setflags(write=False)
            imgs.append(u)
        object.__setattr__(self, "generator_images", tuple(imgs))

    @classmethod
    def trivial(cls, n_generators, m=1):
        return cls(m, tuple(np.eye(m) for _ in range(n_generators)))


@dataclass(frozen=True)
class GroupElement:
    matrix: np.ndarray
    word: tuple
    rho: np.ndarray

    @property
    def automorphism(self):
        return BallAutomorphism(self.matrix)


@dataclass(frozen=True)
class GroupTruncation:
    """Elements sorted by word length, then lexicographically by letter index."""

    elements: tuple
    radius: int
    spec: GroupSpec
    rep: UnitaryRep

    def __len__(self):
        return len(self.elements)

    @property
    def matrices(self):
        return np.ascontiguousarray(np.array([e.matrix for e in self.elements]))

    @property
    def rhos(self):
        return np.array([e.rho for e in self.elements])

    def word_str(self, element):
        if not element.word:
            return "e"
        letters = self.spec.letters()
        return ".".join(letters[i][0] for i in element.word)

    def upto(self, radius):
        """The sub-truncation of words of length <= radius."""
        els = tuple(e for e in self.elements if len(e.word) <= radius)
        return GroupTruncation(els, min(radius, self.radius), self.spec, self.rep)


def _center(n):
    return [np.exp(2j * math.pi * s / (n + 1)) for s in range(n + 1)]


def _vec(a):
    return np.concatenate([a.real.ravel(), a.imag.ravel()])


def enumerate_group(spec, radius, rep=None, cap=200_000):
    """Breadth-first products of generators and inverses up to ``radius`` letters.

    A product is new unless it matches a stored element up to the centre
    within 1e-9 * max(1, |A|).  Matches found along the way are relation
    checks for ``rep``: both words must have the same image within 1e-6.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    n = spec.n
    if rep is None:
        rep = UnitaryRep.trivial(len(spec.generators))
    if len(rep.generator_images) != len(spec.generators):
        raise RepresentationError("representation needs one image per generator")
    letters = spec.letters()
    letter_rho = [rep.generator_images[i] if not inv else np.conj(rep.generator_images[i].T)
                  for _, _, i, inv in letters]
    centre = _center(n)
    d = n + 1

    ident = GroupElement(np.eye(d, dtype=np.complex128), (), np.eye(rep.m, dtype=np.complex128))
    elements = [ident]
    frontier = [ident]
    stored_vecs = [_vec(c * ident.matrix) for c in centre]
    owner = [0] * len(centre)

    for _level in range(radius):
        tree = cKDTree(np.array(stored_vecs))
        cands = []
        for parent in frontier:
            for li, (_, mat, _, _) in enumerate(letters):
                cands.append(GroupElement(parent.matrix @ mat, parent.word + (li,), parent.rho @ letter_rho[li]))
        if not cands:
            break
        vecs = np.array([_vec(c.matrix) for c in cands])
        radii = DEDUP_TOL * np.maximum(1.0, np.linalg.norm(vecs, axis=1))
        hits = tree.query_ball_point(vecs, radii)
        level_tree = cKDTree(np.array([_vec(c * cd.matrix) for cd in cands for c in centre]))
        level_hits = level_tree.query_ball_point(vecs, radii)
        accepted = []
        kept = np.zeros(len(cands), dtype=bool)
        for ci, cand in enumerate(cands):
            twin = None
            if hits[ci]:
                twin = elements[owner[hits[ci][0]]]
            else:
                earlier = [h // len(centre) for h in level_hits[ci] if h // len(centre) < ci]
                earlier = [e for e in earlier if kept[e]]
                if earlier:
                    twin = cands[min(earlier)]
            if twin is not None:
                if np.max(np.abs(twin.rho - cand.rho)) > RELATION_TOL:
                    raise RepresentationError(
                        f"relation violated: words {twin.word} and {cand.word} give the same "
                        f"group element but different representation values")
                continue
            kept[ci] = True
            accepted.append(cand)
        for el in accepted:
            elements.append(el)
            for c in centre:
                stored_vecs.append(_vec(c * el.matrix))
                owner.append(len(elements) - 1)
        if len(elements) > cap:
            raise TruncationOverflowError(f"truncation exceeded {cap} elements at word length {_level + 1}")
        frontier = accepted
    _recheck_distinct(np.array(stored_vecs), np.array(owner))
    elements.sort(key=lambda e: (len(e.word), e.word))
    return GroupTruncation(tuple(elements), radius, spec, rep)


def _recheck_distinct(vecs, owner):
    """Second pass at the looser tolerance: distinct elements must stay apart mod centre."""
    radii = RECHECK_TOL * np.maximum(1.0, np.linalg.norm(vecs, axis=1))
    for i, hits in enumerate(cKDTree(vecs).query_ball_point(vecs, radii)):
        clash = [h for h in hits if owner[h] != owner[i]]
        if clash:
            raise NumericalError(f"elements {owner[i]} and {owner[clash[0]]} coincide within "
                                 f"{RECHECK_TOL:g} modulo the centre")


# ---------------------------------------------------------------------------
# Series
# ---------------------------------------------------------------------------


def _log_norm(n):
    return math.lgamma(n + 1) - n * math.log(math.pi)


def _point(z, n):
    z = np.ascontiguousarray(np.atleast_1d(np.asarray(z, dtype=np.complex128)))
    if z.size != n:
        raise ValueError(f"expected a point of B^{n}")
    if not np.sum(np.abs(z) ** 2) < 1.0:
        raise DomainError(f"{z} is not inside the ball")
    return z


def _require_series_weight(ctx):
    if ctx.k < 2:
        raise ValueError("Poincare series need weight k >= 2")


def series_term_values(p, z, ctx, trunc):
    """(K(gz, p) J(g, z))^k for every element g of the truncation, in storage order."""
    n = trunc.spec.n
    return series_terms(trunc.matrices, _point(z, n), _point(p, n), float(ctx.k), _log_norm(n))


def theta_scalar(p, z, ctx, trunc):
    _require_series_weight(ctx)
    return complex(np.sum(series_term_values(p, z, ctx, trunc)))


def theta_vector(p, j, z, ctx, trunc, rep=None):
    """c(B^n,k) sum_g rho(g^{-1}) T_p(gz) J(g,z)^k, T_p = K(gz,p)^k e_j.

    ``j`` is a 0-based component index.  Returns (vector, majorant) where the
    majorant c sum |K J|^k bounds every component.
    """
    _require_series_weight(ctx)
    rep = rep or trunc.rep
    if rep is not trunc.rep and rep.m != trunc.rep.m:
        raise RepresentationError("representation does not match the truncation")
    m = trunc.rep.m
    if not 0 <= j < m:
        raise RepresentationError(f"component {j} out of range for m = {m}")
    terms = series_term_values(p, z, ctx, trunc)
    # rho(g^{-1})[l, j] = conj(rho(g)[j, l]) for unitary rho
    coeff = np.conj(trunc.rhos[:, j, :])
    c = c_ball(trunc.spec.n, ctx.k).value
    vec = c * np.sum(coeff * terms[:, None], axis=0)
    majorant = c * float(np.sum(np.abs(terms)))
    return vec, majorant


def automorphy_residual(p, j, z, g, ctx, trunc):
    """|J(g,z)^k Theta(gz) - rho(g) Theta(z)| / |Theta(z)| for a GroupElement g."""
    z = _point(z, trunc.spec.n)
    gz = apply_automorphism(g.automorphism, z)
    th_z, majorant = theta_vector(p, j, z, ctx, trunc)
    th_gz, _ = theta_vector(p, j, gz, ctx, trunc)
    norm = np.linalg.norm(th_z)
    # a sum that cancelled down to rounding is as undefined as an exact zero
    if norm < 1e-300 or norm <= CANCEL_TOL * majorant:
        raise NumericalError(f"series vanishes at z (|Theta| = {norm:.3e}); residual undefined")
    lhs = jacobian(g.automorphism, z) ** ctx.k * th_gz
    return float(np.linalg.norm(lhs - g.rho @ th_z) / norm)


def tail_differences(p, z, ctx, trunc):
    """|partial(R) - partial(R-1)| of the scalar series for R = 1..radius."""
    terms = series_term_values(p, z, ctx, trunc)
    lengths = np.array([len(e.word) for e in trunc.elements])
    return [(r, int(np.sum(lengths <= r)), float(abs(np.sum(terms[lengths == r]))))
            for r in range(1, trunc.radius + 1)]


# ---------------------------------------------------------------------------
# Reproducing check on a finite cyclic group
# ---------------------------------------------------------------------------


def cyclic_order(trunc, max_order=64):
    """Order of a single-rotation group about 0, or None if it is not one."""
    if len(trunc.spec.generators) != 1:
        return None
    a = trunc.spec.generators[0].matrix
    if trunc.spec.n != 1 or abs(a[0, 1]) > 1e-12 or abs(a[1, 0]) > 1e-12:
        return None
    angle = cmath_phase(a[0, 0] / a[1, 1])
    for q in range(1, max_order + 1):
        if abs(((angle * q / (2 * math.pi)) + 0.5) % 1.0 - 0.5) < 1e-9:
            return q
    return None


def cmath_phase(c):
    return math.atan2(c.imag, c.real)


def averaged_monomial(trunc, ctx, degree, slot=0):
    """H(z) = mean over the group of rho(g^{-1}) J(g,z)^k (gz)^degree e_slot.

    This averaging makes H automorphic of weight k for the (finite)
    truncation.  Returns a vectorised function of complex z (shape (M,)) to
    (M, m).
    """
    els = trunc.elements
    m = trunc.rep.m

    def H(z):
        z = np.asarray(z, dtype=np.complex128).reshape(-1)
        out = np.zeros((z.size, m), dtype=np.complex128)
        for e in els:
            a = e.matrix
            den = a[1, 0] * z + a[1, 1]
            gz = (a[0, 0] * z + a[0, 1]) / den
            jk = den ** (-2 * ctx.k)
            out += (jk * gz**degree)[:, None] * np.conj(e.rho[slot, :])[None, :]
        return out / len(els)

    return H


@dataclass
class ReproducingResult:
    pairing: complex
    expected: complex
    deviation: float
    deviation_doubled: float
    nodes: int


def reproducing_check(H, p, j, ctx, trunc, nodes=16):
    """Petersson pairing (H, Theta_p^{(j;k)}) over a sector fundamental domain vs H_j(p).

    Only for a finite cyclic rotation group about 0 (the sector 0 <= arg z
    < 2 pi / order is a fundamental domain) with a truncation that contains
    the whole group.  The sector is done with ``nodes`` GL nodes per polar
    axis and again with twice as many.
    """
    _require_series_weight(ctx)
    order = cyclic_order(trunc)
    if order is None:
        raise DomainError("reproducing check needs a single-rotation finite cyclic group about 0")
    if len(trunc) != order:
        raise DomainError(f"truncation has {len(trunc)} elements, the group has {order}")
    p = _point(p, 1)
    expected = complex(H(p)[0, j])

    def pairing_at(nn):
        r, wr = gl_rule(0.0, 1.0, nn)
        th, wt = gl_rule(0.0, 2 * math.pi / order, nn)
        zs = (r[:, None] * np.exp(1j * th[None, :])).ravel()
        w = (wr[:, None] * r[:, None] * wt[None, :]).ravel()
        hv = H(zs)
        total = 0.0 + 0.0j
        for zi, wi, hi in zip(zs, w, hv):
            th_z, _ = theta_vector(p, j, np.array([zi]), ctx, trunc)
            # K(z,z)^{-k} dV = K(z,z)^{1-k} dV_e
            kzz = 1.0 / (math.pi * (1.0 - abs(zi) ** 2) ** 2)
            total += wi * np.dot(hi, np.conj(th_z)) * kzz ** (1 - ctx.k)
        return total

    coarse = pairing_at(nodes)
    fine = pairing_at(2 * nodes)
    if not np.isfinite(fine):
        raise ConvergenceError("reproducing quadrature produced a non-finite value", value=fine,
                               est_rel_err=float("inf"), nodes=4 * nodes * nodes)
    return ReproducingResult(fine, expected, float(abs(coarse - expected)), float(abs(fine - expected)),
                             2 * nodes)


# ---------------------------------------------------------------------------
# Group configuration files
# ---------------------------------------------------------------------------


def _complex(v):
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1] if len(v) > 1 else 0.0)
    return complex(v)


def _generator(entry):
    kind = entry["kind"]
    par = entry.get("params", {})
    if kind == "rotation":
        return build_rotation(float(par["theta"]))
    if kind == "translation":
        return build_translation(_complex(par["a"]))
    if kind == "elliptic":
        return build_elliptic(_complex(par["fix"]), float(par["theta"]))
    raise ValueError(f"unknown generator kind {kind!r}")


def _image(flat, m):
    """2 m^2 reals, row-major, (re, im) pairs."""
    flat = np.asarray(flat, dtype=float)
    if flat.size != 2 * m * m:
        raise RepresentationError(f"generator image needs {2 * m * m} reals, got {flat.size}")
    return (flat[0::2] + 1j * flat[1::2]).reshape(m, m)


def group_from_config(cfg):
    """(GroupSpec, UnitaryRep) from a mapping, a JSON path or a shipped name."""
    if isinstance(cfg, str):
        if cfg in SHIPPED_GROUPS:
            cfg = SHIPPED_GROUPS[cfg]
        else:
            with open(cfg, encoding="utf-8") as fh:
                cfg = json.load(fh)
    gens = cfg["generators"]
    spec = GroupSpec(tuple(_generator(g) for g in gens),
                     tuple(g.get("name", chr(ord("a") + i)) for i, g in enumerate(gens)))
    rep_cfg = cfg.get("representation")
    if rep_cfg is None:
        rep = UnitaryRep.trivial(len(gens))
    else:
        m = int(rep_cfg["m"])
        rep = UnitaryRep(m, tuple(_image(f, m) for f in rep_cfg["generator_images"]))
    return spec, rep


def _cyclic(order):
    return {"name": f"cyclic{order}",
            "generators": [{"name": "r", "kind": "rotation", "params": {"theta": 2 * math.pi / order}}]}


def _triangle_237():
    # vertices with angles pi/2 (at 0) and pi/3 (at a) of the (2,3,7) triangle;
    # their distance c satisfies cosh c = cos(pi/7) / sin(pi/3)
    c = math.acosh(math.cos(math.pi / 7) / math.sin(math.pi / 3))
    a = math.tanh(0.5 * c)
    return {"name": "triangle237",
            "generators": [
                {"name": "s", "kind": "rotation", "params": {"theta": math.pi}},
                {"name": "t", "kind": "elliptic", "params": {"fix": [a, 0.0], "theta": 2 * math.pi / 3}},
            ]}


def _z2z3_thin(cosh_half_length=1.5):
    # same two elliptic orders, but the fixed points are pushed apart until
    # the product s t is hyperbolic with translation length l:
    # cosh c = cosh(l/2) / sin(pi/3).  The group is then Z2 * Z3, discrete
    # of infinite covolume.
    c = math.acosh(cosh_half_length / math.sin(math.pi / 3))
    a = math.tanh(0.5 * c)
    return {"name": "z2z3_thin",
            "generators": [
                {"name": "s", "kind": "rotation", "params": {"theta": math.pi}},
                {"name": "t", "kind": "elliptic", "params": {"fix": [a, 0.0], "theta": 2 * math.pi / 3}},
            ]}


SHIPPED_GROUPS = {
    "cyclic3": _cyclic(3),
    "cyclic4": _cyclic(4),
    "cyclic6": _cyclic(6),
    "triangle237": _triangle_237(),
    "z2z3_thin": _z2z3_thin(),
}
