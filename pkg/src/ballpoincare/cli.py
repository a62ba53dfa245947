"""Command-line driver: every subcommand writes one CSV table.

Exit status is 0 on success, 1 when a numerical routine fails and 2 on a
usage error.
"""
import argparse
import io
import math
import shlex
import sys

import numpy as np

from . import __version__
from .constants import c_ball, c_ball_integral_check, c_ball_stirling
from .errors import NumericalError
from .geometry import KernelContext, ball_point, bergman_kernel, hyperbolic_distance, pairing
from .laplace import SHIPPED_PROBLEMS, laplace_error_order
from .poincare import (automorphy_residual, averaged_monomial, enumerate_group, group_from_config,
                       reproducing_check, tail_differences)
from .quadrature import QuadratureConfig
from .submanifolds import (EXAMPLES, decay_geometry, fit_power, i1_cr_ball, i1_pairing,
                           separated_decay, submanifold_from_config)


class CsvWriter:
    def __init__(self, stream, argv, seed):
        self.stream = stream
        self._line(f"# ballpoincare {__version__}")
        self._line("# argv: " + " ".join(shlex.quote(a) for a in argv))
        self._line(f"# seed: {seed}")

    def _line(self, text):
        self.stream.write(text + "\n")

    @staticmethod
    def _fmt(v):
        if isinstance(v, (bool, np.bool_)):
            return "1" if v else "0"
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        if isinstance(v, (float, np.floating)):
            return "%.12e" % v
        return str(v)

    def header(self, *cols):
        self._line(",".join(cols))

    def row(self, *vals):
        self._line(",".join(self._fmt(v) for v in vals))

    def note(self, text):
        self._line("# " + text)


def _int_list(text):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _point(text):
    """Comma-separated complex coordinates, e.g. '0.1+0.2j,0.3'."""
    try:
        return np.array([complex(v.replace(" ", "")) for v in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad point {text!r}")


def cmd_kernel(args, out):
    z = ball_point(args.z)
    w = ball_point(args.w if args.w is not None else args.z)
    ctx = KernelContext(z.size, 1)
    k = complex(bergman_kernel(z, w, ctx))
    pz = complex(pairing(z, w))
    out.header("n", "pairing_re", "pairing_im", "kernel_re", "kernel_im", "distance")
    out.row(z.size, pz.real, pz.imag, k.real, k.imag, hyperbolic_distance(z, w))


def cmd_constant(args, out):
    out.header("k", "c", "stirling", "ratio", "integral_check")
    for k in range(1, args.kmax + 1):
        c = c_ball(args.n, k)
        if k >= 2:
            st = c_ball_stirling(args.n, k)
            ratio = c.value / st
        else:
            st = ratio = float("nan")
        out.row(k, c.value, st, ratio, c_ball_integral_check(args.n, k))


def cmd_laplace(args, out):
    problem = SHIPPED_PROBLEMS[args.case]()
    res = laplace_error_order(problem, args.lams)
    out.header("lam", "quadrature", "leading", "ratio")
    for lam, q, l, r in zip(res.lams, res.quadrature, res.leading, res.ratios):
        out.row(float(lam), float(q), float(l), float(r))
    out.note(f"slope={res.slope:.12e} constant={res.constant:.12e} skipped={int(res.skipped)}")


def cmd_pairing(args, out):
    quad = QuadratureConfig(rel_tol=args.rel_tol)
    if args.config:
        X, Y, law = submanifold_from_config(args.config)
        n, kind = X.n, "config"
    else:
        kwargs = {"n": args.n, "alpha": args.alpha}
        if args.example == "segment_disc":
            if args.beta is None:
                raise argparse.ArgumentTypeError("--beta is required for segment_disc")
            kwargs["beta"] = args.beta
        X, Y, law = EXAMPLES[args.example](**kwargs)
        n, kind = args.n, args.example
    out.header("k", "I1", "est_rel_err", "quad_nodes", "prediction", "ratio")
    values = []
    for k in args.k_list:
        ctx = KernelContext(n, k)
        res = i1_cr_ball(args.alpha, ctx, quad) if kind == "cr_ball" else i1_pairing(X, Y, ctx, quad)
        value = float(np.real(res.value))
        values.append(value)
        if law is not None and law.kind == "asymptotic":
            pred = law.predict(k)
        else:
            pred = float("nan")
        out.row(k, value, float(res.est_rel_err), res.quad_nodes, pred, value / pred if pred == pred else pred)
    if law is not None:
        out.note(f"law: {law.description} (kind={law.kind}, exponent={law.exponent:.12e})")
    if len(values) >= 2:
        slope, _ = fit_power(args.k_list, values)
        out.note(f"fitted_slope={slope:.12e}")


def cmd_decay(args, out):
    X, Y = decay_geometry(args.geometry)
    res = separated_decay(X, Y, X.n, args.k_list, QuadratureConfig(rel_tol=args.rel_tol))
    out.header("k", "log_I1")
    for k, lv in zip(res.ks, res.log_values):
        out.row(int(k), float(lv))
    out.note(f"d_eff={res.d_eff:.12e} slope={res.slope:.12e} bound={res.bound:.12e} passed={int(res.passed)}")


def cmd_poincare(args, out):
    spec, rep = group_from_config(args.group_config)
    trunc = enumerate_group(spec, args.radius, rep, cap=args.cap)
    ctx = KernelContext(spec.n, args.k)
    p = args.p
    if args.mode == "tail":
        out.header("radius", "elements", "shell_sum_abs")
        z = args.z if args.z is not None else np.zeros(spec.n, dtype=complex)
        for r, count, diff in tail_differences(p, z, ctx, trunc):
            out.row(r, count, diff)
    elif args.mode == "residual":
        rng = np.random.default_rng(args.seed)
        out.header("sample", "z_re", "z_im", "element", "residual")
        gens = [e for e in trunc.elements if len(e.word) == 1]
        for i in range(args.samples):
            z = np.array([args.sample_radius * math.sqrt(rng.random()) * np.exp(2j * math.pi * rng.random())])
            for g in gens:
                out.row(i, float(z[0].real), float(z[0].imag), trunc.word_str(g),
                        automorphy_residual(p, args.component, z, g, ctx, trunc))
    else:
        H = averaged_monomial(trunc, ctx, args.degree, args.component)
        res = reproducing_check(H, p, args.component, ctx, trunc, args.nodes)
        out.header("nodes", "pairing_re", "pairing_im", "expected_re", "expected_im", "deviation")
        out.row(res.nodes // 2, float("nan"), float("nan"), res.expected.real, res.expected.imag, res.deviation)
        out.row(res.nodes, res.pairing.real, res.pairing.imag, res.expected.real, res.expected.imag,
                res.deviation_doubled)


def build_parser():
    ap = argparse.ArgumentParser(prog="ballpoincare", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--seed", type=int, default=0, help="seed for sampled points (recorded in the output)")
    ap.add_argument("--output", "-o", default="-", help="CSV path, '-' for stdout")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", help="pairing, Bergman kernel and distance at two points")
    p.add_argument("--z", type=_point, required=True)
    p.add_argument("--w", type=_point)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("constant", help="c(B^n,k), its Stirling form and the integral check")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kmax", type=int, required=True)
    p.set_defaults(func=cmd_constant)

    p = sub.add_parser("laplace-check", help="quadrature vs leading Laplace term")
    p.add_argument("--case", choices=sorted(SHIPPED_PROBLEMS), required=True)
    p.add_argument("--lams", type=_float_list, default=[50.0, 100.0, 200.0, 400.0, 800.0])
    p.set_defaults(func=cmd_laplace)

    p = sub.add_parser("pairing", help="I1 table for an example geometry")
    p.add_argument("--example", choices=sorted(EXAMPLES), default="segment")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--beta", type=float)
    p.add_argument("--k-list", type=_int_list, required=True)
    p.add_argument("--config", help="JSON submanifold config (overrides --example)")
    p.add_argument("--rel-tol", type=float, default=1e-7)
    p.set_defaults(func=cmd_pairing)

    p = sub.add_parser("decay", help="exponential decay for separated segments")
    p.add_argument("--geometry", choices=["near", "far"], default="near")
    p.add_argument("--k-list", type=_int_list, default=[16, 32, 48, 64])
    p.add_argument("--rel-tol", type=float, default=1e-7)
    p.set_defaults(func=cmd_decay)

    p = sub.add_parser("poincare", help="truncated Poincare series diagnostics")
    p.add_argument("--group-config", required=True, help="shipped group name or JSON path")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--radius", type=int, default=6)
    p.add_argument("--mode", choices=["residual", "reproducing", "tail"], default="residual")
    p.add_argument("--p", type=complex, default=0.1 + 0.05j)
    p.add_argument("--z", type=_point)
    p.add_argument("--component", type=int, default=0, help="0-based component index j")
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--sample-radius", type=float, default=0.3)
    p.add_argument("--degree", type=int, default=2, help="monomial degree for the reproducing check")
    p.add_argument("--nodes", type=int, default=8)
    p.add_argument("--cap", type=int, default=200_000)
    p.set_defaults(func=cmd_poincare)
    return ap


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    buf = io.StringIO()
    try:
        args.func(args, CsvWriter(buf, argv, args.seed))
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))
    except NumericalError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, KeyError, TypeError, ValueError) as exc:
        # unreadable or malformed config; numerical ValueErrors were caught above
        parser.error(f"bad configuration: {type(exc).__name__}: {exc}")
    if args.output == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(buf.getvalue())
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
