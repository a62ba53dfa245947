import json
import math

import numpy as np
import pytest
from scipy import integrate

from ballpoincare.errors import ConvergenceError, DomainError, PreconditionError
from ballpoincare.geometry import KernelContext, hyperbolic_distance
from ballpoincare.quadrature import QuadratureConfig
from ballpoincare.submanifolds import (AsymptoticLaw, ParamSubmanifold, cr_ball, decay_geometry,
                                       example_circle, example_cr_ball, example_disc, example_segment,
                                       example_segment_disc, fit_power, i1_cr_ball, i1_pairing,
                                       inner_integral, locate_peaks, min_distance, ratio_to_law,
                                       real_segment, segment, separated_decay, square_cartesian,
                                       submanifold_from_config, tangent_hessian_check)

import oracles

# scipy nested adaptive quad of the segment example, n=1, alpha=0.5, k=64
SEGMENT_K64 = 24.5724871672462


def test_segment_law_constant():
    _, _, law = example_segment(1, 0.5)
    assert law.constant == pytest.approx(3.2495, abs=1e-3)
    assert law.exponent == 0.5


def test_disc_law_constant():
    _, _, law = example_disc(2, 0.6)
    assert law.constant == pytest.approx(4 * math.pi**2 / 5 * 1.5 * (1 - 0.64**2.5), rel=1e-14)
    assert law.exponent == 1.0


def test_circle_constant_vanishes_at_edge():
    assert example_circle(2, 0.999999)[2].constant < 1e-2 * example_circle(2, 0.5)[2].constant


def test_example_domain_checks():
    with pytest.raises(DomainError):
        example_circle(1, 0.5)
    with pytest.raises(DomainError):
        segment(1, 1.0)
    with pytest.raises(DomainError):
        example_segment_disc(2, 0.3, 0.6)


def test_segment_k64_matches_frozen_quadrature():
    X, Y, _ = example_segment(1, 0.5)
    res = i1_pairing(X, Y, KernelContext(1, 64), QuadratureConfig(rel_tol=1e-10))
    assert res.value == pytest.approx(SEGMENT_K64, rel=1e-9)
    assert not res.is_complex and isinstance(res.value, float)


def test_segment_k64_matches_monte_carlo():
    X, Y, _ = example_segment(1, 0.5)
    val = i1_pairing(X, Y, KernelContext(1, 64)).value
    mc, se = oracles.mc_segment_pairing(0.5, 64)
    assert abs(val - mc) <= 3 * se


def test_rotated_segment_is_invariant():
    X, Y, _ = example_segment(2, 0.5)
    Xr, Yr, _ = example_segment(2, 0.5, phi=0.9)
    ctx = KernelContext(2, 16)
    assert i1_pairing(Xr, Yr, ctx).value == pytest.approx(i1_pairing(X, Y, ctx).value, rel=1e-8)


def test_inner_integral_matches_scipy():
    X = segment(1, 0.5)
    z = np.array([[0.17 + 0.0j]])
    big_n = 200
    ref = integrate.quad(lambda t: math.exp(0.5 * big_n * (math.log1p(-t * t) + math.log1p(-0.17**2))
                                            - big_n * math.log1p(-0.17 * t)),
                         -0.5, 0.5, points=[0.17], epsabs=0, epsrel=1e-13)[0]
    assert inner_integral(X, z, big_n)[0].real == pytest.approx(ref, rel=1e-10)


def test_peak_location_on_disc():
    X = square_cartesian(2, 0.4)
    z = np.array([[0.1, -0.2]], dtype=complex)
    t, _, _ = locate_peaks(X, z)
    np.testing.assert_allclose(t[0], [0.1, -0.2], atol=1e-8)


def test_pairing_symmetric_in_arguments():
    X, Y = real_segment(1, -0.5, 0.1), real_segment(1, -0.1, 0.4)
    ctx = KernelContext(1, 24)
    assert i1_pairing(X, Y, ctx).value == pytest.approx(i1_pairing(Y, X, ctx).value, rel=1e-8)


@pytest.mark.parametrize("factory, n, k", [
    (lambda: example_segment(1, 0.5), 1, 8),
    (lambda: example_circle(2, 0.5), 2, 8),
    (lambda: example_disc(2, 0.6), 2, 4),
    (lambda: example_segment_disc(2, 0.6, 0.3), 2, 4),
])
def test_pairing_positive_and_self_consistent(factory, n, k):
    X, Y, _ = factory()
    coarse = i1_pairing(X, Y, KernelContext(n, k), QuadratureConfig(rel_tol=1e-6))
    fine = i1_pairing(X, Y, KernelContext(n, k), QuadratureConfig(rel_tol=1e-9))
    assert coarse.value > 0
    assert abs(coarse.value - fine.value) / fine.value <= coarse.est_rel_err


def test_disc_polar_matches_monte_carlo():
    # 4-D plain MC on the disc of radius 0.6, k = 2
    X, Y, _ = example_disc(2, 0.6)
    val = i1_pairing(X, Y, KernelContext(2, 2)).value
    rng = np.random.default_rng(7)
    m = 2_000_000
    p = rng.uniform(-0.6, 0.6, (m, 4))
    inside = (p[:, 0] ** 2 + p[:, 1] ** 2 < 0.36) & (p[:, 2] ** 2 + p[:, 3] ** 2 < 0.36)
    rz = p[:, 0] ** 2 + p[:, 1] ** 2
    rw = p[:, 2] ** 2 + p[:, 3] ** 2
    f = np.where(inside, ((1 - rz) * (1 - rw)) ** 3 / (1 - p[:, 0] * p[:, 2] - p[:, 1] * p[:, 3]) ** 6, 0.0)
    scale = 10 * 1.2**4
    assert abs(val - scale * f.mean()) <= 3 * scale * f.std() / math.sqrt(m)


def test_cr_ball_matches_spherical_monte_carlo_small_k():
    val = i1_cr_ball(0.5, KernelContext(2, 4)).value
    mc, se = oracles.mc_cr_ball_pairing(0.5, 4, samples=3_000_000)
    assert abs(val - mc) <= 3 * se


def test_cr_ball_chart_volume():
    X = cr_ball(2, 0.5)
    from ballpoincare.quadrature import tensor_rule
    pts, w = tensor_rule(X.box_lo, X.box_hi, 12)
    assert np.sum(w * X.weights(pts)) == pytest.approx(2 * math.pi / 3 * 0.125, rel=1e-12)


def test_cr_ball_law_is_an_upper_bound():
    law = example_cr_ball(2, 0.5)[2]
    assert law.kind == "upper_bound" and math.isnan(law.constant) and law.exponent == 0.0


def test_cr_ball_convergence_error_is_reported():
    with pytest.raises(ConvergenceError):
        i1_cr_ball(0.5, KernelContext(2, 64), QuadratureConfig(rel_tol=1e-15), order=2)


def test_ratio_to_law_self_consistent():
    X, Y, _ = example_segment(1, 0.5)
    ctx = KernelContext(1, 32)
    value = i1_pairing(X, Y, ctx).value
    rows = ratio_to_law(X, Y, AsymptoticLaw(value, 0.0, "trivial"), [32], 1)
    assert rows[0].ratio == pytest.approx(1.0, abs=1e-12)


def test_ratio_to_law_needs_constant():
    X, Y, law = example_segment_disc(2, 0.6, 0.3)
    with pytest.raises(PreconditionError):
        ratio_to_law(X, Y, law, [8], 2)


def test_segment_ratio_improves_with_k():
    X, Y, law = example_segment(1, 0.5)
    rows = ratio_to_law(X, Y, law, [64, 128, 256], 1)
    dev = [abs(r.ratio - 1) for r in rows]
    assert dev[0] > dev[1] > dev[2]


def test_fit_power_recovers_exponent():
    ks = np.array([10, 20, 40])
    slope, c = fit_power(ks, 3.0 * ks**1.5)
    assert slope == pytest.approx(1.5) and c == pytest.approx(3.0)


def test_min_distance_of_segments():
    X, Y = decay_geometry("near")
    assert min_distance(X, Y) == pytest.approx(hyperbolic_distance([-0.2], [0.2]), rel=1e-12)


def test_separated_decay_overlap_rejected():
    X = real_segment(1, -0.3, 0.3)
    with pytest.raises(PreconditionError):
        separated_decay(X, X, 1, [8, 16, 24])


def test_separated_decay_bound_and_monotonicity():
    near = separated_decay(*decay_geometry("near"), 1, [16, 32, 48, 64])
    far = separated_decay(*decay_geometry("far"), 1, [16, 32, 48, 64])
    assert near.passed and far.passed
    assert far.d_eff >= 2 * near.d_eff
    assert abs(far.slope) / 2 >= 2 * abs(near.slope) / 2 * 0.95


def test_tangent_hessian_segment():
    X = segment(2, 0.5, phi=0.4)
    for t0 in (-0.3, 0.0, 0.2):
        assert tangent_hessian_check(X, [t0]) == pytest.approx(2.0, abs=1e-8)


def test_tangent_hessian_disc():
    X = square_cartesian(2, 0.4)
    assert tangent_hessian_check(X, [0.1, -0.2]) == pytest.approx(2.0, abs=1e-8)


def test_tangent_hessian_degenerate_chart():
    flat = ParamSubmanifold(1, 1, lambda t: np.full((t.shape[0], 1), 0.2 + 0j), lambda t: np.ones(t.shape[0]),
                            (0.0,), (1.0,))
    assert tangent_hessian_check(flat, [0.5]) <= 1e-12


def test_config_from_mapping_and_file(tmp_path):
    X, Y, law = submanifold_from_config({"type": "segment_disc", "n": 2, "alpha": 0.6, "beta": 0.3})
    assert X.q == 2 and Y.q == 1 and law.kind == "exponent_only"
    path = tmp_path / "pair.json"
    path.write_text(json.dumps({
        "X": {"type": "custom_chart", "n": 1, "chart": "real_segment", "params": {"a": -0.6, "b": -0.2}},
        "Y": {"type": "real_segment", "n": 1, "a": 0.2, "b": 0.6},
    }))
    X, Y, law = submanifold_from_config(str(path))
    assert law is None
    assert min_distance(X, Y) == pytest.approx(hyperbolic_distance([-0.2], [0.2]), rel=1e-12)


def test_config_unknown_chart():
    with pytest.raises(ValueError):
        submanifold_from_config({"type": "custom_chart", "n": 1, "chart": "helix"})


def test_circle_ratio_improves_with_k():
    X, Y, law = example_circle(2, 0.5)
    dev = [abs(r.ratio - 1) for r in ratio_to_law(X, Y, law, [48, 96, 192], 2)]
    assert dev[0] > dev[1] > dev[2]


@pytest.mark.slow
def test_disc_ratio_improves_with_k():
    X, Y, law = example_disc(2, 0.6)
    dev = [abs(r.ratio - 1) for r in ratio_to_law(X, Y, law, [16, 32, 64], 2)]
    assert dev[0] > dev[1] > dev[2]
