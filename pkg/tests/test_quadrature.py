import math

import numpy as np
import pytest

from ballpoincare.errors import ConvergenceError
from ballpoincare.quadrature import (QuadratureConfig, adaptive_integrate, composite_rule, edge_breaks,
                                     gl_rule, graded_breaks, integrate_tensor, tensor_rule)


def test_gl_rule_exact_for_polynomials():
    x, w = gl_rule(0.0, 2.0, 5)
    assert np.sum(w * x**9) == pytest.approx(2.0**10 / 10, rel=1e-14)


def test_tensor_rule_volume():
    pts, wts = tensor_rule([0, -1], [1, 2], 4)
    assert pts.shape == (16, 2)
    assert wts.sum() == pytest.approx(3.0, rel=1e-15)


def test_graded_breaks_cover_interval_and_keep_shape():
    br = graded_breaks(np.array([0.1, 0.95]), np.array([0.01, 0.2]), 0.0, 1.0)
    assert br.shape[0] == 2
    assert np.all(np.diff(br, axis=-1) >= 0)
    assert np.all(br[:, 0] == 0.0) and np.all(br[:, -1] == 1.0)


def test_composite_rule_on_graded_panels():
    br = graded_breaks(0.3, 0.01, -1.0, 1.0)
    x, w = composite_rule(br, 8)
    assert np.sum(w * np.exp(-((x - 0.3) / 0.01) ** 2)) == pytest.approx(0.01 * math.sqrt(math.pi), rel=1e-12)


def test_edge_breaks_sorted():
    br = edge_breaks(0.0, 1.0, 1e-3)
    assert br[0] == 0.0 and br[-1] == 1.0
    assert np.all(np.diff(br) >= 0)


def test_tensor_integration():
    val, err = integrate_tensor(lambda p: np.cos(p[:, 0]) * np.exp(p[:, 1]), [0, 0], [1, 1])
    assert val == pytest.approx(math.sin(1.0) * (math.e - 1), rel=1e-13)
    assert err < 1e-12


def test_tensor_integration_flags_failure():
    with pytest.raises(ConvergenceError) as info:
        integrate_tensor(lambda p: np.exp(-1e4 * (p[:, 0] - 0.33) ** 2), [0], [1],
                         QuadratureConfig(nodes_per_axis=8, scheme="tensor"))
    assert info.value.est_rel_err > 0


def test_adaptive_peaked_gaussian():
    s = 0.005
    res = adaptive_integrate(lambda p: np.exp(-0.5 * ((p[:, 0] - 0.21) ** 2 + (p[:, 1] + 0.4) ** 2) / s**2),
                             [-1, -1], [1, 1], QuadratureConfig(rel_tol=1e-9))
    assert res.value == pytest.approx(2 * math.pi * s * s, rel=1e-8)
    assert res.est_rel_err < 1e-8


def test_adaptive_is_deterministic():
    f = lambda p: 1.0 / (1.0 + 50 * np.sum(p**2, axis=1))  # noqa: E731
    a = adaptive_integrate(f, [-1, -1], [1, 1])
    b = adaptive_integrate(f, [-1, -1], [1, 1])
    assert a.value == b.value and a.n_boxes == b.n_boxes


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(nodes_per_axis=4)
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureConfig(scheme="monte-carlo")
