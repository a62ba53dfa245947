import math

import numpy as np
import pytest
from scipy import integrate

from ballpoincare.errors import DegeneratePhaseError
from ballpoincare.laplace import (SHIPPED_PROBLEMS, LaplaceProblem, circle_problem, cr_radial_problem,
                                  disc_problem, gaussian_problem, hessian_fd, laplace_error_order,
                                  laplace_leading, laplace_quadrature, quartic_problem, segment_problem)

LAMS = [50.0, 100.0, 200.0, 400.0, 800.0]


@pytest.mark.parametrize("lam", [1.0, 10.0, 1000.0])
def test_gaussian_leading_term(lam):
    assert laplace_leading(gaussian_problem(), lam) == pytest.approx(math.sqrt(2 * math.pi / lam), rel=1e-14)


def test_boundary_minimum_halves():
    p = gaussian_problem()
    assert laplace_leading(p, 20.0, boundary=True) == pytest.approx(0.5 * laplace_leading(p, 20.0))


def test_degenerate_phase_rejected():
    p = LaplaceProblem(1, lambda t: np.asarray(t)[..., 0] ** 4, lambda t: np.ones(np.shape(t)[:-1]),
                       [0.0], [-1.0], [1.0], hessian=lambda t: [[0.0]])
    with pytest.raises(DegeneratePhaseError):
        laplace_leading(p, 10.0)


def test_hessian_fd_quadratic():
    assert hessian_fd(lambda t: 0.5 * np.asarray(t)[0] ** 2, [0.0])[0, 0] == pytest.approx(1.0, abs=1e-8)


def test_hessian_fd_circle_phase():
    p = circle_problem(0.5)
    assert hessian_fd(p.phase, p.minimum)[0, 0] == pytest.approx(1.0 / 3.0, abs=1e-6)


def test_hessian_fd_cr_radial_phase():
    p = cr_radial_problem(0.4, 0.9)
    assert hessian_fd(p.phase, p.minimum)[0, 0] == pytest.approx(1.0 / 0.84**2, abs=1e-5)
    assert 1.0 / 0.84**2 == pytest.approx(1.4172, abs=1e-4)


def test_hessian_fd_disc_phase_matches_closed_form():
    p = disc_problem(0.2, 0.1, 0.9)
    np.testing.assert_allclose(hessian_fd(p.phase, p.minimum), p.hessian_at_minimum(), atol=1e-6)
    assert np.linalg.det(p.hessian_at_minimum()) == pytest.approx(1.0 / (1 - 0.05) ** 3, rel=1e-12)


def test_quadrature_against_scipy():
    p = segment_problem(0.1, 0.5)
    lam = 300.0
    ref = integrate.quad(lambda t: math.exp(-lam * float(p.phase(np.array([t])))), -0.5, 0.5,
                         points=[0.1], epsabs=0, epsrel=1e-13)[0]
    val, err = laplace_quadrature(p, lam)
    assert val == pytest.approx(ref, rel=1e-10)


def test_pure_gaussian_skips_fit():
    res = laplace_error_order(gaussian_problem(), LAMS)
    assert res.skipped and math.isnan(res.slope)
    np.testing.assert_allclose(res.ratios, 1.0, atol=1e-10)


@pytest.mark.parametrize("factory", [quartic_problem, lambda: segment_problem(0.0, 0.5)])
def test_error_order_slope_minus_one(factory):
    res = laplace_error_order(factory(), LAMS)
    assert res.slope == pytest.approx(-1.0, abs=0.2)
    assert res.constant > 0


def test_error_order_ratios_approach_one():
    dev = np.abs(laplace_error_order(circle_problem(0.5), LAMS).ratios - 1)
    assert np.all(np.diff(dev) < 0)


def test_error_order_needs_four_points():
    with pytest.raises(ValueError):
        laplace_error_order(quartic_problem(), [10.0, 20.0, 40.0])


@pytest.mark.parametrize("name", sorted(SHIPPED_PROBLEMS))
def test_shipped_hessians_positive_definite(name):
    p = SHIPPED_PROBLEMS[name]()
    assert np.linalg.eigvalsh(p.hessian_at_minimum()).min() > 1e-10
    assert np.linalg.eigvalsh(hessian_fd(p.phase, p.minimum)).min() > 1e-10
