import math

import numpy as np
import pytest

from ballpoincare.constants import (c_ball, c_ball_integral_check, c_ball_stirling, log_binomial,
                                    radial_moment, weighted_reproduction)
from ballpoincare.errors import ConvergenceError, DomainError

from oracles import binomial_c


@pytest.mark.parametrize("n, k, expected", [(1, 2, 3), (2, 2, 10), (1, 1, 1), (2, 3, 28), (3, 4, 455)])
def test_c_ball_values(n, k, expected):
    c = c_ball(n, k)
    assert c.exact() == expected
    assert c.value == pytest.approx(expected, rel=1e-13)


def test_c_ball_matches_binomial_table():
    for n in range(1, 5):
        for k in range(1, 12):
            assert c_ball(n, k).value == pytest.approx(binomial_c(n, k), rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_c_ball_grows_with_weight(n):
    logs = [c_ball(n, k).value_log for k in range(1, 400)]
    assert all(b > a for a, b in zip(logs, logs[1:]))


def test_c_ball_large_k_stays_finite():
    c = c_ball(3, 10**6)
    assert math.isfinite(c.value_log)
    assert c.value_log == pytest.approx(log_binomial(4 * (10**6 - 1) + 3, 3), rel=1e-15)


def test_c_ball_rejects_bad_arguments():
    with pytest.raises(ValueError):
        c_ball(0, 2)
    with pytest.raises(ValueError):
        c_ball(1, 0)


def test_radial_moment_beta_integral():
    for m in range(0, 30):
        assert radial_moment(m) == pytest.approx(1.0 / (2 * (m + 1)), rel=1e-13)


@pytest.mark.parametrize("n, k, tol", [(1, 2, 1e-10), (2, 2, 1e-8), (1, 1, 1e-14), (2, 6, 1e-8)])
def test_integral_check_is_one(n, k, tol):
    assert c_ball_integral_check(n, k) == pytest.approx(1.0, abs=tol)


def test_integral_check_reports_unconverged_rule():
    with pytest.raises(ConvergenceError):
        c_ball_integral_check(1, 400, nodes=8)


def test_stirling_ratio_slope():
    ks = np.array([64, 128, 256])
    dev = [abs(c_ball(2, k).value / c_ball_stirling(2, k) - 1) for k in ks]
    slope = np.polyfit(np.log(ks), np.log(dev), 1)[0]
    assert slope == pytest.approx(-1.0, abs=0.05)


def test_stirling_needs_k_two():
    with pytest.raises(ValueError):
        c_ball_stirling(2, 1)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_weighted_reproduction_of_monomials(k):
    z = 0.3 - 0.2j
    for m in range(4):
        got = weighted_reproduction(lambda w: w**m, z, k)
        assert abs(got - z**m) < 1e-10


def test_weighted_reproduction_outside_disc():
    with pytest.raises(DomainError):
        weighted_reproduction(lambda w: w, 1.2)
