from fractions import Fraction

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catenoid_ends.balance import (
    Configuration,
    SolverOptions,
    balance_residuals,
    central_difference_jacobian,
    central_difference_jacobian_imag,
    legendre_config,
    logderivative_identity_defects,
    solve_balance,
    sqrt13_config,
)
from catenoid_ends.exceptions import ConfigurationError, IterationError, RankError
from catenoid_ends.polynomials import binom_sq_coeffs, poly_roots, root_set_distance


def exact_F(points, alphas):
    """Balance residuals in exact rational arithmetic (real points only)."""
    p = [Fraction(x) for x in points]
    a = [Fraction(x) for x in alphas]
    return [
        2 * sum(a[j] / (p[k] - p[j]) for j in range(len(p)) if j != k) + a[k] / p[k]
        for k in range(len(p))
    ]


def random_config(rng, m, sep=0.1):
    while True:
        p = rng.normal(size=m) + 1j * rng.normal(size=m)
        d = np.abs(p[:, None] - p[None, :]) + np.eye(m) * 1e9
        if d.min() > sep and np.abs(p).min() > sep:
            break
    a = rng.uniform(0.2, 1.5, size=m) * rng.choice([-1, 1], size=m)
    a[-1] = -a[:-1].sum()
    if abs(a[-1]) < 1e-3:
        a[-1] = 1e-3
        a[0] -= a.sum()
    return Configuration(p, a)


def test_theorem_n1_by_hand():
    assert exact_F([-1, 1], [1, -1]) == [0, 0]
    rep = balance_residuals(Configuration([-1, 1], [1, -1]))
    assert rep.max_abs == 0


def test_sqrt13_example():
    rep = balance_residuals(sqrt13_config())
    assert rep.max_abs <= 1e-13


def test_report_fields():
    c = Configuration([-1, 2], [1, -1])
    rep = balance_residuals(c)
    npt.assert_allclose(rep.residuals, [float(x) for x in exact_F([-1, 2], [1, -1])], rtol=1e-15)
    assert rep.max_abs == np.abs(rep.residuals).max()
    assert rep.jacobian.shape == (2, 2)


@pytest.mark.parametrize(
    "points, alphas, bad",
    [
        ([1, 1, 2], [1, 1, -2], [0, 1]),
        ([0, 1], [1, -1], [0]),
        ([1, 2], [0, 1], [0]),
    ],
)
def test_configuration_errors(points, alphas, bad):
    with pytest.raises(ConfigurationError) as info:
        Configuration(points, alphas)
    assert list(info.value.indices) == bad


def test_configuration_length_mismatch():
    with pytest.raises(ConfigurationError):
        Configuration([1, 2, 3], [1, -1])


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 9), st.integers(0, 2**32 - 1))
def test_residue_theorem_identity(m, seed):
    c = random_config(np.random.default_rng(seed), m, sep=1e-3)
    rep = balance_residuals(c)
    assert abs(rep.residue_theorem_defect) <= 1e-12 * rep.defect_scale


def test_residue_theorem_defect_is_alpha_sum_squared():
    # the defect equals (sum alpha)^2 exactly; checked in rationals
    p, a = [Fraction(-3), Fraction(1, 2), Fraction(5)], [Fraction(1), Fraction(2), Fraction(-1, 3)]
    F = exact_F(p, a)
    assert sum(pk * ak * fk for pk, ak, fk in zip(p, a, F)) == sum(a) ** 2


@pytest.mark.parametrize("seed", range(10))
def test_jacobian_central_difference(seed):
    c = random_config(np.random.default_rng(seed), 5)
    J = balance_residuals(c).jacobian
    for fd in (central_difference_jacobian, central_difference_jacobian_imag):
        Jfd = fd(c.points, c.alphas, step=1e-6)
        assert np.all(np.abs(Jfd - J) <= 1e-5 * np.abs(J))


@pytest.mark.parametrize("lam", [2.0, -0.5, 1 + 1j, 1e3 * np.exp(0.7j)])
def test_scaling_covariance(lam):
    c = random_config(np.random.default_rng(3), 6)
    F = balance_residuals(c).residuals
    F_scaled = balance_residuals(Configuration(lam * c.points, c.alphas)).residuals
    npt.assert_allclose(F_scaled, F / lam, rtol=1e-12, atol=1e-12 * np.abs(F).max() / abs(lam))


def test_legendre_config_small():
    c1 = legendre_config(1)
    npt.assert_allclose(c1.points, [-1, 1])
    npt.assert_array_equal(c1.alphas, [1, -1])
    c2 = legendre_config(2)
    npt.assert_allclose(c2.points, [-2 - np.sqrt(3), -2 + np.sqrt(3), 1], rtol=1e-15)
    npt.assert_array_equal(c2.alphas, [0.5, 0.5, -1])


@pytest.mark.parametrize("n", range(1, 13))
def test_theorem_balance(n):
    rep = balance_residuals(legendre_config(n))
    assert rep.max_abs <= 1e-9


@pytest.mark.parametrize("n", range(2, 13))
def test_proof_logderivative_identity(n):
    assert logderivative_identity_defects(n).max() <= 1e-8


@pytest.mark.parametrize("n", range(1, 13))
def test_proof_stieltjes_relation(n):
    # 2 p (1 - p) sum 1/(p - p_j) + 1 + (2n - 1) p = 0 at each root
    r = poly_roots(binom_sq_coeffs(n)).roots
    d = r[:, None] - r[None, :]
    np.fill_diagonal(d, np.inf)
    s = (1 / d).sum(axis=1)
    lhs = 2 * r * (1 - r) * s + 1 + (2 * n - 1) * r
    scale = 2 * np.abs(r * (1 - r) * s) + 1 + (2 * n - 1) * np.abs(r)
    assert np.all(np.abs(lhs) <= 1e-10 * scale)


def test_solve_from_scaled_f2_roots():
    target = poly_roots(binom_sq_coeffs(2)).roots
    init = Configuration(np.append(1.05 * target, 1.0), [0.5, 0.5, -1])
    sol = solve_balance(init, [2])
    assert root_set_distance(sol.config.points[:2], target) <= 1e-10
    assert sol.config.points[2] == 1.0
    npt.assert_array_equal(sol.config.alphas, init.alphas)


def test_solve_fixed_point():
    c = legendre_config(1)
    sol = solve_balance(c, [1])
    assert sol.iterations <= 1
    npt.assert_allclose(sol.config.points, c.points, atol=1e-12)


def test_solve_reaches_sqrt13_example():
    sym = legendre_config(2)
    init = Configuration(sym.points, [0.25, 0.75, -1])
    sol = solve_balance(init, [2])
    assert root_set_distance(sol.config.points, sqrt13_config().points) <= 1e-8


def test_solve_multiple_fixed_is_least_squares():
    c = legendre_config(3)
    p = c.points.copy()
    p[1] *= 1.03
    sol = solve_balance(c.with_points(p), [0, 3])
    npt.assert_allclose(sol.config.points, c.points, atol=1e-10)


def test_solve_requires_zero_sum():
    with pytest.raises(ConfigurationError):
        solve_balance(Configuration([1, 2], [1, -0.5]), [1])


def test_solve_requires_fixed():
    with pytest.raises(ConfigurationError):
        solve_balance(legendre_config(2), [])


def test_solve_rank_error():
    # dF_0/dp_0 = 2/(p_0 - p_1)^2 - 1/p_0^2 vanishes when p_1 = (1 - sqrt 2) p_0
    c = Configuration([1.0, 1.0 - np.sqrt(2.0)], [1, -1])
    assert abs(balance_residuals(c).jacobian[0, 0]) <= 1e-15
    with pytest.raises(RankError):
        solve_balance(c, [1])


def test_solve_iteration_failure_carries_history():
    init = Configuration([-3.0, -0.1, 1.0], [0.5, 0.5, -1])
    with pytest.raises(IterationError) as info:
        solve_balance(init, [2], SolverOptions(max_iter=1))
    err = info.value
    assert isinstance(err.best, Configuration)
    assert len(err.history) == 2
    assert err.residual == err.history[-1]
