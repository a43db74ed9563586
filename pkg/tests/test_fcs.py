import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dickefcs import fcs
from dickefcs.fcs import (
    AliasingWarning,
    analytic_cgf_n1,
    analytic_cumulants_n1,
    counting_distribution,
    cross_check_cumulants,
    dominant_eigenvalue,
    eigenvalue_scan,
    first_cumulant_closed_form,
    propagate_populations,
    propagate_transient,
    stationary_cumulants,
)
from dickefcs.liouvillian import build_tilted_generator
from dickefcs.model import ModelParams

import oracles

single = st.builds(
    ModelParams,
    N=st.just(1),
    gamma_S=st.floats(0.05, 10),
    gamma_D=st.floats(0.05, 10),
    n_S=st.floats(0, 50),
    n_D=st.floats(0, 50),
)


@pytest.mark.parametrize("case", sorted(oracles.ME_CUMULANTS))
def test_recursion_matches_frozen_oracle(case):
    got = stationary_cumulants(ModelParams(*case), 4)
    assert got.method == "eigenvalue-recursion"
    np.testing.assert_allclose(got.values, oracles.ME_CUMULANTS[case], rtol=1e-12)


@pytest.mark.parametrize("case", sorted(oracles.EIGENVALUES))
def test_eigenvalue_matches_frozen_oracle(case):
    lam = dominant_eigenvalue(ModelParams(*case[:5]), case[5])
    assert abs(lam - oracles.EIGENVALUES[case]) < 1e-12


@pytest.mark.slow
def test_frozen_oracles_reproduce():
    case = oracles.ME_CASES[3]
    np.testing.assert_allclose(oracles.me_cumulants(*case), oracles.ME_CUMULANTS[case], rtol=1e-15)
    case = oracles.EIG_CASES[0]
    assert oracles.dominant_eigenvalue(*case) == pytest.approx(oracles.EIGENVALUES[case], abs=1e-15)


def test_single_emitter_first_cumulant():
    # sigma_1 = 1/(1 + 2 n_bar), n_bar = 1/2, g = 1/2 -> 1/4
    assert stationary_cumulants(ModelParams(N=1, n_S=1), 1)[1] == pytest.approx(0.25, rel=1e-15)


@pytest.mark.parametrize("N", [1, 4, 33])
def test_zero_bias_zero_current(N):
    p = ModelParams(N=N, gamma_S=0.7, n_S=2.5, n_D=2.5)
    assert abs(stationary_cumulants(p, 2)[1]) < 1e-12 * stationary_cumulants(p, 2)[2]
    assert first_cumulant_closed_form(p) == 0


def test_cumulant_set_indexing():
    cs = stationary_cumulants(ModelParams(N=2, n_S=1), 3)
    assert cs.order == 3 and cs[3] == cs.values[2]
    with pytest.raises(IndexError):
        cs[0]
    with pytest.raises(IndexError):
        cs[4]


@pytest.mark.parametrize("order", [0, 7])
def test_order_range(order):
    with pytest.raises(ValueError):
        stationary_cumulants(ModelParams(N=2), order)


def test_sixth_order_against_oracle():
    case = (4, 1.0, 0.5, 2.0, 0.3)
    expected = oracles.me_cumulants(*case, order=6)
    np.testing.assert_allclose(stationary_cumulants(ModelParams(*case), 6).values, expected,
                               rtol=1e-11)


def test_ground_state_absorbing():
    # n_bar = 0: no current and no noise
    cs = stationary_cumulants(ModelParams(N=6, n_S=0, n_D=0), 4)
    np.testing.assert_array_equal(cs.values, 0)


@pytest.mark.parametrize("N", [1, 5, 40])
def test_low_bias_linear_in_n(N):
    p = ModelParams(N=N, gamma_S=2.0, gamma_D=1.0, n_S=1e-3)
    expected = 2.0 / 3.0 * 1e-3 * N
    assert stationary_cumulants(p, 1)[1] == pytest.approx(expected, rel=1e-2)


def test_closed_form_large_n():
    p = ModelParams(N=5000, n_S=30.0, n_D=1.0)
    cs = stationary_cumulants(p, 1)
    expected = oracles.sigma_current(5000, 1.0, 1.0, 30.0, 1.0)
    assert cs[1] == pytest.approx(expected, rel=1e-10)
    assert first_cumulant_closed_form(p) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("case", [(1, 1.0, 1.0, 1.0, 0.0), (7, 0.2, 1.0, 3.0, 0.5),
                                  (30, 5.0, 1.0, 0.05, 0.0), (80, 1.0, 1.0, 10.0, 5.0)])
def test_finite_differences_agree(case):
    p = ModelParams(*case)
    fd = cross_check_cumulants(p, 4)
    assert fd.method == "finite-difference"
    np.testing.assert_allclose(fd.values, stationary_cumulants(p, 4).values, rtol=1e-6)


def test_finite_difference_validation():
    p = ModelParams(N=2, n_S=1)
    with pytest.raises(ValueError):
        cross_check_cumulants(p, 5)
    with pytest.raises(ValueError):
        cross_check_cumulants(p, 2, step=-1)


def test_finite_difference_zero_bias():
    p = ModelParams(N=3, n_S=0.4, n_D=0.4)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", fcs.AccuracyWarning)
        assert abs(cross_check_cumulants(p, 1)[1]) < 1e-9


def test_finite_difference_n1_against_sympy():
    p = ModelParams(N=1, gamma_S=0.3, gamma_D=2.0, n_S=4.0, n_D=0.25)
    np.testing.assert_allclose(cross_check_cumulants(p, 4).values,
                               analytic_cumulants_n1(p, 4).values, rtol=1e-8)


def test_analytic_n1_values():
    p = ModelParams(N=1, n_S=1)
    cs = analytic_cumulants_n1(p, 4)
    assert cs.method == "analytic-N1"
    np.testing.assert_allclose(cs.values, oracles.ME_CUMULANTS[(1, 1.0, 1.0, 1.0, 0.0)], rtol=1e-14)
    assert analytic_cgf_n1(p, 0.0) == 0
    with pytest.raises(ValueError):
        analytic_cgf_n1(ModelParams(N=2), 0.1)
    with pytest.raises(ValueError):
        analytic_cumulants_n1(ModelParams(N=2), 2)


@settings(max_examples=25, deadline=None)
@given(single)
def test_analytic_n1_against_eigenvalue(p):
    chis = np.linspace(-np.pi, np.pi, 17)
    lam = eigenvalue_scan(p, chis)
    np.testing.assert_allclose(lam, analytic_cgf_n1(p, chis), atol=1e-10)
    t = 2.5
    np.testing.assert_allclose(analytic_cgf_n1(p, chis, t), t * analytic_cgf_n1(p, chis), rtol=1e-14)


@settings(max_examples=25, deadline=None)
@given(single)
def test_analytic_n1_slope_at_zero(p):
    h = 1e-5
    d = (analytic_cgf_n1(p, h) - analytic_cgf_n1(p, -h)) / (2j * h)
    g = p.gamma_S * p.gamma_D / (p.gamma_S + p.gamma_D)
    nb = (p.gamma_S * p.n_S + p.gamma_D * p.n_D) / (p.gamma_S + p.gamma_D)
    expected = g * (p.n_S - p.n_D) / (1 + 2 * nb)
    assert d.real == pytest.approx(expected, rel=1e-6, abs=1e-9)


def test_eigenvalue_at_zero_and_periodicity():
    p = ModelParams(N=6, n_S=2.0)
    assert dominant_eigenvalue(p, 0.0) == 0
    for chi in (0.4, -1.3):
        assert abs(dominant_eigenvalue(p, chi) - dominant_eigenvalue(p, chi + 2 * np.pi)) < 1e-10


def test_eigenvalue_scan_matches_pointwise():
    p = ModelParams(N=5, n_S=1.5, n_D=0.5)
    chis = np.array([0.9, -0.4, 0.0, 2.0])
    scan = eigenvalue_scan(p, chis)
    for chi, lam in zip(chis, scan):
        assert abs(lam - dominant_eigenvalue(p, chi)) < 1e-12


def test_imaginary_axis_perron_root():
    p = ModelParams(N=8, gamma_S=0.5, n_S=3.0, n_D=1.0)
    for u in (0.3, -0.7):
        dense = build_tilted_generator(p, -1j * u).to_dense()
        expected = np.max(np.linalg.eigvals(dense).real)
        assert dominant_eigenvalue(p, -1j * u) == pytest.approx(expected, rel=1e-12)


def test_inverse_iteration_matches_dense(monkeypatch):
    p = ModelParams(N=60, n_S=4.0, n_D=0.5)
    chis = [0.5, 1.7, -2.4]
    dense = [dominant_eigenvalue(p, c) for c in chis]
    monkeypatch.setattr(fcs, "DENSE_DIM_LIMIT", 4)
    banded = [dominant_eigenvalue(p, c) for c in chis]
    np.testing.assert_allclose(banded, dense, rtol=1e-10)


def test_large_n_eigenvalue_runs():
    p = ModelParams(N=400, n_S=2.0)
    lam = dominant_eigenvalue(p, 0.2, max_step=0.1)
    k = stationary_cumulants(p, 2).values
    # second-order Taylor estimate at small chi
    approx = 1j * 0.2 * k[0] - 0.02 * k[1]
    assert abs(lam - approx) < 0.05 * abs(approx)


def test_transient_zero_field():
    res = propagate_transient(ModelParams(N=4, n_S=1), 0.0, 3.0, num=31)
    np.testing.assert_allclose(res.values, 0, atol=1e-12)


@pytest.mark.parametrize("chi", [0.6, 2.0])
def test_transient_slope(chi):
    p = ModelParams(N=3, n_S=1.0, n_D=0.2)
    res = propagate_transient(p, chi, 40.0, num=401, rtol=1e-11, atol=1e-14)
    lam = dominant_eigenvalue(p, chi)
    assert abs(res.slope() - lam) < 1e-6 * abs(lam)


def test_transient_n1_slope_vs_analytic():
    p = ModelParams(N=1, gamma_S=0.5, n_S=2.0, n_D=0.3)
    res = propagate_transient(p, 1.2, 30.0, num=301, rtol=1e-11, atol=1e-14)
    assert abs(res.slope() - analytic_cgf_n1(p, 1.2)) < 1e-6


def test_transient_validation():
    p = ModelParams(N=2)
    with pytest.raises(ValueError):
        propagate_transient(p, 0.1, 0.0)
    with pytest.raises(ValueError):
        propagate_populations(p, [0.1], [1.0, 0.5])
    with pytest.raises(ValueError):
        propagate_transient(p, 0.1, 1.0, initial=np.ones(5))


def test_expm_and_rk_agree():
    p = ModelParams(N=4, n_S=1.0)
    times = [0.0, 0.5, 2.0]
    a = propagate_populations(p, [0.8], times, rtol=1e-11, atol=1e-14)
    b = propagate_populations(p, [0.8], times, method="expm")
    np.testing.assert_allclose(a, b, atol=1e-9)


def test_distribution_short_time():
    n, P = counting_distribution(ModelParams(N=3, n_S=1), 1e-6, 4)
    assert P[n == 0][0] == pytest.approx(1, abs=1e-5)


def test_distribution_mean_is_current():
    p = ModelParams(N=3, n_S=1.0)
    t = 6.0
    n, P = counting_distribution(p, t, 60)
    assert math.fsum(P) == pytest.approx(1, abs=1e-10)
    assert P.min() > -1e-9
    mean = math.fsum(n * P)
    assert mean == pytest.approx(t * stationary_cumulants(p, 1)[1], rel=1e-4)


def test_distribution_negative_counts():
    # drain hotter than source: net absorption from the drain
    n, P = counting_distribution(ModelParams(N=2, n_S=0.1, n_D=2.0), 3.0, 40)
    assert math.fsum(n * P) < 0
    assert P[n < 0].sum() > 0.3


def test_distribution_aliasing_warning():
    with pytest.warns(AliasingWarning):
        counting_distribution(ModelParams(N=5, n_S=3.0), 5.0, 3)


def test_distribution_validation():
    p = ModelParams(N=2)
    with pytest.raises(ValueError):
        counting_distribution(p, 0.0, 5)
    with pytest.raises(ValueError):
        counting_distribution(p, 1.0, 5, n_chi=4)


@pytest.mark.parametrize("case", [(1, 1.0, 12.0, 2.0, 1083.0), (3, 1.0, 1.0, 1e4, 0.0),
                                  (2, 0.3, 1.0, 5e5, 2e5)])
def test_first_cumulant_hot_baths(case):
    # n_bar >> N: the printed ratio of powers cancels, the stable forms must not
    expected = oracles.sigma_current(*case)
    p = ModelParams(*case)
    assert first_cumulant_closed_form(p) == pytest.approx(expected, rel=1e-12)
    assert stationary_cumulants(p, 1)[1] == pytest.approx(expected, rel=1e-12)
