import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate
from scipy.stats import binom

from qmetro.classical_est import (PriorSpec, bayes_average_mse, bayes_circular, bayes_mmse,
                                  binomial_p, binomial_phi, circular_cost, circular_f, crb,
                                  fisher_information, half_circle_cost, half_circle_estimator,
                                  locally_unbiased_estimator, ml_estimate, product_model)
from qmetro.errors import DomainError, InfeasibleDataError, SingularModelError


def test_cost_function_shape():
    assert circular_cost(0.4, 0.4) == 0
    assert circular_cost(0.1, 0.5) == circular_cost(0.5, 0.1)
    for d in (0.01, 0.05, 0.099):
        assert abs(circular_cost(d, 0.0) - d * d) < d ** 4


@given(st.integers(1, 40), st.floats(0.01, 0.99))
def test_model_normalization(n, p):
    m = binomial_p(n)
    assert abs(m.prob(p).sum() - 1) < 1e-12
    assert abs(m.dprob(p).sum()) < 1e-10
    mphi = binomial_phi(n)
    phi = 2 * np.arcsin(np.sqrt(p))
    assert abs(mphi.prob(phi).sum() - 1) < 1e-12
    assert abs(mphi.dprob(phi).sum()) < 1e-10


def test_fisher_examples():
    assert abs(fisher_information(binomial_p(1), 0.5) - 4) < 1e-12
    for n, p in [(10, 0.3), (50, 0.81)]:
        assert abs(fisher_information(binomial_p(n), p) - n / (p * (1 - p))) < 1e-9
    for phi in (0.3, 1.0, 2.5, -1.2):
        assert abs(fisher_information(binomial_phi(20), phi) - 20) < 1e-9
    assert abs(crb(binomial_p(100), 0.3) - 0.0021) < 1e-12
    assert abs(crb(binomial_phi(8), 1.1) - 1 / 8) < 1e-12
    assert abs(crb(binomial_phi(8), 1.1, 2) - 1 / 16) < 1e-12


def test_fisher_singular_and_dead_outcomes():
    # at p = 0 only outcome 0 survives; outcome 1 has p = 0 and slope N
    with pytest.raises(SingularModelError):
        fisher_information(binomial_p(3), 0.0)


def test_fisher_additivity():
    m1, m2 = binomial_phi(3), binomial_phi(5)
    f = fisher_information(product_model(m1, m2), 0.7)
    assert abs(f - fisher_information(m1, 0.7) - fisher_information(m2, 0.7)) < 1e-10


def test_ml_binomial_p():
    m = binomial_p(20)
    for n in (0, 3, 10, 20):
        counts = np.zeros(21)
        counts[n] = 1
        est = ml_estimate(m, counts)
        assert len(est) == 1 and abs(est[0] - n / 20) < 1e-10


def test_ml_binomial_phi_two_maxima():
    m = binomial_phi(10)
    counts = np.zeros(11)
    counts[3] = 1
    est = ml_estimate(m, counts)
    expect = 2 * np.arctan(np.sqrt(3 / 7))
    assert len(est) == 2
    assert abs(est[0] + expect) < 1e-10 and abs(est[1] - expect) < 1e-10


def test_ml_errors():
    m = binomial_p(3)
    with pytest.raises(DomainError):
        ml_estimate(m, [0, 0, 0, 0])
    with pytest.raises(DomainError):
        ml_estimate(m, [1, 0])


def test_ml_infeasible():
    from qmetro.classical_est import ProbModel
    m = ProbModel(2, lambda x: np.array([1.0, 0.0]), lambda x: np.zeros(2))
    with pytest.raises(InfeasibleDataError):
        ml_estimate(m, [0, 1])


@pytest.mark.parametrize("n", [1, 5, 50])
def test_ml_saturates_crb(n):
    p = 0.37
    k = np.arange(n + 1)
    w = binom.pmf(k, n, p)
    var = np.sum(w * (k / n) ** 2) - np.sum(w * k / n) ** 2
    assert abs(var - p * (1 - p) / n) < 1e-12


def test_locally_unbiased():
    n, phi0 = 12, 0.9
    m = binomial_phi(n)
    est = locally_unbiased_estimator(m, phi0)
    k = np.arange(n + 1)
    assert np.allclose(est, phi0 - np.tan(phi0 / 2) + 2 * k / (n * np.sin(phi0)), atol=1e-10)
    assert abs(m.prob(phi0) @ est - phi0) < 1e-12
    slope = (m.prob(phi0 + 1e-6) @ est - m.prob(phi0 - 1e-6) @ est) / 2e-6
    assert abs(slope - 1) < 1e-6
    var = m.prob(phi0) @ (est - phi0) ** 2
    assert abs(var - 1 / n) < 1e-10


def test_mmse():
    prior = PriorSpec(0.0, 1.0)
    n = 9
    for k in (0, 4, 9):
        counts = np.zeros(n + 1)
        counts[k] = 1
        mean, var = bayes_mmse(binomial_p(n), prior, counts)
        assert abs(mean - (k + 1) / (n + 2)) < 1e-10
        a, b = k + 1, n - k + 1
        assert abs(var - a * b / ((a + b) ** 2 * (a + b + 1))) < 1e-10
    mean, var = bayes_mmse(binomial_p(0), prior, [1])
    assert abs(mean - 0.5) < 1e-12 and abs(var - 1 / 12) < 1e-12


def test_mmse_is_minimal(rng):
    prior = PriorSpec(0.0, 1.0)
    counts = np.zeros(6)
    counts[2] = 1
    m = binomial_p(5)
    mean, var = bayes_mmse(m, prior, counts)
    for d in rng.normal(scale=0.05, size=10):
        mean2, _ = bayes_mmse(m, prior, counts)
        # posterior quadratic cost of mean + d is var + d^2
        cost = integrate.quad(lambda p: m.prob(p)[2] * (p - mean - d) ** 2, 0, 1)[0]
        z = integrate.quad(lambda p: m.prob(p)[2], 0, 1)[0]
        assert cost / z >= var - 1e-12


@pytest.mark.parametrize("n", [1, 4, 10])
def test_average_mse(n):
    assert abs(bayes_average_mse(binomial_p(n), PriorSpec(0.0, 1.0)) - 1 / (6 * (n + 2))) < 1e-10


def test_full_circle_has_no_sine_moment():
    n = 6
    m = binomial_phi(n)
    res = bayes_circular(m, PriorSpec(-np.pi, np.pi))
    # +-phi give the same data, so only the cosine moment survives
    assert np.all(np.isin(res.estimates, [0.0, np.pi]))
    assert np.all(res.estimates[: n // 2] == 0) and np.all(res.estimates[n // 2 + 1:] == np.pi)
    assert res.degenerate[n // 2] and res.degenerate.sum() == 1
    # the constant estimator 0 also solves the stationarity condition
    for x in range(n + 1):
        r = integrate.quad(lambda t: m.prob(t)[x] * np.sin(0 - t), -np.pi, np.pi)[0]
        assert abs(r) < 1e-10
    const = sum(integrate.quad(lambda t: m.prob(t)[x] * circular_cost(0.0, t) / (2 * np.pi),
                               -np.pi, np.pi)[0] for x in range(n + 1))
    assert abs(const - 2) < 1e-10
    assert res.average_cost <= const


@pytest.mark.parametrize("n", [1, 2, 7, 20])
def test_half_circle_estimator(n):
    m = binomial_phi(n, domain=(0.0, np.pi))
    res = bayes_circular(m, PriorSpec(0.0, np.pi))
    assert np.allclose(res.estimates, half_circle_estimator(n), atol=1e-10)
    # f(N, n) = 0 exactly at n = N/2, where the estimate is pi/2
    assert abs(res.average_cost - half_circle_cost(n)) < 1e-10
    for x in range(n + 1):
        r = integrate.quad(lambda t: m.prob(t)[x] * np.sin(res.estimates[x] - t), 0, np.pi,
                           epsabs=1e-13)[0]
        assert abs(r) < 1e-8


def test_circular_f_values():
    from scipy.special import gamma as g
    n = 6
    for k in range(n + 1):
        ref = (n - 2 * k) * g(k + 0.5) * g(n - k + 0.5) / (g(k + 1) * g(n - k + 1))
        assert abs(circular_f(n, k) - ref) < 1e-12 * max(1, abs(ref))


def test_half_circle_cost_scaling():
    assert abs(100 * half_circle_cost(100) - 1) < 0.1


def test_circular_needs_periodic():
    with pytest.raises(DomainError):
        bayes_circular(binomial_p(3), PriorSpec(0.0, 1.0))
