import numpy as np
import pytest

from minlift.diagnostics import (
    SNR_CAP_DB,
    alpha_chain,
    best_epsilon_prime,
    check_descent_inequality,
    epsilon_chain,
    fit_rate,
    snr,
    theoretical_beta,
)
from minlift.operators import UsageError, counterexample_zero_ops
from minlift.splitting import SplitProblem
from minlift.synthetic import monotone_family


def test_descent_zero_ops_exact_slack():
    # three zero operators, z = (1, 0), zbar = 0: the inequality is tight
    prob = SplitProblem(ops=counterexample_zero_ops(), gamma=0.5)
    slack = check_descent_inequality(prob, np.array([[1.0], [0.0]]), np.zeros((2, 1)))
    assert abs(slack) <= 1e-14
    assert check_descent_inequality(prob, np.ones((2, 1)), np.ones((2, 1))) == 0.0


def test_descent_nonnegative_on_random_families():
    rng = np.random.default_rng(11)
    for seed in range(50):
        n = int(rng.integers(2, 6))
        d = int(rng.integers(1, 6))
        fam = monotone_family(n, d, seed=seed, gamma=float(rng.uniform(0.05, 0.95)))
        z = rng.standard_normal((n - 1, d)) * 3
        zbar = rng.standard_normal((n - 1, d)) * 3
        slack = check_descent_inequality(fam.problem, z, zbar)
        scale = 1.0 + float(np.sum((z - zbar) ** 2))
        assert slack >= -1e-10 * scale


def test_epsilon_chain_values():
    chain, ep = epsilon_chain(3, 1.5)
    assert np.allclose(chain, [1.5])
    assert np.isclose(ep, 1.0 / 3.0)  # min(2 - 3/2, 1 - 2/3)
    _, ep2 = epsilon_chain(2, None)
    assert ep2 == 1.0
    with pytest.raises(UsageError):
        epsilon_chain(3, 2.5)
    with pytest.raises(UsageError):
        epsilon_chain(1, 1.5)


def test_epsilon_chain_recursion():
    chain, _ = epsilon_chain(5, 1.2)
    assert np.isclose(chain[1], np.sqrt(2.0 - 1.0 / 1.2))
    assert np.isclose(chain[2], np.sqrt(2.0 - 1.0 / chain[1]))


def test_best_epsilon_prime_monotone_in_n():
    vals = [best_epsilon_prime(n) for n in range(2, 9)]
    assert vals[0] == 1.0
    assert all(v > 0 for v in vals)
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))


def test_alpha_chain_values():
    # n = 3, gamma = 1/2, mu = 1: alpha_2 = 1 + 2*1/(1/2) = 5
    chain, ap = alpha_chain(3, 0.5, 1.0)
    assert np.isclose(chain[-1], 5.0)
    assert np.isclose(chain[0], np.sqrt(1.8))
    expected = min(1.0 - 1.0 / np.sqrt(1.8), 2.0 - 1.0 / 5.0 - np.sqrt(1.8))
    assert np.isclose(ap, expected)
    with pytest.raises(UsageError):
        alpha_chain(3, 0.5, 0.0)


def test_theoretical_beta_case_a():
    rep = theoretical_beta(3, 0.5, 1.0, 2.0, "a", eps2=1.5)
    eta = 1.0 / (1.0 + 2.0 / np.sqrt(1.0 / 3.0)) ** 2
    _, ap = alpha_chain(3, 0.5, 1.0)
    assert np.isclose(rep.eta, eta)
    assert np.isclose(rep.theoretical_beta, 1.0 - 0.25 * ap * eta)
    assert 0.0 < rep.theoretical_beta < 1.0


def test_theoretical_beta_case_b():
    rep = theoretical_beta(3, 0.5, 1.0, 2.0, "b", eps2=1.5)
    eta = 1.0 / (1.0 + 2.0 / np.sqrt(1.0 / 3.0)) ** 2
    assert np.isclose(rep.theoretical_beta, 1.0 - 2.0 * 0.5 * 1.0 * eta)
    # strong monotonicity bounds the Lipschitz constant from below
    with pytest.raises(UsageError):
        theoretical_beta(3, 0.5, 3.0, 2.0, "b")
    with pytest.raises(UsageError):
        theoretical_beta(3, 0.5, 1.0, 2.0, "c")


def test_fit_rate_exact_geometric():
    d = 3.0 * 0.8 ** np.arange(60)
    rate, r2 = fit_rate(d)
    assert np.isclose(rate, 0.8, atol=1e-12)
    assert r2 >= 1.0 - 1e-12


def test_fit_rate_skips_transient():
    d = np.concatenate([np.full(6, 10.0), 0.5 ** np.arange(54)])
    rate, r2 = fit_rate(d, skip_fraction=0.1)
    assert np.isclose(rate, 0.5, atol=1e-6)
    assert r2 > 0.999


def test_fit_rate_needs_enough_points():
    with pytest.raises(UsageError):
        fit_rate(0.5 ** np.arange(5))
    with pytest.raises(UsageError):
        fit_rate(np.zeros(100))


def test_snr_values():
    orig = np.ones((4, 4))
    assert snr(orig, orig) == SNR_CAP_DB
    # error norm 10x smaller than signal norm -> 20 dB
    restored = orig + 0.1 * np.ones((4, 4)) / np.sqrt(16) * np.sqrt(16) / 4
    err = np.linalg.norm(orig - restored)
    expected = 20.0 * np.log10(np.linalg.norm(orig) / err)
    assert np.isclose(snr(orig, restored), expected)
    with pytest.raises(UsageError):
        snr(np.zeros((2, 2)), np.ones((2, 2)))
    with pytest.raises(UsageError):
        snr(np.ones((2, 2)), np.ones((3, 3)))
