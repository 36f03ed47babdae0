"""Machine checks for the contraction analysis: descent inequality slack,
the epsilon/alpha constant chains, certified contraction factors, empirical
rate fitting, primal-dual gaps and SNR.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .operators import UsageError
from .splitting import mt_apply, shadow_tuple, _check_state

SNR_CAP_DB = 300.0


@dataclass(frozen=True)
class RateReport:
    fitted_rate: float
    r_squared: float
    theoretical_beta: Optional[float] = None
    epsilon_prime: Optional[float] = None
    alpha_prime: Optional[float] = None
    eta: Optional[float] = None


def check_descent_inequality(problem, z, zbar):
    """Slack (right side minus left side) of the one-step descent inequality

        ||Tz - Tz_||^2 + g(1-g) sum ||(x_i - x_{i+1}) - (x_i_ - x_{i+1}_)||^2
            + g ||(x_n - x_1) - (x_n_ - x_1_)||^2
        <= ||z - z_||^2 - 2 g sum mu_i ||x_i - x_i_||^2.

    Nonnegative (up to roundoff) whenever the mu_i metadata is honest.
    """
    z = _check_state(z, problem.n)
    zbar = _check_state(zbar, problem.n)
    g = problem.gamma
    zn, xs = mt_apply(problem, z)
    zbn, xbs = mt_apply(problem, zbar)
    dx = xs - xbs
    lhs = float(np.sum((zn - zbn) ** 2))
    lhs += g * (1.0 - g) * float(np.sum((dx[:-1] - dx[1:]) ** 2))
    lhs += g * float(np.sum((dx[-1] - dx[0]) ** 2))
    rhs = float(np.sum((z - zbar) ** 2))
    rhs -= 2.0 * g * sum(op.mu * float(np.sum(dx[i] ** 2)) for i, op in enumerate(problem.ops))
    return rhs - lhs


def epsilon_chain(n, eps2):
    """Forward chain eps_{i+1} = sqrt(2 - 1/eps_i) and the certified minimum.

    For n = 2 the chain is empty and eps' = 1 by convention (the lower bound
    then rests on the first operator alone).
    """
    if n < 2:
        raise UsageError("n must be >= 2")
    if n == 2:
        return np.array([]), 1.0
    if not (1.0 < eps2 < 2.0):
        raise UsageError("eps2 must lie in (1, 2)")
    chain = [eps2]
    for _ in range(n - 3):
        chain.append(np.sqrt(2.0 - 1.0 / chain[-1]))
    chain = np.array(chain)  # eps_2 .. eps_{n-1}
    candidates = [2.0 - chain[0]]
    for i in range(len(chain) - 1):
        candidates.append(2.0 - 1.0 / chain[i] - chain[i + 1])
    candidates.append(1.0 - 1.0 / chain[-1])
    eps_prime = float(min(candidates))
    if eps_prime <= 0:
        raise UsageError("epsilon chain produced a nonpositive minimum")
    return chain, eps_prime


def alpha_chain(n, gamma, mu):
    """Backward chain from alpha_{n-1} = 1 + 2 mu/(1-gamma) and its minimum."""
    if n < 2:
        raise UsageError("n must be >= 2")
    if not (0.0 < gamma < 1.0):
        raise UsageError("gamma must lie in (0, 1)")
    if mu <= 0:
        raise UsageError("mu must be > 0")
    chain = [1.0 + 2.0 * mu / (1.0 - gamma)]  # alpha_{n-1} first
    for _ in range(n - 2):
        chain.append(np.sqrt(2.0 - 1.0 / chain[-1]))
    chain = np.array(chain[::-1])  # alpha_1 .. alpha_{n-1}
    candidates = [1.0 - 1.0 / chain[0]]
    for i in range(1, len(chain)):
        candidates.append(2.0 - 1.0 / chain[i] - chain[i - 1])
    alpha_prime = float(min(candidates))
    if alpha_prime <= 0:
        raise UsageError("alpha chain produced a nonpositive minimum")
    return chain, alpha_prime


_EPS2_GRID = np.arange(1.05, 1.96, 0.05)


def best_epsilon_prime(n):
    """Grid-search eps2 in (1,2) for the largest certified eps'."""
    if n == 2:
        return 1.0
    return max(epsilon_chain(n, e)[1] for e in _EPS2_GRID)


def theoretical_beta(n, gamma, mu, L, case, eps2=None):
    """Certified contraction factor of the lifted operator.

    case 'a': last operator mu-strongly monotone, first n-1 L-Lipschitz.
    case 'b': first n-1 operators mu-strongly monotone and L-Lipschitz.
    Returns a RateReport carrying beta and its certified components.
    """
    if not (0.0 < gamma < 1.0):
        raise UsageError("gamma must lie in (0, 1)")
    if mu <= 0 or L is None or L < 0:
        raise UsageError("need mu > 0 and L >= 0")
    if eps2 is None:
        eps_prime = best_epsilon_prime(n)
    else:
        eps_prime = epsilon_chain(n, eps2)[1]
    eta = 1.0 / (1.0 + L / np.sqrt(eps_prime)) ** 2
    alpha_prime = None
    if case == "a":
        alpha_prime = alpha_chain(n, gamma, mu)[1]
        beta = 1.0 - gamma * (1.0 - gamma) * alpha_prime * eta
    elif case == "b":
        if mu > L:
            raise UsageError("case 'b' needs mu <= L (strong monotonicity bounds the Lipschitz constant from below)")
        beta = 1.0 - 2.0 * gamma * mu * eta
    else:
        raise UsageError("case must be 'a' or 'b'")
    if not (0.0 < beta < 1.0):
        raise UsageError(f"constants gave beta={beta} outside (0,1)")
    return RateReport(
        fitted_rate=float("nan"),
        r_squared=float("nan"),
        theoretical_beta=float(beta),
        epsilon_prime=float(eps_prime),
        alpha_prime=None if alpha_prime is None else float(alpha_prime),
        eta=float(eta),
    )


def fit_rate(distances, skip_fraction=0.1):
    """Least-squares geometric rate of a distance trace.

    Fits log d_k ~ a + k log r over the tail (first skip_fraction of the
    iterations dropped) and returns (rate, r_squared). Requires at least 10
    strictly positive distances after the skip.
    """
    d = np.asarray(distances, dtype=float).ravel()
    k0 = int(np.floor(len(d) * skip_fraction))
    d = d[k0:]
    ks = np.arange(k0, k0 + len(d), dtype=float)
    keep = d > 0
    d, ks = d[keep], ks[keep]
    if len(d) < 10:
        raise UsageError("need at least 10 positive distances to fit a rate")
    logd = np.log(d)
    slope, intercept = np.polyfit(ks, logd, 1)
    pred = slope * ks + intercept
    ss_res = float(np.sum((logd - pred) ** 2))
    ss_tot = float(np.sum((logd - logd.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    return float(np.exp(slope)), r2


def rate_report(distances, beta=None, skip_fraction=0.1, **components):
    rate, r2 = fit_rate(distances, skip_fraction)
    return RateReport(fitted_rate=rate, r_squared=r2, theoretical_beta=beta, **components)


def primal_dual_gap(u, v, ustar, vstar, problem):
    """Saddle-point gap of the assembled primal-dual instance at (u, v),
    anchored at the reference pair (ustar, vstar). Zero at the saddle point.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)

    def f_sum(x):
        total = 0.0
        for spec in problem.f_specs:
            if spec.value is None:
                raise UsageError(f"f spec {spec.tag!r} has no cataloged value")
            total += spec.value(x)
        return total

    def g_conj_sum(y):
        total = 0.0
        for spec in problem.g_specs:
            if spec.conj_value is None:
                raise UsageError(f"g spec {spec.tag!r} has no cataloged conjugate")
            total += spec.conj_value(y)
        return total

    C = problem.C
    left = f_sum(u) + float(C.apply(u) @ vstar) - g_conj_sum(vstar)
    right = f_sum(ustar) + float(C.apply(ustar) @ v) - g_conj_sum(v)
    return left - right


def snr(original, restored):
    """Signal-to-noise ratio 20 log10(||original|| / ||original - restored||),
    capped at SNR_CAP_DB for identical images."""
    original = np.asarray(original, dtype=float)
    restored = np.asarray(restored, dtype=float)
    if original.shape != restored.shape:
        raise UsageError("image dimensions differ")
    sig = np.linalg.norm(original)
    if sig == 0:
        raise UsageError("original image is identically zero")
    err = np.linalg.norm(original - restored)
    if err == 0:
        return SNR_CAP_DB
    return float(min(SNR_CAP_DB, 20.0 * np.log10(sig / err)))
