"""Random affine operator families meeting the contraction assumptions.

Used by the rate studies and the property suites: affine maps x -> Mx + c
are monotone iff the symmetric part of M is positive semidefinite, and the
skew part contributes Lipschitz continuity without monotonicity.
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from .operators import UsageError, affine_operator
from .splitting import SplitProblem


@dataclass(frozen=True)
class AffineFamily:
    """A split problem together with the raw (M_i, c_i) data behind it."""

    problem: SplitProblem
    mats: List[np.ndarray]
    offs: List[np.ndarray]

    def direct_zero(self):
        """Zero of sum_i (M_i x + c_i) by a dense linear solve; the
        independent oracle for the limit of the lifted iteration."""
        A = sum(self.mats)
        c = sum(self.offs)
        return np.linalg.solve(A, -c)


def _random_skew(rng, d, norm):
    B = rng.standard_normal((d, d))
    W = B - B.T
    s = np.linalg.norm(W, 2)
    return W * (norm / s) if s > 0 else W


def _random_psd(rng, d, norm):
    B = rng.standard_normal((d, d))
    S = B @ B.T
    s = np.linalg.norm(S, 2)
    return S * (norm / s) if s > 0 else S


def affine_family(n, d, mu, L, case, seed, gamma=0.5):
    """An AffineFamily satisfying contraction case 'a' or 'b'.

    case 'a': A_1..A_{n-1} monotone and L-Lipschitz (skew), A_n = mu*Id + psd.
    case 'b': A_1..A_{n-1} = mu*Id + skew with total Lipschitz constant L,
              A_n monotone (skew).
    Offsets c_i are random, so the zero of the sum moves with the seed.
    """
    if n < 2:
        raise UsageError("n must be >= 2")
    rng = np.random.default_rng(seed)
    mats, offs, ops = [], [], []

    def add(M, c, mu_i, lip_i):
        mats.append(M)
        offs.append(c)
        ops.append(affine_operator(M, c=c, mu=mu_i, lip=lip_i))

    if case == "a":
        for _ in range(n - 1):
            W = _random_skew(rng, d, L * rng.uniform(0.5, 1.0))
            add(W, rng.standard_normal(d), 0.0, L)
        Mn = mu * np.eye(d) + _random_psd(rng, d, mu)
        add(Mn, rng.standard_normal(d), mu, None)
    elif case == "b":
        if L <= mu:
            raise UsageError("case 'b' needs L > mu to leave room for a skew part")
        skew_norm = np.sqrt(L**2 - mu**2)
        for _ in range(n - 1):
            W = mu * np.eye(d) + _random_skew(rng, d, skew_norm * rng.uniform(0.5, 1.0))
            add(W, rng.standard_normal(d), mu, L)
        add(_random_skew(rng, d, 1.0), rng.standard_normal(d), 0.0, 1.0)
    else:
        raise UsageError("case must be 'a' or 'b'")
    return AffineFamily(SplitProblem(ops=ops, gamma=gamma), mats, offs)


def monotone_family(n, d, seed, gamma=0.5, mu_choices=(0.0, 0.0, 0.5, 1.0)):
    """An AffineFamily with mixed honest mu_i metadata, for
    descent-inequality sampling."""
    rng = np.random.default_rng(seed)
    mats, offs, ops = [], [], []
    for _ in range(n):
        mu = float(rng.choice(mu_choices))
        M = mu * np.eye(d) + _random_skew(rng, d, rng.uniform(0.0, 2.0))
        M += _random_psd(rng, d, rng.uniform(0.0, 1.0))
        c = rng.standard_normal(d)
        mats.append(M)
        offs.append(c)
        ops.append(affine_operator(M, c=c, mu=mu))
    return AffineFamily(SplitProblem(ops=ops, gamma=gamma), mats, offs)
