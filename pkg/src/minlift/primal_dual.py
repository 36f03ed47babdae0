"""Primal-dual specialization of the minimal-lifting iteration.

The saddle-point problem couples a primal space H1 and a dual space H2
through a linear map C. The state is a pair of (n-1)-tuples (p, q); the
equivalent lifted encoding concatenates each (p_i, q_i) into one block, so
the generic splitting machinery applies verbatim.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .operators import (
    LinearMap,
    OperatorDesc,
    ProxSpec,
    UsageError,
    resolvent_skew,
)
from .splitting import SplitProblem


@dataclass(frozen=True)
class PDProblem:
    """Assembled primal-dual instance.

    f_specs holds the prox/value specs of f_2..f_n on H1 (the last one
    sigma-strongly convex), g_specs those of g_2..g_n on H2 (the last one
    with beta_g-Lipschitz gradient). alpha bounds the gradient Lipschitz
    constants of f_2..f_{n-1} and tau the strong convexity of g_2..g_{n-1}.
    """

    C: LinearMap
    f_specs: List[ProxSpec]
    g_specs: List[ProxSpec]
    alpha: float
    sigma: float
    tau: float
    beta_g: float

    def __post_init__(self):
        if len(self.f_specs) != len(self.g_specs) or len(self.f_specs) < 1:
            raise UsageError("need matching nonempty f and g spec lists")
        if self.sigma <= 0 or self.beta_g <= 0:
            raise UsageError("sigma and beta_g must be > 0")
        if self.n > 2 and (self.alpha < 0 or self.tau <= 0):
            raise UsageError("middle operators need alpha >= 0 and tau > 0")

    @property
    def n(self):
        return len(self.f_specs) + 1

    @property
    def d1(self):
        return self.C.in_dim

    @property
    def d2(self):
        return self.C.out_dim

    def norm_C(self):
        if self.C.norm_bound is not None:
            return self.C.norm_bound
        return self.C.operator_norm()

    def strong_modulus(self):
        return min(self.sigma, 1.0 / self.beta_g)

    def middle_lipschitz(self):
        return max(self.alpha, 1.0 / self.tau)


@dataclass(frozen=True)
class PDState:
    p: np.ndarray  # (n-1, d1)
    q: np.ndarray  # (n-1, d2)

    @staticmethod
    def zeros(problem):
        k = problem.n - 1
        return PDState(np.zeros((k, problem.d1)), np.zeros((k, problem.d2)))

    def encode(self):
        """Concatenate (p_i, q_i) pairs into the (n-1, d1+d2) lifted state."""
        return np.concatenate([self.p, self.q], axis=1)

    @staticmethod
    def decode(z, d1):
        z = np.atleast_2d(np.asarray(z, dtype=float))
        return PDState(z[:, :d1].copy(), z[:, d1:].copy())


def _inner_uv(problem, state):
    n = problem.n
    p, q = state.p, state.q
    us = [None] * n
    vs = [None] * n
    us[0], vs[0] = resolvent_skew(p[0], q[0], problem.C)
    for i in range(1, n - 1):
        fu = problem.f_specs[i - 1].prox(p[i] + us[i - 1] - p[i - 1])
        gv_in = q[i] + vs[i - 1] - q[i - 1]
        us[i] = fu
        vs[i] = gv_in - problem.g_specs[i - 1].prox(gv_in)
    fu_in = us[0] + us[n - 2] - p[n - 2]
    gv_in = vs[0] + vs[n - 2] - q[n - 2]
    us[n - 1] = problem.f_specs[-1].prox(fu_in)
    vs[n - 1] = gv_in - problem.g_specs[-1].prox(gv_in)
    return np.stack(us), np.stack(vs)


def pd_step(problem, state, gamma):
    """One iteration of the primal-dual algorithm: the inner (u, v) sweep
    followed by the gamma-relaxed (p, q) update.

    Returns (next_state, us, vs) with us, vs the full length-n inner tuples.
    """
    if not (0.0 < gamma < 1.0):
        raise UsageError("gamma must lie in (0, 1)")
    us, vs = _inner_uv(problem, state)
    pnext = state.p + gamma * (us[1:] - us[:-1])
    qnext = state.q + gamma * (vs[1:] - vs[:-1])
    return PDState(pnext, qnext), us, vs


def assemble_operators(problem):
    """The n operators on H1 x H2 whose minimal-lifting iteration reproduces
    the primal-dual algorithm: skew coupling, middle gradient pairs, and the
    strongly monotone last pair, with the moduli each block inherits from
    its convexity/smoothness constants.
    """
    d1 = problem.d1
    ops = [
        OperatorDesc(
            resolvent=lambda w: np.concatenate(resolvent_skew(w[:d1], w[d1:], problem.C)),
            mu=0.0,
            lip=problem.norm_C(),
            kind="skew-block",
        )
    ]

    def pair_resolvent(fspec, gspec):
        def res(w):
            wu, wv = w[:d1], w[d1:]
            return np.concatenate([fspec.prox(wu), wv - gspec.prox(wv)])

        return res

    middle_lip = problem.middle_lipschitz() if problem.n > 2 else None
    for i in range(problem.n - 2):
        ops.append(
            OperatorDesc(
                resolvent=pair_resolvent(problem.f_specs[i], problem.g_specs[i]),
                mu=0.0,
                lip=middle_lip,
                kind="gradient-pair",
            )
        )
    ops.append(
        OperatorDesc(
            resolvent=pair_resolvent(problem.f_specs[-1], problem.g_specs[-1]),
            mu=problem.strong_modulus(),
            lip=None,
            kind="strong-pair",
        )
    )
    return ops


def as_split_problem(problem, gamma):
    return SplitProblem(ops=assemble_operators(problem), gamma=gamma)


def reference_state(problem, gamma, iters=200):
    """High-accuracy fixed point, produced by running the iteration itself."""
    state = PDState.zeros(problem)
    for _ in range(iters):
        state, _, _ = pd_step(problem, state, gamma)
    return state
