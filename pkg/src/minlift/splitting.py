"""Fixed-point operators and the Banach iteration driver.

State for the minimal-lifting operator lives in H^{n-1} and is stored as an
(n-1, d) array; the derived shadow tuple lives in H^n as an (n, d) array.
"""

import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .operators import OperatorDesc, UsageError


@dataclass(frozen=True)
class SplitProblem:
    """n maximally monotone operators plus the relaxation parameter gamma."""

    ops: List[OperatorDesc]
    gamma: float

    def __post_init__(self):
        if len(self.ops) < 2:
            raise UsageError("need at least two operators")
        if not (0.0 < self.gamma < 1.0):
            raise UsageError("gamma must lie in (0, 1)")

    @property
    def n(self):
        return len(self.ops)


def _check_state(z, n):
    z = np.asarray(z, dtype=float)
    if z.ndim == 1:
        z = z.reshape(1, -1) if n == 2 else z.reshape(n - 1, -1)
    if z.shape[0] != n - 1:
        raise UsageError(f"state must have {n - 1} blocks, got {z.shape[0]}")
    return z


def shadow_tuple(problem, z):
    """The x = (x_1, ..., x_n) tuple implied by z through the resolvent chain."""
    z = _check_state(z, problem.n)
    n = problem.n
    xs = np.empty((n, z.shape[1]))
    xs[0] = problem.ops[0].resolvent(z[0])
    for i in range(1, n - 1):
        xs[i] = problem.ops[i].resolvent(z[i] + xs[i - 1] - z[i - 1])
    xs[n - 1] = problem.ops[n - 1].resolvent(xs[0] + xs[n - 2] - z[n - 2])
    return xs


def mt_apply(problem, z):
    """One application of the minimal-lifting fixed-point operator.

    Returns (z_next, xs) where xs is the shadow tuple used in the update
    z_next_i = z_i + gamma * (x_{i+1} - x_i).
    """
    z = _check_state(z, problem.n)
    xs = shadow_tuple(problem, z)
    znext = z + problem.gamma * (xs[1:] - xs[:-1])
    return znext, xs


def dr_apply(A1, A2, z):
    """One Douglas-Rachford step: z + J_{A2}(2 J_{A1}(z) - z) - J_{A1}(z)."""
    z = np.asarray(z, dtype=float).ravel()
    x1 = A1.resolvent(z)
    x2 = A2.resolvent(2.0 * x1 - z)
    return z + x2 - x1


def dr_product_apply(ops, Z):
    """One DR step on the product-space consensus reformulation for n operators.

    The first operator is the normal cone to the diagonal (resolvent:
    averaging projection), the second is the componentwise family. Returns
    (Z_next, shadow) with shadow the diagonal projection of Z.
    """
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z.reshape(len(ops), -1)
    if Z.shape[0] != len(ops):
        raise UsageError("product-space state needs one block per operator")
    P = Z.mean(axis=0)
    reflected = 2.0 * P - Z
    Y = np.stack([op.resolvent(reflected[i]) for i, op in enumerate(ops)])
    Znext = Z + Y - P
    return Znext, P


@dataclass
class IterationTrace:
    """Per-iteration records of a driven fixed-point iteration."""

    ks: List[int] = field(default_factory=list)
    changes: List[float] = field(default_factory=list)
    dists: List[Optional[float]] = field(default_factory=list)
    gaps: List[Optional[float]] = field(default_factory=list)
    elapsed_ms: List[float] = field(default_factory=list)
    status: str = "max-iter"

    def append(self, k, change, dist, gap, elapsed):
        self.ks.append(k)
        self.changes.append(change)
        self.dists.append(dist)
        self.gaps.append(gap)
        self.elapsed_ms.append(elapsed)

    @property
    def iterations(self):
        return len(self.ks)

    def distances(self):
        return np.array([d for d in self.dists if d is not None])


def drive(step, z0, tol, max_iter, reference=None, gap_fn=None, norm_scale=None):
    """Iterate z <- step(z) until the normalized change drops below tol.

    The change is ||z_k - z_{k-1}|| / m with m the total number of scalars in
    the state by default; norm_scale overrides m (the imaging runs normalize
    by the pixel count so that stopping is resolution-independent).
    Non-finite states halt with status 'diverged'. Returns
    (final_state, IterationTrace).
    """
    if tol <= 0:
        raise UsageError("tol must be > 0")
    if max_iter < 1:
        raise UsageError("max_iter must be >= 1")
    z = np.asarray(z0, dtype=float).copy()
    m = z.size if norm_scale is None else float(norm_scale)
    if m <= 0:
        raise UsageError("norm_scale must be > 0")
    trace = IterationTrace()
    t0 = time.perf_counter()
    for k in range(1, max_iter + 1):
        znext = np.asarray(step(z), dtype=float)
        if not np.all(np.isfinite(znext)):
            trace.status = "diverged"
            return z, trace
        change = float(np.linalg.norm(znext - z)) / m
        dist = None
        if reference is not None:
            dist = float(np.linalg.norm(znext - reference))
        gap = None
        if gap_fn is not None:
            gap = float(gap_fn(znext))
        trace.append(k, change, dist, gap, (time.perf_counter() - t0) * 1e3)
        z = znext
        if change <= tol:
            trace.status = "converged"
            return z, trace
    trace.status = "max-iter"
    return z, trace


def mt_fixed_point_residual(problem, z):
    """Fixed-point residual ||T(z) - z|| and the shadow consensus spread."""
    z = _check_state(z, problem.n)
    znext, xs = mt_apply(problem, z)
    residual = float(np.linalg.norm(znext - z))
    consensus = float(max(np.linalg.norm(xs[i] - xs[0]) for i in range(problem.n)))
    return residual, consensus
