"""Catalog of maximally monotone operators via their resolvents.

Every operator is represented by its (single-valued, firmly nonexpansive)
resolvent J = (Id + A)^{-1} together with monotonicity/Lipschitz metadata.
Vectors are flat float64 numpy arrays.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg


class UsageError(ValueError):
    """Invalid arguments at a public boundary (dimension mismatch, bad constants)."""


class NumericError(RuntimeError):
    """An inner numerical routine failed to meet its tolerance."""


def as_vector(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.ndim != 1:
        raise UsageError(f"expected a flat vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise UsageError("vector contains NaN/Inf")
    return x


@dataclass(frozen=True)
class LinearMap:
    """Bounded linear map with adjoint, given matrix-free."""

    apply: Callable[[np.ndarray], np.ndarray]
    adjoint: Callable[[np.ndarray], np.ndarray]
    in_dim: int
    out_dim: int
    norm_bound: Optional[float] = None

    @staticmethod
    def from_matrix(M):
        M = np.atleast_2d(np.asarray(M, dtype=float))
        return LinearMap(
            apply=lambda x: M @ x,
            adjoint=lambda y: M.T @ y,
            in_dim=M.shape[1],
            out_dim=M.shape[0],
            norm_bound=float(np.linalg.norm(M, 2)),
        )

    @staticmethod
    def zero(in_dim, out_dim):
        return LinearMap(
            apply=lambda x: np.zeros(out_dim),
            adjoint=lambda y: np.zeros(in_dim),
            in_dim=in_dim,
            out_dim=out_dim,
            norm_bound=0.0,
        )

    def operator_norm(self, iters=200, tol=1e-10, seed=0):
        """Power iteration on the Gram map; returns an estimate of ||C||."""
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(self.in_dim)
        x /= np.linalg.norm(x)
        val = 0.0
        for _ in range(iters):
            y = self.adjoint(self.apply(x))
            nrm = np.linalg.norm(y)
            if nrm == 0.0:
                return 0.0
            new_val = np.sqrt(nrm)
            x = y / nrm
            if abs(new_val - val) <= tol * max(1.0, new_val):
                return new_val
            val = new_val
        return val


@dataclass(frozen=True)
class OperatorDesc:
    """A maximally monotone operator given through its resolvent.

    mu is the strong-monotonicity modulus (0 for merely monotone); lip is a
    Lipschitz constant when the operator itself is single-valued Lipschitz,
    None otherwise.
    """

    resolvent: Callable[[np.ndarray], np.ndarray]
    mu: float = 0.0
    lip: Optional[float] = None
    kind: str = "custom"

    def __post_init__(self):
        if self.mu < 0:
            raise UsageError("strong-monotonicity modulus must be >= 0")
        if self.lip is not None and self.lip < 0:
            raise UsageError("Lipschitz constant must be >= 0")


@dataclass(frozen=True)
class ProxSpec:
    """Proximal operator of a proper lsc convex function, with optional values.

    value(w) evaluates f(w); conj_value(y) evaluates the Fenchel conjugate
    f*(y) where a closed form is cataloged (needed for primal-dual gaps).
    """

    prox: Callable[[np.ndarray], np.ndarray]
    value: Optional[Callable[[np.ndarray], float]] = None
    conj_value: Optional[Callable[[np.ndarray], float]] = None
    tag: str = "custom"

    def as_operator(self, mu=0.0, lip=None):
        return OperatorDesc(resolvent=self.prox, mu=mu, lip=lip, kind=f"prox:{self.tag}")


# ---------------------------------------------------------------------------
# Prox catalog
# ---------------------------------------------------------------------------

def prox_quadratic_shift(w, b):
    """Prox of (1/2)||. - b||^2, which is (w + b) / 2."""
    w = as_vector(w)
    b = as_vector(b)
    if w.shape != b.shape:
        raise UsageError(f"dimension mismatch: {w.shape} vs {b.shape}")
    return (w + b) / 2.0


def prox_scaled_square(w, lam):
    """Prox of (lam/2)||.||^2, which is w / (1 + lam)."""
    if lam <= 0:
        raise UsageError("lam must be > 0")
    return as_vector(w) / (1.0 + lam)


def prox_iso(v, lam2, lam3=0.0):
    """Prox of lam2*||.||_iso + (lam3/2)||.||^2 on R^{2m}.

    The input is read as two stacked components (v1, v2) of length m; each
    pixel pair is soft-thresholded at radius lam2 and the result scaled by
    1/(1+lam3). Pairs with norm exactly lam2 are sent to zero.
    """
    v = as_vector(v)
    if v.size % 2 != 0:
        raise UsageError("iso prox input must have even length")
    if lam2 <= 0:
        raise UsageError("lam2 must be > 0")
    if lam3 < 0:
        raise UsageError("lam3 must be >= 0")
    m = v.size // 2
    v1, v2 = v[:m], v[m:]
    r = np.sqrt(v1 * v1 + v2 * v2)
    alpha = np.zeros(m)
    big = r > lam2
    alpha[big] = 1.0 - lam2 / r[big]
    out = np.concatenate([alpha * v1, alpha * v2]) / (1.0 + lam3)
    return out


def prox_conjugate(prox_f, w):
    """Prox of the Fenchel conjugate, via the Moreau decomposition w - prox_f(w)."""
    w = as_vector(w)
    fw = prox_f.prox(w) if isinstance(prox_f, ProxSpec) else prox_f(w)
    return w - fw


def iso_norm(v):
    """Sum over pixels of the Euclidean norm of the stacked two-component field."""
    v = as_vector(v)
    if v.size % 2 != 0:
        raise UsageError("iso norm input must have even length")
    m = v.size // 2
    return float(np.sum(np.sqrt(v[:m] ** 2 + v[m:] ** 2)))


def quadratic_shift_spec(b):
    b = as_vector(b)
    return ProxSpec(
        prox=lambda w: prox_quadratic_shift(w, b),
        value=lambda w: 0.5 * float(np.sum((as_vector(w) - b) ** 2)),
        conj_value=lambda y: 0.5 * float(np.sum(as_vector(y) ** 2)) + float(as_vector(y) @ b),
        tag="quadratic-shift",
    )


def scaled_square_spec(lam):
    if lam <= 0:
        raise UsageError("lam must be > 0")
    return ProxSpec(
        prox=lambda w: prox_scaled_square(w, lam),
        value=lambda w: 0.5 * lam * float(np.sum(as_vector(w) ** 2)),
        conj_value=lambda y: float(np.sum(as_vector(y) ** 2)) / (2.0 * lam),
        tag="scaled-square",
    )


def iso_plus_square_spec(lam2, lam3):
    """lam2*||.||_iso + (lam3/2)||.||^2; conjugate is the squared iso-ball distance."""

    def conj_value(y):
        y = as_vector(y)
        if lam3 <= 0:
            raise UsageError("conjugate of the iso norm alone has no finite closed form here")
        m = y.size // 2
        r = np.sqrt(y[:m] ** 2 + y[m:] ** 2)
        excess = np.maximum(0.0, r - lam2)
        return float(np.sum(excess**2)) / (2.0 * lam3)

    return ProxSpec(
        prox=lambda w: prox_iso(w, lam2, lam3),
        value=lambda w: lam2 * iso_norm(w) + 0.5 * lam3 * float(np.sum(as_vector(w) ** 2)),
        conj_value=conj_value,
        tag="iso-plus-square",
    )


# ---------------------------------------------------------------------------
# Structured resolvents
# ---------------------------------------------------------------------------

def resolvent_skew(p, q, C, tol=1e-12):
    """Resolvent of the skew block operator (u,v) -> (C* v, -C u).

    Solves (Id + C*C) u = p - C* q by conjugate gradient and sets v = q + C u,
    so that u + C* v = p and -C u + v = q.
    """
    p = as_vector(p)
    q = as_vector(q)
    if p.size != C.in_dim or q.size != C.out_dim:
        raise UsageError("skew resolvent: dimensions do not match the linear map")
    rhs = p - C.adjoint(q)
    if C.norm_bound == 0.0:
        return rhs.copy(), q.copy()

    gram = LinearOperator(
        (C.in_dim, C.in_dim),
        matvec=lambda x: x + C.adjoint(C.apply(x)),
        dtype=float,
    )
    maxiter = max(50, 10 * C.in_dim)
    u, info = cg(gram, rhs, rtol=tol, atol=0.0, maxiter=maxiter)
    resid = np.linalg.norm(u + C.adjoint(C.apply(u)) - rhs)
    if info != 0 or resid > 1e-9 * (1.0 + np.linalg.norm(rhs)):
        raise NumericError(f"skew resolvent CG failed: info={info}, residual={resid:.3e}")
    v = q + C.apply(u)
    return u, v


def resolvent_cone_shift(w, mu, project_onto):
    """Resolvent of the strongly monotone cone-restricted operators of the
    two-fixed-point counterexample family: scale by 1/(1+mu) then project.

    project_onto: 'nonneg' | 'nonpos' | 'real' (identity, no constraint).
    """
    if mu <= 0:
        raise UsageError("mu must be > 0")
    w = as_vector(w) / (1.0 + mu)
    if project_onto == "nonneg":
        return np.maximum(w, 0.0)
    if project_onto == "nonpos":
        return np.minimum(w, 0.0)
    if project_onto == "real":
        return w
    raise UsageError(f"unknown projection target {project_onto!r}")


# ---------------------------------------------------------------------------
# Operator families used throughout tests and diagnostics
# ---------------------------------------------------------------------------

def zero_operator():
    return OperatorDesc(resolvent=lambda w: as_vector(w).copy(), mu=0.0, lip=0.0, kind="zero")


def scaled_identity(mu):
    """The operator mu*Id (strongly monotone for mu > 0)."""
    if mu < 0:
        raise UsageError("mu must be >= 0")
    return OperatorDesc(
        resolvent=lambda w: as_vector(w) / (1.0 + mu),
        mu=mu,
        lip=mu,
        kind="scaled-identity",
    )


def affine_operator(M, c=None, mu=None, lip=None):
    """The operator x -> M x + c with resolvent (Id + M)^{-1}(w - c).

    mu defaults to the smallest eigenvalue of the symmetric part; lip to
    the spectral norm of M.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    d = M.shape[0]
    c = np.zeros(d) if c is None else as_vector(c)
    if mu is None:
        mu = max(0.0, float(np.min(np.linalg.eigvalsh((M + M.T) / 2.0))))
    if lip is None:
        lip = float(np.linalg.norm(M, 2))
    lu = np.linalg.inv(np.eye(d) + M)
    return OperatorDesc(resolvent=lambda w: lu @ (as_vector(w) - c), mu=mu, lip=lip, kind="affine")


def counterexample_zero_ops():
    """Three zero operators on R: every diagonal point is fixed (no contraction)."""
    return [zero_operator(), zero_operator(), zero_operator()]


def counterexample_cone_ops(mu):
    """mu*Id plus normal cones to R_-, R_+ and {0}: the ray R_- x {0} is fixed."""
    return [
        OperatorDesc(resolvent=lambda w: resolvent_cone_shift(w, mu, "nonneg"), mu=mu, kind="cone"),
        OperatorDesc(resolvent=lambda w: resolvent_cone_shift(w, mu, "nonpos"), mu=mu, kind="cone"),
        OperatorDesc(resolvent=lambda w: resolvent_cone_shift(w, mu, "real"), mu=mu, kind="cone"),
    ]
