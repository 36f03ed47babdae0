"""Discrete gradient machinery, PGM I/O, noise generation and the TV
denoising problem assembly.

Images are square M x M grayscale arrays with values in [0, 1], flattened
row-major when treated as vectors. The discrete gradient stacks horizontal
forward differences (last column zero) over vertical ones (last row zero).
"""

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from .operators import (
    LinearMap,
    NumericError,
    UsageError,
    iso_plus_square_spec,
    quadratic_shift_spec,
    scaled_square_spec,
)
from .primal_dual import PDProblem

GRAD_NORM_SQ_BOUND = 8.0  # ||D||^2 <= 8 for the forward-difference stencil


class FormatError(ValueError):
    """Malformed PGM input."""


@dataclass(frozen=True)
class DenoiseParams:
    lambda1: float = 0.01
    lambda2: float = 0.05
    lambda3: float = 0.0001
    lambda4: float = 10.0
    gamma: float = 0.99
    noise_sigma: float = 0.05
    seed: int = 0
    tol: float = 1e-4
    max_iter: int = 500

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "lambda3", "lambda4"):
            if getattr(self, name) <= 0:
                raise UsageError(f"{name} must be > 0")
        if not (0.0 < self.gamma < 1.0):
            raise UsageError("gamma must lie in (0, 1)")
        if self.noise_sigma < 0:
            raise UsageError("noise_sigma must be >= 0")
        if self.tol <= 0 or self.max_iter < 1:
            raise UsageError("tol must be > 0 and max_iter >= 1")


def _side(m):
    M = int(round(np.sqrt(m)))
    if M * M != m:
        raise UsageError(f"vector length {m} is not a perfect square")
    return M


def discrete_gradient_apply(u):
    """Forward differences of the flattened M x M image: horizontal stack
    first, vertical second, each of length m."""
    u = np.asarray(u, dtype=float).ravel()
    M = _side(u.size)
    U = u.reshape(M, M)
    dh = np.zeros((M, M))
    dh[:, :-1] = U[:, 1:] - U[:, :-1]
    dv = np.zeros((M, M))
    dv[:-1, :] = U[1:, :] - U[:-1, :]
    return np.concatenate([dh.ravel(), dv.ravel()])


def discrete_gradient_adjoint(y):
    """Exact adjoint of discrete_gradient_apply (negative divergence)."""
    y = np.asarray(y, dtype=float).ravel()
    if y.size % 2 != 0:
        raise UsageError("adjoint input must have length 2m")
    m = y.size // 2
    M = _side(m)
    Y1 = y[:m].reshape(M, M)
    Y2 = y[m:].reshape(M, M)
    out = np.zeros((M, M))
    out[:, 1:] += Y1[:, :-1]
    out[:, :-1] -= Y1[:, :-1]
    out[1:, :] += Y2[:-1, :]
    out[:-1, :] -= Y2[:-1, :]
    return out.ravel()


def gradient_map(M):
    """The discrete gradient as a matrix-free linear map on R^{M*M}."""
    return LinearMap(
        apply=discrete_gradient_apply,
        adjoint=discrete_gradient_adjoint,
        in_dim=M * M,
        out_dim=2 * M * M,
        norm_bound=float(np.sqrt(GRAD_NORM_SQ_BOUND)),
    )


def dense_gradient_matrix(M):
    """Dense D for small M; test/oracle use only."""
    m = M * M
    D = np.zeros((2 * m, m))
    for j in range(m):
        e = np.zeros(m)
        e[j] = 1.0
        D[:, j] = discrete_gradient_apply(e)
    return D


def solve_identity_plus_DtD(rhs, tol=1e-12):
    """Matrix-free CG solve of (Id + D^T D) x = rhs."""
    rhs = np.asarray(rhs, dtype=float).ravel()
    m = rhs.size
    _side(m)  # validates the shape

    op = LinearOperator(
        (m, m),
        matvec=lambda x: x + discrete_gradient_adjoint(discrete_gradient_apply(x)),
        dtype=float,
    )
    x, info = cg(op, rhs, rtol=tol, atol=0.0, maxiter=10 * m)
    resid = np.linalg.norm(op.matvec(x) - rhs)
    if info != 0 or resid > 1e-10 * (1.0 + np.linalg.norm(rhs)):
        raise NumericError(f"CG on (Id + DtD) failed: info={info}, residual={resid:.3e}")
    return x


def add_gaussian_noise(img, sigma, seed):
    """Pixel-wise zero-mean Gaussian noise from a seeded generator, clamped
    back into [0, 1]. Same seed, same output."""
    img = np.asarray(img, dtype=float)
    if sigma < 0:
        raise UsageError("sigma must be >= 0")
    if sigma == 0:
        return img.copy()
    rng = np.random.default_rng(seed)
    return np.clip(img + sigma * rng.standard_normal(img.shape), 0.0, 1.0)


# ---------------------------------------------------------------------------
# PGM I/O (P2 ascii / P5 binary, maxval 255)
# ---------------------------------------------------------------------------

def _read_tokens(data, count, offset):
    """Read whitespace/comment-separated ascii tokens from a byte string."""
    tokens = []
    i = offset
    while len(tokens) < count:
        if i >= len(data):
            raise FormatError(f"truncated header at byte {i}")
        ch = data[i : i + 1]
        if ch == b"#":
            while i < len(data) and data[i : i + 1] != b"\n":
                i += 1
        elif ch.isspace():
            i += 1
        else:
            j = i
            while j < len(data) and not data[j : j + 1].isspace() and data[j : j + 1] != b"#":
                j += 1
            tokens.append(data[i:j])
            i = j
    return tokens, i


def load_pgm(path):
    """Load a P2/P5 PGM (maxval 255) as an M x M array scaled to [0, 1]."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] not in (b"P2", b"P5"):
        raise FormatError(f"bad magic {data[:2]!r} at byte 0")
    magic = data[:2]
    fields, pos = _read_tokens(data, 3, 2)
    try:
        width, height, maxval = (int(t) for t in fields)
    except ValueError as exc:
        raise FormatError(f"non-numeric header field near byte {pos}") from exc
    if maxval != 255:
        raise FormatError(f"unsupported maxval {maxval} (only 255)")
    if width != height:
        raise FormatError(f"image is {width}x{height}; a square image is required")
    npix = width * height
    if magic == b"P5":
        pos += 1  # single whitespace byte after maxval
        payload = data[pos : pos + npix]
        if len(payload) < npix:
            raise FormatError(f"truncated payload at byte {pos + len(payload)}")
        pixels = np.frombuffer(payload, dtype=np.uint8).astype(float)
    else:
        tokens, pos = _read_tokens(data, npix, pos)
        try:
            pixels = np.array([int(t) for t in tokens], dtype=float)
        except ValueError as exc:
            raise FormatError(f"non-numeric pixel near byte {pos}") from exc
    if pixels.min() < 0 or pixels.max() > 255:
        raise FormatError("pixel value outside [0, 255]")
    return np.clip(pixels / 255.0, 0.0, 1.0).reshape(height, width)


def save_pgm(img, path, binary=True):
    """Save an M x M [0, 1] image as PGM with round-half-up quantization."""
    img = np.asarray(img, dtype=float)
    if img.ndim != 2 or img.shape[0] != img.shape[1]:
        raise UsageError("image must be square M x M")
    quant = np.floor(np.clip(img, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)
    M = img.shape[0]
    with open(path, "wb") as fh:
        if binary:
            fh.write(b"P5\n%d %d\n255\n" % (M, M))
            fh.write(quant.tobytes())
        else:
            fh.write(b"P2\n%d %d\n255\n" % (M, M))
            for row in quant:
                fh.write((" ".join(str(v) for v in row) + "\n").encode())


def phantom(M):
    """Synthetic Shepp-Logan-style head phantom built from analytic ellipses,
    with values clamped to [0, 1]."""
    # (intensity, a, b, x0, y0, angle_deg)
    ellipses = [
        (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
        (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
        (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
        (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
        (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
        (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
        (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
        (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
        (0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
        (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
    ]
    ys, xs = np.mgrid[-1 : 1 : complex(0, M), -1 : 1 : complex(0, M)]
    img = np.zeros((M, M))
    for val, a, b, x0, y0, ang in ellipses:
        t = np.deg2rad(ang)
        xr = (xs - x0) * np.cos(t) + (ys - y0) * np.sin(t)
        yr = -(xs - x0) * np.sin(t) + (ys - y0) * np.cos(t)
        img[(xr / a) ** 2 + (yr / b) ** 2 <= 1.0] += val
    return np.clip(img, 0.0, 1.0)


def build_denoise_problem(noisy, params):
    """Assemble the n = 3 primal-dual instance of the TV denoising model

        min_u  (1/2)||u - b||^2 + (l1/2)||u||^2
               + (l2 ||.||_iso + (l3/2)||.||^2) box-convolved with (l4/2)||.||^2
               applied to D u.
    """
    noisy = np.asarray(noisy, dtype=float)
    if noisy.ndim != 2 or noisy.shape[0] != noisy.shape[1]:
        raise UsageError("noisy image must be square M x M")
    M = noisy.shape[0]
    b = noisy.ravel()
    return PDProblem(
        C=gradient_map(M),
        f_specs=[quadratic_shift_spec(b), scaled_square_spec(params.lambda1)],
        g_specs=[
            iso_plus_square_spec(params.lambda2, params.lambda3),
            scaled_square_spec(params.lambda4),
        ],
        alpha=1.0,
        sigma=params.lambda1,
        tau=params.lambda3,
        beta_g=params.lambda4,
    )
