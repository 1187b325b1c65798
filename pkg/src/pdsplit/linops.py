"""Imaging operators: forward-difference gradient with Neumann boundary,
symmetric-boundary blur and a diagonal pixel mask.

Images are stored row-major as flat vectors of length ``n = M * N``.  The
gradient output is one block of length ``2n``: all vertical differences first,
then all horizontal differences, both row-major.
"""
from __future__ import annotations

import numpy as np

from .core import ConfigError, DimensionError, LinearOp

GRAD_NORM_SQ_BOUND = 8.0


def _as_image(x, M, N, what="x"):
    x = np.asarray(x, dtype=float)
    if x.shape != (M * N,):
        raise DimensionError(f"{what} has shape {x.shape}, expected ({M * N},) for a {M}x{N} image")
    return x.reshape(M, N)


def grad_apply(x, M: int, N: int) -> np.ndarray:
    """Forward differences ``[L1 x ; L2 x]``, zero in the last row/column."""
    X = _as_image(x, M, N)
    out = np.zeros((2, M, N))
    out[0, :-1, :] = X[1:, :] - X[:-1, :]
    out[1, :, :-1] = X[:, 1:] - X[:, :-1]
    return out.ravel()


def grad_adjoint(y, M: int, N: int) -> np.ndarray:
    """Adjoint of :func:`grad_apply` (negative divergence)."""
    y = np.asarray(y, dtype=float)
    if y.shape != (2 * M * N,):
        raise DimensionError(f"y has shape {y.shape}, expected ({2 * M * N},)")
    P = y[:M * N].reshape(M, N)
    Q = y[M * N:].reshape(M, N)
    out = np.zeros((M, N))
    out[:-1, :] -= P[:-1, :]
    out[1:, :] += P[:-1, :]
    out[:, :-1] -= Q[:, :-1]
    out[:, 1:] += Q[:, :-1]
    return out.ravel()


class GradientOp(LinearOp):
    def __init__(self, M: int, N: int):
        if M < 1 or N < 1:
            raise DimensionError("image dimensions must be positive")
        self.shape = (int(M), int(N))
        n = self.shape[0] * self.shape[1]
        super().__init__(lambda x: grad_apply(x, M, N), lambda y: grad_adjoint(y, M, N),
                         n, 2 * n, np.sqrt(GRAD_NORM_SQ_BOUND))


def gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    """Normalized, rotationally symmetric Gaussian of odd side ``size``."""
    if size <= 0 or size % 2 == 0:
        raise ConfigError(f"kernel size must be a positive odd integer, got {size}")
    if not sigma > 0:
        raise ConfigError("sigma must be positive")
    r = size // 2
    t = np.arange(-r, r + 1, dtype=float)
    h = np.exp(-(t[:, None] ** 2 + t[None, :] ** 2) / (2.0 * sigma ** 2))
    return h / h.sum()


def _check_kernel(kernel):
    k = np.asarray(kernel, dtype=float)
    if k.ndim != 2 or k.shape[0] != k.shape[1] or k.shape[0] % 2 == 0:
        raise ConfigError(f"kernel must be square with odd side length, got shape {k.shape}")
    return k


def blur_apply(x, kernel, M: int, N: int) -> np.ndarray:
    """2-D correlation with half-sample symmetric padding.

    For a point-symmetric kernel this equals convolution and the operator is
    self-adjoint.
    """
    k = _check_kernel(kernel)
    X = _as_image(x, M, N)
    r = k.shape[0] // 2
    P = np.pad(X, r, mode="symmetric")
    out = np.zeros((M, N))
    for a in range(k.shape[0]):
        for b in range(k.shape[1]):
            w = k[a, b]
            if w != 0.0:
                out += w * P[a:a + M, b:b + N]
    return out.ravel()


def blur_adjoint(y, kernel, M: int, N: int) -> np.ndarray:
    """Adjoint of :func:`blur_apply`; scatters through the mirrored padding."""
    k = _check_kernel(kernel)
    Y = _as_image(y, M, N, "y")
    r = k.shape[0] // 2
    acc = np.zeros((M + 2 * r, N + 2 * r))
    for a in range(k.shape[0]):
        for b in range(k.shape[1]):
            w = k[a, b]
            if w != 0.0:
                acc[a:a + M, b:b + N] += w * Y
    rows = _reflect_index(np.arange(-r, M + r), M)
    cols = _reflect_index(np.arange(-r, N + r), N)
    out = np.zeros((M, N))
    np.add.at(out, (rows[:, None], cols[None, :]), acc)
    return out.ravel()


def _reflect_index(i, size):
    # half-sample symmetric extension with period 2*size: -1 -> 0, size -> size-1
    i = np.mod(i, 2 * size)
    return np.where(i < size, i, 2 * size - 1 - i)


class BlurOp(LinearOp):
    """Blur by a nonnegative kernel summing to one; ``||A|| <= 1``."""

    def __init__(self, kernel, M: int, N: int):
        k = _check_kernel(kernel)
        if np.any(k < 0):
            raise ConfigError("kernel entries must be nonnegative")
        if abs(k.sum() - 1.0) > 1e-12:
            raise ConfigError(f"kernel must sum to 1, sums to {k.sum()!r}")
        self.kernel = k
        self.shape = (int(M), int(N))
        self.symmetric = bool(np.array_equal(k, k[::-1, ::-1]))
        adj = ((lambda y: blur_apply(y, k, M, N)) if self.symmetric
               else (lambda y: blur_adjoint(y, k, M, N)))
        super().__init__(lambda x: blur_apply(x, k, M, N), adj, M * N, M * N, 1.0)


class MaskOp(LinearOp):
    """Diagonal 0/1 operator keeping the observed pixels."""

    def __init__(self, mask):
        m = np.asarray(mask)
        if m.ndim != 1:
            m = m.ravel()
        if not np.all((m == 0) | (m == 1)):
            raise ConfigError("mask must be binary")
        self.mask = m.astype(float)
        bound = 1.0 if self.mask.any() else 0.0
        super().__init__(self._mul, self._mul, m.size, m.size, bound)

    def _mul(self, x):
        return self.mask * x


def estimate_norm(op: LinearOp, iters: int = 100, seed: int = 0) -> float:
    """Power iteration on ``L^* L``; returns the square root of the largest
    Rayleigh quotient seen.  The estimate approaches ``||L||`` from below."""
    if iters < 1:
        raise ConfigError("iters must be >= 1")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(op.in_dim)
    nx = np.linalg.norm(x)
    if nx == 0:
        return 0.0
    x /= nx
    best = 0.0
    for _ in range(iters):
        y = op.adjoint(op.apply(x))
        best = max(best, float(np.dot(x, y)))
        ny = np.linalg.norm(y)
        if ny == 0:
            break
        x = y / ny
    return float(np.sqrt(max(best, 0.0)))
