"""Closed-form proximal maps and projections.

Each ``make_*`` factory returns a :data:`~pdsplit.core.ProxMap`, i.e. a
closure ``(point, gamma) -> point`` hiding its parameters from the solver.
Pair-wise maps act on a gradient block laid out as ``[vertical ; horizontal]``
(see :mod:`pdsplit.linops`).
"""
from __future__ import annotations

import numpy as np

from .core import ConfigError, DimensionError
from .linops import grad_apply


def _check_gamma(gamma):
    if not gamma > 0:
        raise ConfigError(f"step size must be positive, got {gamma!r}")


def proj_box(v, lo, hi) -> np.ndarray:
    """Componentwise clamp to ``[lo, hi]``."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if np.any(lo > hi):
        raise ConfigError("box bounds must satisfy lo <= hi")
    return np.clip(np.asarray(v, dtype=float), lo, hi)


def prox_l1_box(x, gamma, lam2, lo=0.0, hi=1.0) -> np.ndarray:
    """Prox of ``lam2*||.||_1 + indicator[lo, hi]`` for a box in the
    nonnegative orthant: ``clamp(x - gamma*lam2, lo, hi)``."""
    _check_gamma(gamma)
    if lam2 < 0:
        raise ConfigError("lam2 must be nonnegative")
    if lam2 > 0 and np.any(np.asarray(lo) < 0):
        raise ConfigError("the shifted-clamp formula needs lo >= 0 when lam2 > 0")
    return proj_box(np.asarray(x, dtype=float) - gamma * lam2, lo, hi)


def proj_box_shifted(p, gamma, b, lo=-1.0, hi=1.0) -> np.ndarray:
    """Prox of ``p -> indicator[lo, hi](p) + <p, b>``, i.e. the conjugate of
    ``||. - b||_1`` for the default box."""
    _check_gamma(gamma)
    p = np.asarray(p, dtype=float)
    b = np.asarray(b, dtype=float)
    if b.shape not in ((), p.shape):
        raise DimensionError(f"b has shape {b.shape}, p has shape {p.shape}")
    return proj_box(p - gamma * b, lo, hi)


def proj_linf_pair_ball(p, q, lam1):
    """Scale each pair ``(p_k, q_k)`` back into the Euclidean disc of radius ``lam1``."""
    if not lam1 > 0:
        raise ConfigError("radius must be positive")
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise DimensionError(f"p and q shapes differ: {p.shape} vs {q.shape}")
    scale = np.maximum(1.0, np.hypot(p, q) / lam1)
    return p / scale, q / scale


def _split_pairs(y):
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size % 2:
        raise DimensionError("pair block must be a flat array of even length")
    h = y.size // 2
    return y[:h], y[h:]


def proj_pair_ball_block(y, lam1) -> np.ndarray:
    """:func:`proj_linf_pair_ball` on a stacked ``[p ; q]`` block."""
    p, q = _split_pairs(y)
    p2, q2 = proj_linf_pair_ball(p, q, lam1)
    return np.concatenate([p2, q2])


def soft_threshold(x, t) -> np.ndarray:
    """Prox of ``t*||.||_1``."""
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def prox_l1_shifted(x, gamma, b) -> np.ndarray:
    """Prox of ``gamma*||. - b||_1``."""
    _check_gamma(gamma)
    b = np.asarray(b, dtype=float)
    return b + soft_threshold(np.asarray(x, dtype=float) - b, gamma)


def group_soft_threshold_block(y, t) -> np.ndarray:
    """Prox of ``t*||.||_x`` (sum of per-pixel Euclidean lengths) on a ``[p ; q]`` block."""
    p, q = _split_pairs(y)
    mag = np.hypot(p, q)
    with np.errstate(invalid="ignore", divide="ignore"):
        shrink = np.where(mag > t, 1.0 - t / np.where(mag > 0, mag, 1.0), 0.0)
    return np.concatenate([shrink * p, shrink * q])


def prox_sq_dist(x, gamma, b, weight=1.0) -> np.ndarray:
    """Prox of ``weight/2 * ||. - b||^2``."""
    _check_gamma(gamma)
    return (np.asarray(x, dtype=float) + gamma * weight * np.asarray(b, dtype=float)) / (1.0 + gamma * weight)


def tv_aniso(x, M: int, N: int) -> float:
    return float(np.abs(grad_apply(x, M, N)).sum())


def tv_iso(x, M: int, N: int) -> float:
    p, q = _split_pairs(grad_apply(x, M, N))
    return float(np.hypot(p, q).sum())


# -- ProxMap factories ------------------------------------------------------

def make_identity():
    def prox(x, gamma):
        _check_gamma(gamma)
        return np.array(x, dtype=float)
    return prox


def make_box(lo, hi):
    if np.any(np.asarray(lo) > np.asarray(hi)):
        raise ConfigError("box bounds must satisfy lo <= hi")

    def prox(x, gamma):
        _check_gamma(gamma)
        return proj_box(x, lo, hi)
    return prox


def make_l1_box(lam2, lo=0.0, hi=1.0):
    if lam2 > 0 and np.any(np.asarray(lo) < 0):
        raise ConfigError("the shifted-clamp formula needs lo >= 0 when lam2 > 0")
    return lambda x, gamma: prox_l1_box(x, gamma, lam2, lo, hi)


def make_box_shifted(b, lo=-1.0, hi=1.0):
    b = np.array(b, dtype=float)
    return lambda p, gamma: proj_box_shifted(p, gamma, b, lo, hi)


def make_pair_ball(lam1):
    if not lam1 > 0:
        raise ConfigError("radius must be positive")

    def prox(y, gamma):
        _check_gamma(gamma)
        return proj_pair_ball_block(y, lam1)
    return prox


def make_sq_dist(b, weight=1.0):
    b = np.array(b, dtype=float)
    return lambda x, gamma: prox_sq_dist(x, gamma, b, weight)
