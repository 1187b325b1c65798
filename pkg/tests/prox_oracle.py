"""Brute-force proximal points by constrained numerical minimization (SLSQP).

Nonsmooth terms are lifted to smooth ones with epigraph variables so the
solver sees a smooth objective with explicit constraints.
"""
import numpy as np
from scipy.optimize import minimize

_OPTS = {"ftol": 1e-15, "maxiter": 2000}


def _solve(fun, jac, z0, constraints=(), bounds=None):
    res = minimize(fun, z0, jac=jac, method="SLSQP", constraints=list(constraints),
                   bounds=bounds, options=_OPTS)
    return res.x


def prox_quadratic_linear(x, lin=None, lo=None, hi=None):
    """argmin 1/2||y - x||^2 + <lin, y> subject to lo <= y <= hi."""
    x = np.asarray(x, float)
    lin = np.zeros_like(x) if lin is None else np.broadcast_to(lin, x.shape)
    bounds = None
    if lo is not None:
        bounds = list(zip(np.broadcast_to(lo, x.shape), np.broadcast_to(hi, x.shape)))
    y = _solve(lambda y: 0.5 * np.sum((y - x) ** 2) + lin @ y,
               lambda y: y - x + lin, np.zeros_like(x), bounds=bounds)
    return y


def prox_weighted_l1(x, weight, center=0.0, lo=None, hi=None):
    """argmin 1/2||y - x||^2 + weight * ||y - center||_1 (optionally over a box)."""
    x = np.asarray(x, float)
    n = x.size
    c = np.broadcast_to(center, x.shape)

    def fun(z):
        y, t = z[:n], z[n:]
        return 0.5 * np.sum((y - x) ** 2) + weight * t.sum()

    def jac(z):
        return np.concatenate([z[:n] - x, np.full(n, weight)])

    E = np.hstack([np.eye(n), -np.eye(n)])
    F = np.hstack([-np.eye(n), -np.eye(n)])
    cons = [{"type": "ineq", "fun": lambda z: -(E @ z) + c, "jac": lambda z: -E},   # t >= y - c
            {"type": "ineq", "fun": lambda z: -(F @ z) - c, "jac": lambda z: -F}]   # t >= c - y
    bounds = None
    if lo is not None:
        bounds = list(zip(np.broadcast_to(lo, x.shape), np.broadcast_to(hi, x.shape))) + [(None, None)] * n
    z0 = np.concatenate([np.zeros(n), np.abs(c) + 1.0])
    return _solve(fun, jac, z0, cons, bounds)[:n]


def proj_disc_pairs(y, radius):
    """argmin 1/2||w - y||^2 subject to w_k^2 + w_{h+k}^2 <= radius^2."""
    y = np.asarray(y, float)
    h = y.size // 2

    def cons_fun(w):
        return radius ** 2 - w[:h] ** 2 - w[h:] ** 2

    def cons_jac(w):
        J = np.zeros((h, 2 * h))
        J[np.arange(h), np.arange(h)] = -2 * w[:h]
        J[np.arange(h), h + np.arange(h)] = -2 * w[h:]
        return J
    return _solve(lambda w: 0.5 * np.sum((w - y) ** 2), lambda w: w - y, np.zeros_like(y),
                  [{"type": "ineq", "fun": cons_fun, "jac": cons_jac}])


def prox_group_norm(y, weight):
    """argmin 1/2||w - y||^2 + weight * sum_k |(w_k, w_{h+k})|.

    The objective separates over pairs; each 2-D piece is minimized with
    Nelder-Mead (no gradient needed at the kink) from several starts.
    """
    y = np.asarray(y, float)
    h = y.size // 2
    out = np.empty_like(y)
    for k in range(h):
        a = np.array([y[k], y[h + k]])

        def f(w):
            return 0.5 * np.sum((w - a) ** 2) + weight * np.hypot(w[0], w[1])
        best = None
        for w0 in (a, np.array([1e-3, -1e-3])):
            res = minimize(f, w0, method="Nelder-Mead",
                           options={"xatol": 1e-9, "fatol": 1e-15, "maxiter": 4000})
            if best is None or res.fun < best.fun:
                best = res
        out[k], out[h + k] = best.x
    return out
