"""RMSE, empirical rate fits and the accelerated-scheme distance bound check."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import DimensionError, PDSplitError
from .solvers import ConvergenceLog


class MissingReferenceError(PDSplitError, ValueError):
    """A check needs reference distances that the log does not carry."""


def rmse(x, ref) -> float:
    x = np.asarray(x, dtype=float)
    ref = np.asarray(ref, dtype=float)
    if x.shape != ref.shape:
        raise DimensionError(f"shape mismatch: {x.shape} vs {ref.shape}")
    return float(np.sqrt(np.mean((x - ref) ** 2)))


@dataclass(frozen=True)
class RateFit:
    """Least-squares fit of ``log(value)`` against ``log(n)`` (``mode="power"``)
    or against ``n`` (``mode="geometric"``, slope = log of the ratio)."""

    slope: float
    intercept: float
    window: tuple
    mode: str = "power"
    samples: int = 0

    def to_text(self) -> str:
        return (f"mode={self.mode} window=[{self.window[0]}, {self.window[1]}] "
                f"samples={self.samples} slope={self.slope:.6g} intercept={self.intercept:.6g}")


def default_window(n_max: int) -> tuple:
    """Skip the first 10% of iterations as transient."""
    return (max(1, math.ceil(0.1 * n_max)), n_max)


def fit_rate(log, column: str = "dist_x_sq", window: Optional[tuple] = None,
             mode: str = "power") -> RateFit:
    """Fit the decay of ``column`` over iterations ``window = (n_lo, n_hi)``.

    ``log`` may be a :class:`ConvergenceLog` or a pair ``(iters, values)``.
    """
    if isinstance(log, ConvergenceLog):
        n = log.iters.astype(float)
        y = log.column(column)
        if y.size != n.size:
            raise MissingReferenceError(f"column {column!r} has {y.size} values for {n.size} iterations")
    else:
        n, y = (np.asarray(a, dtype=float) for a in log)
    if window is None:
        window = default_window(int(n.max()))
    lo, hi = window
    if not hi > lo >= 1:
        raise ValueError("window needs n_hi > n_lo >= 1")
    sel = (n >= lo) & (n <= hi)
    if sel.sum() < 10:
        raise ValueError(f"rate fit needs at least 10 samples, window has {int(sel.sum())}")
    ys = y[sel]
    if np.any(~(ys > 0)):
        raise ValueError("rate fit needs positive values throughout the window")
    xs = np.log(n[sel]) if mode == "power" else n[sel]
    if mode not in ("power", "geometric"):
        raise ValueError("mode must be 'power' or 'geometric'")
    slope, intercept = np.polyfit(xs, np.log(ys), 1)
    return RateFit(float(slope), float(intercept), (int(lo), int(hi)), mode, int(sel.sum()))


@dataclass
class BoundReport:
    """Per-iteration ratio ``lhs / rhs`` of the accelerated distance bound."""

    iters: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    slack: float = 1e-9

    @property
    def ratios(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(self.rhs > 0, self.lhs / self.rhs, np.where(self.lhs > 0, np.inf, 1.0))
        return r

    @property
    def holds(self) -> np.ndarray:
        return self.ratios <= 1 + self.slack

    @property
    def violations(self) -> np.ndarray:
        return self.iters[~self.holds]

    @property
    def max_ratio(self) -> float:
        return float(self.ratios.max())

    @property
    def ok(self) -> bool:
        return bool(self.holds.all())

    def to_text(self) -> str:
        return (f"iterations={len(self.iters)} violations={len(self.violations)} "
                f"max_ratio={self.max_ratio:.12g} slack={self.slack:g} "
                f"status={'OK' if self.ok else 'VIOLATED'}")

    def to_csv(self, path_or_buf=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iter", "lhs", "rhs", "ratio", "holds"])
        for k, a, b, r, h in zip(self.iters, self.lhs, self.rhs, self.ratios, self.holds):
            w.writerow([int(k), repr(float(a)), repr(float(b)), repr(float(r)), int(h)])
        text = buf.getvalue()
        if path_or_buf is not None:
            if hasattr(path_or_buf, "write"):
                path_or_buf.write(text)
            else:
                with open(path_or_buf, "w", newline="") as fh:
                    fh.write(text)
        return text


def check_bound_alg2(log: ConvergenceLog, gamma0: float, sigma0: float,
                     slack: float = 1e-9) -> BoundReport:
    """Check ``||x_n - x*||^2 + gamma_n/sigma_n * ||v_n - v*||^2
    <= gamma_n^2 (||x_0 - x*||^2 / gamma_0^2 + ||v_0 - v*||^2 / (gamma_0 sigma_0))``
    at n = 0 and after every logged iteration.

    The log must come from :func:`~pdsplit.solvers.solve` run with
    ``reference=(x_ref, v_ref)``.
    """
    init = log.initial
    if "dist_x_sq" not in init or "dist_v_sq" not in init:
        raise MissingReferenceError("log lacks primal and dual reference distances")
    dx = np.concatenate([[init["dist_x_sq"]], log.column("dist_x_sq")])
    dv = np.concatenate([[init["dist_v_sq"]], log.column("dist_v_sq")])
    if dx.size != len(log) + 1 or dv.size != len(log) + 1:
        raise MissingReferenceError("reference distances missing for some iterations")
    g = np.concatenate([[gamma0], log.column("gamma")])
    s = np.concatenate([[sigma0], log.column("sigma")])
    lhs = dx + g / s * dv
    c = init["dist_x_sq"] / gamma0 ** 2 + init["dist_v_sq"] / (gamma0 * sigma0)
    rhs = g ** 2 * c
    iters = np.concatenate([[0], log.iters])
    return BoundReport(iters, lhs, rhs, slack)


def check_geometric_bound(dist_sq, factor: float, slack: float = 1e-9) -> BoundReport:
    """Check ``dist_sq[n] <= factor**n * dist_sq[0]`` for a series starting at n = 0."""
    d = np.asarray(dist_sq, dtype=float)
    n = np.arange(d.size)
    return BoundReport(n, d, d[0] * factor ** n, slack)
