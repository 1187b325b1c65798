"""Primal-dual iterations, step-size rules, restricted gap and the driver loop.

Variants
--------
``alg1``  forward-backward-forward primal-dual iteration with a nondecreasing
          step sequence in ``[eps, (1 - eps)/beta]``.
``alg2``  accelerated variant for a strongly monotone primal part: separate
          primal/dual steps, ``gamma`` shrinking and ``sigma`` growing with
          ``gamma * sigma`` held constant.
``alg3``  constant-step variant when both primal and dual parts are strongly
          monotone; converges linearly.
``pd1``   Chambolle-Pock primal-dual iteration with extrapolation ``theta = 1``.
``pd2``   Chambolle-Pock accelerated iteration for a strongly convex primal term.
"""
from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (ConfigError, DimensionError, DivergenceError, ProblemSpec,
                   UnsupportedConfigurationError, all_finite, beta, dual_sq_dist,
                   lipschitz_sum_sq)

VARIANTS = ("alg1", "alg2", "alg3", "pd1", "pd2")

LOG_COLUMNS = ("iter", "gamma", "sigma", "objective", "gap", "dist_to_ref",
               "residual_primal", "residual_dual", "wall_ms")


@dataclass
class SolverConfig:
    """Run parameters.

    ``gamma0`` is the constant step of ``alg1``/``alg3``, the initial primal
    step of ``alg2`` and the initial primal step ``tau`` of ``pd1``/``pd2``.
    ``rho`` and ``tau`` override the moduli stored on the problem.
    ``gamma_schedule`` (``alg1`` only) maps the iteration index to a step.
    ``tol`` stops the run once the RMSE to the reference drops below it.
    ``output`` picks the iterate whose objective is logged and that
    :meth:`SolveResult.primal` returns: ``"x"``, ``"p1"`` or ``"ergodic"``.
    """

    variant: str = "alg1"
    max_iters: int = 1000
    eps: float = 1e-4
    gamma0: Optional[float] = None
    sigma0: Optional[float] = None
    gamma_schedule: Optional[Callable[[int], float]] = None
    rho: Optional[float] = None
    tau: Optional[Sequence[float]] = None
    tol: Optional[float] = None
    output: str = "x"
    threads: int = 1
    timing: bool = True
    gap_every: int = 1

    def __post_init__(self):
        self.variant = self.variant.lower()
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}; choose from {VARIANTS}")
        if self.max_iters < 0:
            raise ConfigError("max_iters must be >= 0")
        if self.output not in ("x", "p1", "ergodic"):
            raise ConfigError("output must be 'x', 'p1' or 'ergodic'")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.gap_every < 1:
            raise ConfigError("gap_every must be >= 1")


@dataclass(frozen=True)
class IterateState:
    x: np.ndarray
    v: tuple
    gamma: float
    sigma: float
    n: int = 0
    theta: float = 1.0
    p1: Optional[np.ndarray] = None
    p2: Optional[tuple] = None
    sum_p1: Optional[np.ndarray] = None
    sum_p2: Optional[tuple] = None
    xbar: Optional[np.ndarray] = None


@dataclass(frozen=True)
class StepSizes:
    """Resolved step parameters for one run."""

    gamma0: float
    sigma0: float
    rho: float = 0.0
    rho_min: float = 0.0
    beta: float = 0.0
    eps: float = 0.0
    upper: float = math.inf


def initial_state(spec: ProblemSpec, x0=None, v0=None, gamma0=1.0, sigma0=1.0) -> IterateState:
    x = spec.zeros_primal() if x0 is None else spec.check_primal(x0).copy()
    v = spec.zeros_dual() if v0 is None else [b.copy() for b in spec.check_dual(v0)]
    return IterateState(x=x, v=tuple(v), gamma=float(gamma0), sigma=float(sigma0),
                        sum_p1=np.zeros(spec.n), sum_p2=tuple(np.zeros(d) for d in spec.dual_dims),
                        xbar=x.copy())


# -- step-size rules ----------------------------------------------------------

def alg2_gamma0_bound(rho: float, mu: float) -> float:
    """Upper end of the admissible initial step: ``min{1, sqrt(1+4rho) / (2(1+2rho)mu)}``.

    With ``mu = 0`` the second term is vacuous.
    """
    if mu == 0:
        return 1.0
    return min(1.0, math.sqrt(1 + 4 * rho) / (2 * (1 + 2 * rho) * mu))


def alg2_sigma0(gamma0: float, rho: float, lsum_sq: float) -> float:
    return 1.0 / (2 * gamma0 * (1 + 2 * rho) * lsum_sq)


def alg2_theta(gamma: float, rho: float) -> float:
    return 1.0 / math.sqrt(1 + 2 * rho * gamma * (1 - gamma))


def alg3_gamma_bound(rho_min: float, lsum_sq: float, lip: float) -> float:
    """``1 / (sqrt(1 + 2 rho_min) (sqrt(sum ||L_i||^2) + max{mu, nu_i}))``."""
    denom = math.sqrt(1 + 2 * rho_min) * (math.sqrt(lsum_sq) + lip)
    return math.inf if denom == 0 else 1.0 / denom


def gamma_schedule_alg2(gamma0: float, rho: float, n_max: int) -> np.ndarray:
    """The sequence ``gamma_{k+1} = gamma_k / sqrt(1 + 2 rho gamma_k (1 - gamma_k))``, k <= n_max."""
    if not 0 < gamma0 < 1:
        raise ConfigError("gamma0 must lie in (0, 1)")
    if not rho > 0:
        raise ConfigError("rho must be positive")
    out = np.empty(n_max + 1)
    g = float(gamma0)
    for k in range(n_max + 1):
        out[k] = g
        g = g / math.sqrt(1 + 2 * rho * g * (1 - g))
    return out


def _moduli(spec, config):
    rho = spec.rho if config.rho is None else float(config.rho)
    tau = spec.tau if config.tau is None else tuple(float(t) for t in config.tau)
    if len(tau) != spec.m:
        raise ConfigError("need one tau per dual block")
    return rho, tau


def _no_forward(spec, variant):
    if any(blk.forward is not None for blk in spec.blocks):
        raise UnsupportedConfigurationError(f"{variant} requires every dual forward operator to be zero")


def resolve_steps(spec: ProblemSpec, config: SolverConfig) -> StepSizes:
    """Validate ``config`` against ``spec`` and compute the initial step sizes."""
    v = config.variant
    lsum = lipschitz_sum_sq(spec)
    rho, tau = _moduli(spec, config)
    if v == "alg1":
        b = beta(spec)
        if not 0 < config.eps < 1 / (b + 1):
            raise ConfigError(f"eps must lie in (0, 1/(beta+1)) = (0, {1 / (b + 1):.6g})")
        upper = (1 - config.eps) / b if b > 0 else math.inf
        g0 = config.gamma0
        if g0 is None:
            if config.gamma_schedule is not None:
                g0 = float(config.gamma_schedule(0))
            elif b > 0:
                g0 = upper
            else:
                raise ConfigError("beta = 0: give gamma0 explicitly")
        _check_alg1_gamma(g0, config.eps, upper, 0)
        return StepSizes(gamma0=g0, sigma0=g0, beta=b, eps=config.eps, upper=upper)
    if v == "alg2":
        _no_forward(spec, v)
        if not rho > 0:
            raise ConfigError("alg2 needs a positive strong-monotonicity modulus rho")
        bound = alg2_gamma0_bound(rho, spec.mu)
        g0 = config.gamma0
        if g0 is None:
            g0 = bound if bound < 1 else 0.5
        # the closed upper end is admitted when it is below 1 (it is the value used in practice)
        if not (0 < g0 < 1 and g0 <= bound):
            raise ConfigError(f"alg2 gamma0 must lie in (0, {bound:.6g}]" + (")" if bound == 1 else ""))
        if config.sigma0 is not None:
            s0 = float(config.sigma0)
        else:
            s0 = alg2_sigma0(g0, rho, lsum) if lsum > 0 else 1.0
        return StepSizes(gamma0=g0, sigma0=s0, rho=rho)
    if v == "alg3":
        if not rho > 0 or any(not t > 0 for t in tau):
            raise ConfigError("alg3 needs rho > 0 and every tau_i > 0")
        rho_min = min((rho,) + tuple(tau))
        lip = max([spec.mu] + [blk.nu for blk in spec.blocks])
        bound = alg3_gamma_bound(rho_min, lsum, lip)
        g0 = config.gamma0
        if g0 is None:
            g0 = bound if bound < 1 else 1 - config.eps
        if not (0 < g0 < 1 and g0 <= bound):
            raise ConfigError(f"alg3 gamma must lie in (0, 1) and be <= {bound:.6g}, got {g0!r}")
        return StepSizes(gamma0=g0, sigma0=g0, rho=rho, rho_min=rho_min, upper=bound)
    # Chambolle-Pock baselines
    if spec.m != 1:
        raise UnsupportedConfigurationError(f"{v} supports exactly one dual block, got {spec.m}")
    _no_forward(spec, v)
    if spec.prox_objective is None and spec.grad_h is not None:
        raise UnsupportedConfigurationError(
            f"{v} needs prox_objective (prox of f + h - <., z>) when h is present")
    lnorm = spec.blocks[0].linop.norm_bound
    if lnorm == 0:
        raise ConfigError("operator norm bound is zero")
    t0 = 1.0 / lnorm if config.gamma0 is None else float(config.gamma0)
    s0 = 1.0 / (t0 * lnorm ** 2) if config.sigma0 is None else float(config.sigma0)
    if not (t0 > 0 and s0 > 0) or t0 * s0 * lnorm ** 2 > 1 + 1e-12:
        raise ConfigError("Chambolle-Pock steps need tau*sigma*||L||^2 <= 1")
    if v == "pd2" and not rho > 0:
        raise ConfigError("pd2 needs a positive strong-convexity modulus rho")
    return StepSizes(gamma0=t0, sigma0=s0, rho=rho)


def _check_alg1_gamma(g, eps, upper, n):
    if not eps <= g <= upper:
        raise ConfigError(f"alg1 step gamma_{n}={g!r} leaves [{eps!r}, {upper!r}]")


# -- one iteration ------------------------------------------------------------

def _map_blocks(fn, m, executor):
    if executor is None or m < 2:
        return [fn(i) for i in range(m)]
    return list(executor.map(fn, range(m)))


def _fbf_step(spec: ProblemSpec, state: IterateState, gp: float, gd: float, executor=None):
    x, v = state.x, state.v
    Ltv = spec.apply_Lt(v)
    ghx = spec.grad_h(x) if spec.grad_h is not None else None
    arg = x - gp * Ltv
    if ghx is not None:
        arg = arg - gp * ghx
    if spec.z is not None:
        arg = arg + gp * spec.z
    p1 = spec.prox_f(arg, gp)
    dx = p1 - x

    def dual(i):
        blk = spec.blocks[i]
        vi = v[i]
        w = blk.linop.apply(x)
        if blk.shift is not None:
            w = w - blk.shift
        fv = blk.forward(vi) if blk.forward is not None else None
        if fv is not None:
            w = w - fv
        p2i = blk.prox_conj(vi + gd * w, gd)
        vnew = gd * blk.linop.apply(dx) + p2i
        if fv is not None:
            vnew = vnew + gd * (fv - blk.forward(p2i))
        return p2i, vnew

    res = _map_blocks(dual, spec.m, executor)
    p2 = tuple(r[0] for r in res)
    vnew = tuple(r[1] for r in res)
    xnew = p1 + gp * spec.apply_Lt([vi - pi for vi, pi in zip(v, p2)])
    if ghx is not None:
        xnew = xnew + gp * (ghx - spec.grad_h(p1))
    return p1, p2, xnew, vnew


def _advance(state, p1, p2, xnew, vnew, **kw):
    sum_p1 = state.sum_p1 + p1 if state.sum_p1 is not None else p1.copy()
    if state.sum_p2 is not None:
        sum_p2 = tuple(a + b for a, b in zip(state.sum_p2, p2))
    else:
        sum_p2 = tuple(b.copy() for b in p2)
    n = state.n + 1
    if not all_finite(xnew, vnew) or not all_finite(p1, p2):
        raise DivergenceError(n)
    return replace(state, x=xnew, v=vnew, p1=p1, p2=p2, sum_p1=sum_p1, sum_p2=sum_p2, n=n, **kw)


def step_alg1(spec: ProblemSpec, state: IterateState, executor=None) -> IterateState:
    """One forward-backward-forward iteration with step ``state.gamma``."""
    g = state.gamma
    p1, p2, xnew, vnew = _fbf_step(spec, state, g, g, executor)
    return _advance(state, p1, p2, xnew, vnew)


def step_alg3(spec: ProblemSpec, state: IterateState, executor=None) -> IterateState:
    """Same stencil as :func:`step_alg1`; the caller keeps ``gamma`` fixed."""
    return step_alg1(spec, state, executor)


def step_alg2(spec: ProblemSpec, state: IterateState, rho: float, executor=None) -> IterateState:
    """Accelerated iteration: primal step ``gamma_n``, dual step ``sigma_n``, then
    ``theta_n = 1/sqrt(1 + 2 rho gamma_n (1 - gamma_n))``,
    ``gamma_{n+1} = theta_n gamma_n`` and ``sigma_{n+1} = sigma_n / theta_n``."""
    _no_forward(spec, "alg2")
    p1, p2, xnew, vnew = _fbf_step(spec, state, state.gamma, state.sigma, executor)
    theta = alg2_theta(state.gamma, rho)
    return _advance(state, p1, p2, xnew, vnew, theta=theta,
                    gamma=theta * state.gamma, sigma=state.sigma / theta)


def _prox_objective(spec):
    if spec.prox_objective is not None:
        return spec.prox_objective
    if spec.grad_h is not None:
        raise UnsupportedConfigurationError("prox_objective required when h is present")
    if spec.z is None:
        return spec.prox_f
    z = spec.z
    return lambda x, t: spec.prox_f(x + t * z, t)


def _cp_step(spec, state, rho):
    if spec.m != 1:
        raise UnsupportedConfigurationError("Chambolle-Pock steps support exactly one dual block")
    blk = spec.blocks[0]
    tau, sigma = state.gamma, state.sigma
    xbar = state.xbar if state.xbar is not None else state.x
    w = blk.linop.apply(xbar)
    if blk.shift is not None:
        w = w - blk.shift
    y = blk.prox_conj(state.v[0] + sigma * w, sigma)
    x = _prox_objective(spec)(state.x - tau * blk.linop.adjoint(y), tau)
    if rho is None:
        theta, tau_next, sigma_next = 1.0, tau, sigma
    else:
        theta = 1.0 / math.sqrt(1 + 2 * rho * tau)
        tau_next, sigma_next = theta * tau, sigma / theta
    xbar_next = x + theta * (x - state.x)
    return _advance(state, x, (y,), x, (y,), theta=theta, gamma=tau_next,
                    sigma=sigma_next, xbar=xbar_next)


def step_pd1(spec: ProblemSpec, state: IterateState) -> IterateState:
    """Chambolle-Pock iteration with steps ``tau = state.gamma``, ``sigma = state.sigma``."""
    return _cp_step(spec, state, None)


def step_pd2(spec: ProblemSpec, state: IterateState, rho: float) -> IterateState:
    """Accelerated Chambolle-Pock iteration; ``rho`` is the primal strong-convexity modulus."""
    return _cp_step(spec, state, rho)


def ergodic_average(state: IterateState, N: Optional[int] = None):
    """Averages ``(1/N) sum_{k<N} p_{1,k}`` and ``(1/N) sum_{k<N} p_{2,k}``.

    Only running sums are kept, so ``N`` must equal the number of iterations run.
    """
    if N is None:
        N = state.n
    if N < 1:
        raise ConfigError("ergodic average needs N >= 1")
    if N != state.n:
        raise ConfigError(f"running sums cover {state.n} iterations, cannot average over N={N}")
    return state.sum_p1 / N, [s / N for s in state.sum_p2]


# -- restricted primal-dual gap ---------------------------------------------

class Box:
    """Box ``[lo, hi]`` (scalars broadcast)."""

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        if np.any(self.lo > self.hi):
            raise ConfigError("box needs lo <= hi")

    def support(self, w):
        return float(np.maximum(w * self.lo, w * self.hi).sum())

    def farthest_sq(self, p):
        return float(np.maximum((p - self.lo) ** 2, (p - self.hi) ** 2).sum())

    def project(self, p):
        return np.clip(p, self.lo, self.hi)


class PairBall:
    """Product over pixels of Euclidean discs of radius ``radius`` on a ``[p ; q]`` block."""

    def __init__(self, radius):
        if not radius > 0:
            raise ConfigError("radius must be positive")
        self.radius = float(radius)

    @staticmethod
    def _mag(w):
        h = w.size // 2
        return np.hypot(w[:h], w[h:])

    def support(self, w):
        return self.radius * float(self._mag(w).sum())

    def farthest_sq(self, p):
        return float(((self._mag(p) + self.radius) ** 2).sum())

    def project(self, p):
        h = p.size // 2
        s = np.maximum(1.0, self._mag(p) / self.radius)
        return np.concatenate([p[:h] / s, p[h:] / s])


class Singleton:
    def __init__(self, point):
        self.point = np.asarray(point, dtype=float)

    def support(self, w):
        return float(np.dot(w, self.point))

    def farthest_sq(self, p):
        return float(np.sum((p - self.point) ** 2))

    def project(self, p):
        return self.point.copy()


@dataclass
class GapSpec:
    """Pieces needed to evaluate the gap restricted to ``B1 x B2``.

    ``primal_value`` evaluates ``F = f + h - <., z>``.  On ``B1`` it must be
    either affine (give ``primal_affine = (a, c)`` meaning ``<a, x> + c``) or
    smooth with gradient ``primal_grad`` and Lipschitz constant
    ``primal_lipschitz``.  ``dual_value`` evaluates ``G^*(v)``; on ``B2`` it must
    equal ``sum_i <c_i, v_i>`` with ``c_i = dual_linear[i]`` (zeros if None).
    """

    problem: ProblemSpec
    primal_set: object
    dual_sets: Sequence[object]
    primal_value: Callable[[np.ndarray], float]
    dual_value: Callable[[Sequence[np.ndarray]], float]
    primal_grad: Optional[Callable[[np.ndarray], np.ndarray]] = None
    primal_lipschitz: float = 0.0
    primal_affine: Optional[tuple] = None
    dual_linear: Optional[Sequence[Optional[np.ndarray]]] = None
    inner_tol: float = 1e-10
    inner_max_iters: int = 100_000

    def __post_init__(self):
        if len(self.dual_sets) != self.problem.m:
            raise ConfigError("need one dual set per block")
        if self.primal_affine is None and self.primal_grad is None:
            raise ConfigError("give primal_affine or primal_grad")
        for s in [self.primal_set, *self.dual_sets]:
            if not all(hasattr(s, a) for a in ("support", "farthest_sq", "project")):
                raise ConfigError(f"unsupported set shape {type(s).__name__}")


def _inner_inf(gs: GapSpec, c: np.ndarray) -> float:
    """``inf_{x in B1} <c, x> + F(x)``."""
    B1 = gs.primal_set
    if gs.primal_affine is not None:
        a, c0 = gs.primal_affine
        return -B1.support(-(np.asarray(a, dtype=float) + c)) + float(c0)
    if not gs.primal_lipschitz > 0:
        raise ConfigError("primal_lipschitz must be positive for the inner solver")
    step = 1.0 / gs.primal_lipschitz
    x = B1.project(np.zeros(gs.problem.n))
    for _ in range(gs.inner_max_iters):
        xn = B1.project(x - step * (gs.primal_grad(x) + c))
        done = np.linalg.norm(xn - x) <= gs.inner_tol * max(1.0, np.linalg.norm(x))
        x = xn
        if done:
            break
    return float(np.dot(c, x)) + float(gs.primal_value(x))


def restricted_gap(gs: GapSpec, x, v) -> float:
    """Primal-dual gap of ``(x, v)`` restricted to ``B1 x B2``."""
    spec = gs.problem
    x = spec.check_primal(x)
    v = spec.check_dual(v)
    Fx = float(gs.primal_value(x))
    Gv = float(gs.dual_value(v))
    if not (math.isfinite(Fx) and math.isfinite(Gv)):
        return math.inf
    lin = gs.dual_linear or [None] * spec.m
    sup = 0.0
    rv = 0.0
    for blk, Bi, ci, vi in zip(spec.blocks, gs.dual_sets, lin, v):
        w = blk.linop.apply(x)
        if blk.shift is not None:
            w = w - blk.shift
            rv += float(np.dot(blk.shift, vi))
        if ci is not None:
            w = w - ci
        sup += Bi.support(w)
    inf = _inner_inf(gs, spec.apply_Lt(v))
    return sup + Fx - (inf - rv - Gv)


def gap_constant(gs: GapSpec, x0, v0, gamma0: float) -> float:
    """``sup over B1 x B2 of (||x0 - x||^2 + sum_i ||v_i0 - v_i||^2) / (2 gamma0)``."""
    spec = gs.problem
    x0 = spec.check_primal(x0)
    v0 = spec.check_dual(v0)
    tot = gs.primal_set.farthest_sq(x0)
    tot += sum(B.farthest_sq(vi) for B, vi in zip(gs.dual_sets, v0))
    return tot / (2.0 * gamma0)


# -- convergence log ------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


@dataclass
class ConvergenceLog:
    """Per-iteration records; row ``k`` describes the state after iteration ``k + 1``.

    ``gamma``/``sigma`` are the step sizes attached to the new iterate (the
    ones the next iteration uses).  ``residual_primal`` is ``||x_n - p_{1,n}||^2``
    and ``residual_dual`` is ``sum_i ||v_{i,n} - p_{2,i,n}||^2``.  ``gap`` is
    evaluated at the ergodic average of the first ``iter`` prox points.
    Missing values are NaN.
    """

    rows: dict = field(default_factory=lambda: {c: [] for c in LOG_COLUMNS})
    dist_x_sq: list = field(default_factory=list)
    dist_v_sq: list = field(default_factory=list)
    initial: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.rows["iter"])

    def append(self, **values):
        for c in LOG_COLUMNS:
            self.rows[c].append(values.get(c, math.nan))

    def column(self, name: str) -> np.ndarray:
        if name in self.rows:
            return np.asarray(self.rows[name], dtype=float)
        if name in ("dist_x_sq", "dist_v_sq"):
            return np.asarray(getattr(self, name), dtype=float)
        raise KeyError(name)

    @property
    def iters(self) -> np.ndarray:
        return np.asarray(self.rows["iter"], dtype=int)

    def to_csv(self, path_or_buf=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(LOG_COLUMNS)
        for k in range(len(self)):
            w.writerow([_fmt(self.rows[c][k]) for c in LOG_COLUMNS])
        text = buf.getvalue()
        if path_or_buf is not None:
            if hasattr(path_or_buf, "write"):
                path_or_buf.write(text)
            else:
                with open(path_or_buf, "w", newline="") as fh:
                    fh.write(text)
        return text

    @classmethod
    def from_csv(cls, path_or_buf) -> "ConvergenceLog":
        if hasattr(path_or_buf, "read"):
            text = path_or_buf.read()
        else:
            with open(path_or_buf, newline="") as fh:
                text = fh.read()
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if tuple(header) != LOG_COLUMNS:
            raise ValueError(f"unexpected CSV header {header}")
        log = cls()
        for row in reader:
            vals = {c: (int(s) if c == "iter" else float(s)) for c, s in zip(header, row)}
            log.append(**vals)
        return log


@dataclass
class SolveResult:
    state: IterateState
    log: ConvergenceLog
    converged: bool
    best: IterateState
    steps: Optional[StepSizes] = None
    output: str = "x"

    def primal(self, which: Optional[str] = None) -> np.ndarray:
        return _output_iterate(self.state, which or self.output)

    @property
    def n_iter(self) -> int:
        return self.state.n


def _output_iterate(state, which):
    if which == "x" or state.n == 0:
        return state.x
    if which == "p1":
        return state.p1
    return state.sum_p1 / state.n


def _rmse(a, b):
    return float(np.sqrt(np.mean((a - b) ** 2)))


def solve(spec: ProblemSpec, config: SolverConfig, x0=None, v0=None, *,
          objective: Optional[Callable[[np.ndarray], float]] = None,
          gap: Optional[GapSpec] = None, reference=None,
          callbacks: Sequence[Callable[[IterateState], None]] = ()) -> SolveResult:
    """Run ``config.variant`` from ``(x0, v0)``.

    ``reference`` is ``x_ref`` or ``(x_ref, v_ref)``; it feeds the
    ``dist_to_ref`` column (RMSE), the squared-distance series used by the
    bound checks, and the ``tol`` stopping rule.  Callbacks receive each new
    (immutable) state.
    """
    steps = resolve_steps(spec, config)
    state = initial_state(spec, x0, v0, steps.gamma0, steps.sigma0)
    x_ref = v_ref = None
    if reference is not None:
        if isinstance(reference, tuple):
            x_ref, v_ref = reference
            v_ref = spec.check_dual(v_ref) if v_ref is not None else None
        else:
            x_ref = reference
        x_ref = spec.check_primal(x_ref)
    if config.tol is not None and x_ref is None:
        raise ConfigError("tol needs a reference solution")
    log = ConvergenceLog()
    if x_ref is not None:
        log.initial["dist_x_sq"] = float(np.sum((state.x - x_ref) ** 2))
        if v_ref is not None:
            log.initial["dist_v_sq"] = dual_sq_dist(state.v, v_ref)
    log.initial.update(gamma=state.gamma, sigma=state.sigma)

    executor = ThreadPoolExecutor(config.threads) if config.threads > 1 and spec.m > 1 else None
    v = config.variant
    best, best_dist = state, math.inf
    converged = False
    t_start = time.perf_counter()
    try:
        for k in range(config.max_iters):
            prev = state
            if v == "alg1":
                if config.gamma_schedule is not None:
                    g = float(config.gamma_schedule(k))
                    _check_alg1_gamma(g, steps.eps, steps.upper, k)
                    if g < prev.gamma and k > 0:
                        raise ConfigError(f"alg1 step sequence must be nondecreasing (n={k})")
                    prev = replace(prev, gamma=g, sigma=g)
                state = step_alg1(spec, prev, executor)
            elif v == "alg2":
                state = step_alg2(spec, prev, steps.rho, executor)
            elif v == "alg3":
                state = step_alg3(spec, prev, executor)
            elif v == "pd1":
                state = step_pd1(spec, prev)
            else:
                state = step_pd2(spec, prev, steps.rho)

            rec = {"iter": state.n, "gamma": state.gamma, "sigma": state.sigma,
                   "residual_primal": float(np.sum((prev.x - state.p1) ** 2)),
                   "residual_dual": dual_sq_dist(prev.v, state.p2)}
            out = _output_iterate(state, config.output)
            if objective is not None:
                rec["objective"] = float(objective(out))
            if gap is not None and (state.n % config.gap_every == 0):
                xe, ve = ergodic_average(state)
                rec["gap"] = restricted_gap(gap, xe, ve)
            dist = math.inf
            if x_ref is not None:
                dist = _rmse(state.x, x_ref)
                rec["dist_to_ref"] = dist
                log.dist_x_sq.append(float(np.sum((state.x - x_ref) ** 2)))
                if v_ref is not None:
                    log.dist_v_sq.append(dual_sq_dist(state.v, v_ref))
            if config.timing:
                rec["wall_ms"] = (time.perf_counter() - t_start) * 1e3
            log.append(**rec)
            for cb in callbacks:
                cb(state)
            if dist <= best_dist:
                best, best_dist = state, dist
            if config.tol is not None and dist < config.tol:
                converged = True
                break
    finally:
        if executor is not None:
            executor.shutdown()
    if x_ref is None:
        best = state
    return SolveResult(state=state, log=log, converged=converged, best=best, steps=steps,
                       output=config.output)
