"""Problem model and vector arithmetic on the primal space R^n and the dual
product space G_1 x ... x G_m.

Dual vectors are plain lists of 1-D float arrays, one per block.  A
:class:`ProblemSpec` bundles everything the iterative schemes consume: the
proximal map of ``f``, the gradient of ``h`` (Lipschitz constant ``mu``), the
linear term ``z`` and the dual blocks ``(prox of g_i^*, L_i, r_i, grad l_i^*)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

ProxMap = Callable[[np.ndarray, float], np.ndarray]
GradMap = Callable[[np.ndarray], np.ndarray]


class PDSplitError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(PDSplitError, ValueError):
    """Array shapes do not match the declared spaces."""


class ConfigError(PDSplitError, ValueError):
    """Solver or problem parameters violate a step-size or model constraint."""


class UnsupportedConfigurationError(ConfigError):
    """The selected scheme cannot handle this problem structure."""


class DivergenceError(PDSplitError, FloatingPointError):
    """An iterate became non-finite."""

    def __init__(self, iteration: int, where: str = "iterate"):
        self.iteration = iteration
        self.where = where
        super().__init__(f"non-finite {where} at iteration {iteration}")


class LinearOp:
    """Linear operator given by an apply/adjoint pair.

    ``norm_bound`` must be an upper bound of the operator norm; step-size rules
    trust it without checking.
    """

    def __init__(self, apply: Callable[[np.ndarray], np.ndarray],
                 adjoint: Callable[[np.ndarray], np.ndarray],
                 in_dim: int, out_dim: int, norm_bound: float):
        if norm_bound < 0:
            raise ConfigError("norm_bound must be nonnegative")
        self._apply = apply
        self._adjoint = adjoint
        self.in_dim = int(in_dim)
        self.out_dim = int(out_dim)
        self.norm_bound = float(norm_bound)

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.in_dim,):
            raise DimensionError(f"expected input of shape ({self.in_dim},), got {x.shape}")
        return self._apply(x)

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape != (self.out_dim,):
            raise DimensionError(f"expected input of shape ({self.out_dim},), got {y.shape}")
        return self._adjoint(y)

    def __call__(self, x):
        return self.apply(x)

    def __repr__(self):
        return (f"{type(self).__name__}(in_dim={self.in_dim}, out_dim={self.out_dim}, "
                f"norm_bound={self.norm_bound:g})")


class MatrixOp(LinearOp):
    """Dense matrix as a :class:`LinearOp`; the norm bound defaults to the spectral norm."""

    def __init__(self, matrix, norm_bound: Optional[float] = None):
        self.matrix = np.array(matrix, dtype=float)
        if self.matrix.ndim != 2:
            raise DimensionError("matrix must be 2-D")
        if norm_bound is None:
            # inflate by a few ulps so the bound stays valid after rounding
            norm_bound = float(np.linalg.norm(self.matrix, 2)) * (1 + 1e-12)
        m, n = self.matrix.shape
        super().__init__(self.matrix.dot, self.matrix.T.dot, n, m, norm_bound)


@dataclass(frozen=True)
class DualBlock:
    """One dual block: prox of g_i^*, linear map L_i, shift r_i, optional grad l_i^*."""

    prox_conj: ProxMap
    linop: LinearOp
    shift: Optional[np.ndarray] = None
    forward: Optional[GradMap] = None
    nu: float = 0.0

    def __post_init__(self):
        if self.nu < 0:
            raise ConfigError("nu must be nonnegative")
        if self.forward is None and self.nu != 0:
            raise ConfigError("nu given without a forward operator")
        if self.shift is not None:
            shift = np.asarray(self.shift, dtype=float)
            if shift.shape != (self.linop.out_dim,):
                raise DimensionError(
                    f"shift has shape {shift.shape}, block dimension is {self.linop.out_dim}")
            object.__setattr__(self, "shift", shift)

    @property
    def dim(self) -> int:
        return self.linop.out_dim


@dataclass(frozen=True)
class ProblemSpec:
    """Data of the structured primal-dual problem.

    ``prox_objective`` is optional: the proximal map of the whole primal term
    ``f + h - <., z>``.  Only the Chambolle-Pock baselines need it.
    """

    n: int
    prox_f: ProxMap
    blocks: Sequence[DualBlock] = ()
    grad_h: Optional[GradMap] = None
    mu: float = 0.0
    z: Optional[np.ndarray] = None
    rho: float = 0.0
    tau: Optional[Sequence[float]] = None
    prox_objective: Optional[ProxMap] = None

    def __post_init__(self):
        if self.mu < 0:
            raise ConfigError("mu must be nonnegative")
        if self.grad_h is None and self.mu != 0:
            raise ConfigError("mu given without grad_h")
        if self.rho < 0:
            raise ConfigError("rho must be nonnegative")
        object.__setattr__(self, "blocks", tuple(self.blocks))
        for i, blk in enumerate(self.blocks):
            if blk.linop.in_dim != self.n:
                raise DimensionError(
                    f"block {i}: operator input dimension {blk.linop.in_dim} != n={self.n}")
        if self.z is not None:
            z = np.asarray(self.z, dtype=float)
            if z.shape != (self.n,):
                raise DimensionError(f"z has shape {z.shape}, expected ({self.n},)")
            object.__setattr__(self, "z", z)
        tau = tuple(float(t) for t in self.tau) if self.tau is not None else (0.0,) * len(self.blocks)
        if len(tau) != len(self.blocks):
            raise ConfigError("need one tau per dual block")
        if any(t < 0 for t in tau):
            raise ConfigError("tau entries must be nonnegative")
        object.__setattr__(self, "tau", tau)

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def dual_dims(self) -> list[int]:
        return [blk.dim for blk in self.blocks]

    def zeros_primal(self) -> np.ndarray:
        return np.zeros(self.n)

    def zeros_dual(self) -> list[np.ndarray]:
        return [np.zeros(d) for d in self.dual_dims]

    def apply_L(self, x: np.ndarray) -> list[np.ndarray]:
        return [blk.linop.apply(x) for blk in self.blocks]

    def apply_Lt(self, v: Sequence[np.ndarray]) -> np.ndarray:
        """Sum of L_i^* v_i, accumulated in block order."""
        out = np.zeros(self.n)
        for blk, vi in zip(self.blocks, v):
            out += blk.linop.adjoint(vi)
        return out

    def check_primal(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionError(f"primal vector has shape {x.shape}, expected ({self.n},)")
        return x

    def check_dual(self, v) -> list[np.ndarray]:
        if len(v) != self.m:
            raise DimensionError(f"dual vector has {len(v)} blocks, expected {self.m}")
        out = []
        for i, (vi, d) in enumerate(zip(v, self.dual_dims)):
            vi = np.asarray(vi, dtype=float)
            if vi.shape != (d,):
                raise DimensionError(f"dual block {i} has shape {vi.shape}, expected ({d},)")
            out.append(vi)
        return out


def lipschitz_sum_sq(spec: ProblemSpec) -> float:
    """Sum of squared operator-norm bounds, sum_i ||L_i||^2."""
    return float(sum(blk.linop.norm_bound ** 2 for blk in spec.blocks))


def beta(spec: ProblemSpec) -> float:
    """max{mu, nu_1, ..., nu_m} + sqrt(sum_i ||L_i||^2)."""
    lip = max([spec.mu] + [blk.nu for blk in spec.blocks])
    return lip + float(np.sqrt(lipschitz_sum_sq(spec)))


def _flat(u) -> np.ndarray:
    if isinstance(u, np.ndarray):
        return u.ravel()
    return np.concatenate([np.asarray(b, dtype=float).ravel() for b in u]) if len(u) else np.zeros(0)


def _check_same_structure(u, w):
    if isinstance(u, np.ndarray) != isinstance(w, np.ndarray):
        raise DimensionError("cannot mix primal and dual vectors")
    if isinstance(u, np.ndarray):
        if u.shape != w.shape:
            raise DimensionError(f"shape mismatch: {u.shape} vs {w.shape}")
        return
    if len(u) != len(w):
        raise DimensionError(f"block count mismatch: {len(u)} vs {len(w)}")
    for a, b in zip(u, w):
        if np.shape(a) != np.shape(b):
            raise DimensionError(f"block shape mismatch: {np.shape(a)} vs {np.shape(b)}")


def inner(u, w) -> float:
    """Euclidean inner product of two primal arrays or two dual block lists."""
    _check_same_structure(u, w)
    return float(np.dot(_flat(u), _flat(w)))


def norm(u) -> float:
    return float(np.sqrt(inner(u, u)))


def pair_inner(a, b) -> float:
    """Inner product on H x G for pairs ``(y, p)``."""
    return inner(a[0], b[0]) + inner(a[1], b[1])


def pair_norm(a) -> float:
    return float(np.sqrt(norm(a[0]) ** 2 + norm(a[1]) ** 2))


def dual_sq_dist(v, w) -> float:
    _check_same_structure(list(v), list(w))
    return float(sum(np.dot(a - b, a - b) for a, b in zip(v, w)))


def all_finite(x, v=()) -> bool:
    return bool(np.all(np.isfinite(x)) and all(np.all(np.isfinite(b)) for b in v))
