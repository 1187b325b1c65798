"""TV denoising, deblurring and inpainting problems, their objectives, noise
and synthetic test images."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import prox as px
from .core import ConfigError, DimensionError, DualBlock, ProblemSpec
from .linops import BlurOp, GradientOp, MaskOp, blur_apply, gaussian_kernel
from .solvers import Box, GapSpec, PairBall
from .validation import check_image, check_mask, check_positive


@dataclass(frozen=True)
class DenoiseTask:
    """``min lam * TV(x) + 1/2 ||x - b||^2``."""

    b: np.ndarray
    lam: float
    flavor: str = "aniso"

    def __post_init__(self):
        object.__setattr__(self, "b", check_image(self.b, "b"))
        check_positive(self.lam, "lam")
        if self.flavor not in ("aniso", "iso"):
            raise ConfigError("flavor must be 'aniso' or 'iso'")


@dataclass(frozen=True)
class DeblurTask:
    """``min ||A x - b||_1 + lam1 TV_iso(x) + lam2 ||x||_1`` over ``[0, 1]^n``."""

    b: np.ndarray
    kernel: np.ndarray
    lam1: float
    lam2: float

    def __post_init__(self):
        object.__setattr__(self, "b", check_image(self.b, "b"))
        k = np.asarray(self.kernel, dtype=float)
        if k.ndim != 2 or k.shape[0] != k.shape[1] or k.shape[0] % 2 == 0:
            raise ConfigError("kernel must be square with odd side")
        object.__setattr__(self, "kernel", k)
        check_positive(self.lam1, "lam1")
        check_positive(self.lam2, "lam2")


@dataclass(frozen=True)
class InpaintTask:
    """``min lam TV_iso(x) + ||K x - b||_1`` over ``[0, 1]^n``; ``mask`` is 1 where observed."""

    b: np.ndarray
    mask: np.ndarray
    lam: float

    def __post_init__(self):
        b = check_image(self.b, "b")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "mask", check_mask(self.mask, b.shape))
        check_positive(self.lam, "lam")


def build_denoise(task: DenoiseTask) -> ProblemSpec:
    """``f = 0``, ``h = 1/2||x - b||^2`` (mu = 1, 1-strongly convex), one TV block."""
    M, N = task.b.shape
    b = task.b.ravel()
    prox_conj = px.make_box(-task.lam, task.lam) if task.flavor == "aniso" else px.make_pair_ball(task.lam)
    return ProblemSpec(
        n=M * N,
        prox_f=px.make_identity(),
        grad_h=lambda x: x - b,
        mu=1.0,
        blocks=[DualBlock(prox_conj, GradientOp(M, N))],
        rho=1.0,
        prox_objective=px.make_sq_dist(b),
    )


def build_deblur(task: DeblurTask) -> ProblemSpec:
    M, N = task.b.shape
    b = task.b.ravel()
    return ProblemSpec(
        n=M * N,
        prox_f=px.make_l1_box(task.lam2, 0.0, 1.0),
        blocks=[DualBlock(px.make_box_shifted(b, -1.0, 1.0), BlurOp(task.kernel, M, N)),
                DualBlock(px.make_pair_ball(task.lam1), GradientOp(M, N))],
    )


def build_inpaint(task: InpaintTask) -> ProblemSpec:
    M, N = task.b.shape
    b = task.b.ravel()
    return ProblemSpec(
        n=M * N,
        prox_f=px.make_box(0.0, 1.0),
        blocks=[DualBlock(px.make_pair_ball(task.lam), GradientOp(M, N)),
                DualBlock(px.make_box_shifted(b, -1.0, 1.0), MaskOp(task.mask.ravel()))],
    )


def build(task) -> ProblemSpec:
    if isinstance(task, DenoiseTask):
        return build_denoise(task)
    if isinstance(task, DeblurTask):
        return build_deblur(task)
    if isinstance(task, InpaintTask):
        return build_inpaint(task)
    raise TypeError(f"unknown task type {type(task).__name__}")


def _in_unit_box(x):
    return bool(np.all(x >= 0.0) and np.all(x <= 1.0))


def objective(task, x) -> float:
    """Primal objective; ``inf`` when ``x`` leaves the unit box where the task has one."""
    M, N = task.b.shape
    x = np.asarray(x, dtype=float).ravel()
    if x.size != M * N:
        raise DimensionError(f"x has {x.size} entries, image has {M * N}")
    b = task.b.ravel()
    if isinstance(task, DenoiseTask):
        tv = px.tv_aniso(x, M, N) if task.flavor == "aniso" else px.tv_iso(x, M, N)
        return task.lam * tv + 0.5 * float(np.sum((x - b) ** 2))
    if not _in_unit_box(x):
        return math.inf
    if isinstance(task, DeblurTask):
        Ax = blur_apply(x, task.kernel, M, N)
        return (float(np.abs(Ax - b).sum()) + task.lam1 * px.tv_iso(x, M, N)
                + task.lam2 * float(np.abs(x).sum()))
    if isinstance(task, InpaintTask):
        Kx = task.mask.ravel() * x
        return task.lam * px.tv_iso(x, M, N) + float(np.abs(Kx - b).sum())
    raise TypeError(f"unknown task type {type(task).__name__}")


def denoise_gap_spec(task: DenoiseTask, spec: Optional[ProblemSpec] = None) -> GapSpec:
    """Gap restricted to ``B1 = [0, 1]^n`` and ``B2 = S``, the dual feasible set."""
    spec = spec or build_denoise(task)
    b = task.b.ravel()
    lam = task.lam
    dual_set = Box(-lam, lam) if task.flavor == "aniso" else PairBall(lam)

    def gstar(v):
        inside = np.allclose(dual_set.project(v[0]), v[0], rtol=0, atol=1e-12)
        return 0.0 if inside else math.inf

    return GapSpec(
        problem=spec,
        primal_set=Box(0.0, 1.0),
        dual_sets=[dual_set],
        primal_value=lambda x: 0.5 * float(np.sum((x - b) ** 2)),
        primal_grad=lambda x: x - b,
        primal_lipschitz=1.0,
        dual_value=gstar,
    )


# -- noise, masks, test images --------------------------------------------------

def gaussian_noise(shape, seed: int) -> np.ndarray:
    """Standard normal samples by the Box-Muller transform on PCG64 uniforms."""
    shape = tuple(np.atleast_1d(shape)) if not isinstance(shape, tuple) else shape
    count = int(np.prod(shape))
    rng = np.random.Generator(np.random.PCG64(seed))
    half = (count + 1) // 2
    u1 = 1.0 - rng.random(half)  # (0, 1], keeps the log finite
    u2 = rng.random(half)
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([r * np.cos(2 * np.pi * u2), r * np.sin(2 * np.pi * u2)])
    return z[:count].reshape(shape)


def add_noise(x, sigma: float, seed: int = 0) -> np.ndarray:
    """``x + sigma * N(0, I)``; values are not clipped."""
    if sigma < 0:
        raise ConfigError("sigma must be nonnegative")
    x = np.asarray(x, dtype=float)
    if sigma == 0:
        return x.copy()
    return x + sigma * gaussian_noise(x.shape, seed)


def random_mask(shape, drop: float, seed: int = 0) -> np.ndarray:
    """Binary mask with ``round(drop * n)`` randomly chosen zeros (lost pixels)."""
    if not 0 <= drop <= 1:
        raise ConfigError("drop must lie in [0, 1]")
    n = int(np.prod(shape))
    rng = np.random.Generator(np.random.PCG64(seed))
    lost = rng.permutation(n)[:int(round(drop * n))]
    mask = np.ones(n)
    mask[lost] = 0.0
    return mask.reshape(shape)


def blur(x, kernel) -> np.ndarray:
    X = check_image(x)
    M, N = X.shape
    return blur_apply(X.ravel(), kernel, M, N).reshape(M, N)


def synthetic_image(kind: str = "shapes", shape=(256, 256)) -> np.ndarray:
    """Deterministic grayscale test images in ``[0, 1]``.

    ``shapes``: piecewise-constant rectangles, disc and triangle on a flat
    background.  ``texture``: the same with a striped region and a smooth ramp.
    """
    M, N = shape
    if M < 2 or N < 2:
        raise DimensionError("image must be at least 2x2")
    i, j = np.mgrid[0:M, 0:N]
    u, w = i / M, j / N
    img = np.full((M, N), 0.25)
    img[(u > 0.1) & (u < 0.45) & (w > 0.12) & (w < 0.55)] = 0.8
    img[(u - 0.68) ** 2 + (w - 0.3) ** 2 < 0.2 ** 2] = 0.55
    img[(u > 0.2) & (u < 0.85) & (w > 0.62) & (w - 0.62 < (u - 0.2) * 0.5)] = 0.95
    img[(u > 0.78) & (w > 0.55) & (w < 0.95)] = 0.05
    if kind == "shapes":
        return img
    if kind == "texture":
        stripes = (u > 0.5) & (u < 0.75) & (w > 0.05) & (w < 0.45)
        img = img + 0.1 * w
        img[stripes] = 0.5 + 0.3 * np.sign(np.sin(2 * np.pi * j[stripes] / 8.0))
        return np.clip(img, 0.0, 1.0)
    raise ConfigError(f"unknown synthetic image kind {kind!r}")


def default_blur_kernel() -> np.ndarray:
    """9x9 Gaussian with standard deviation 4."""
    return gaussian_kernel(9, 4.0)
