"""Iterations-to-tolerance comparison of the denoising solvers."""
from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .imaging import DenoiseTask, build_denoise
from .solvers import SolverConfig, solve

# modulus the accelerated schemes are run with in the comparison
BENCH_RHO = 0.3


@dataclass(frozen=True)
class BenchRow:
    algorithm: str
    tolerance: float
    iterations: Optional[int]
    seconds: float

    def as_csv_row(self):
        its = "" if self.iterations is None else str(self.iterations)
        return [self.algorithm, repr(self.tolerance), its, repr(self.seconds)]


BENCH_COLUMNS = ("algorithm", "tolerance", "iterations", "seconds")


def _cache_key(task: DenoiseTask, iters: int) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(task.b).tobytes())
    h.update(repr((task.b.shape, task.lam, task.flavor, iters, "alg2-rho1")).encode())
    return h.hexdigest()[:24]


def reference_solution(task: DenoiseTask, iters: int = 50_000,
                       cache_dir: Optional[os.PathLike] = None) -> np.ndarray:
    """High-accuracy minimizer from an accelerated run with the certified modulus 1."""
    path = None
    if cache_dir is not None:
        path = Path(cache_dir) / f"denoise_ref_{_cache_key(task, iters)}.npy"
        if path.exists():
            return np.load(path)
    spec = build_denoise(task)
    cfg = SolverConfig(variant="alg2", max_iters=iters, rho=1.0, timing=False)
    x = solve(spec, cfg, x0=task.b.ravel()).state.x
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        np.save(path, x)
    return x


def iterations_to_tolerance(task: DenoiseTask, algorithm: str, tolerances: Sequence[float],
                            reference: np.ndarray, max_iters: int = 20_000,
                            rho: float = BENCH_RHO, threads: int = 1) -> list[BenchRow]:
    """First iteration whose last iterate has RMSE to ``reference`` below each tolerance.

    One run per algorithm, stopped at the smallest tolerance.
    """
    spec = build_denoise(task)
    needs_rho = algorithm in ("alg2", "pd2")
    cfg = SolverConfig(variant=algorithm, max_iters=max_iters, rho=rho if needs_rho else None,
                       tol=min(tolerances), threads=threads, timing=True)
    res = solve(spec, cfg, x0=task.b.ravel(), reference=reference)
    dist = res.log.column("dist_to_ref")
    wall = res.log.column("wall_ms")
    rows = []
    for tol in tolerances:
        hit = np.flatnonzero(dist < tol)
        if hit.size:
            k = int(hit[0])
            rows.append(BenchRow(algorithm, tol, k + 1, float(wall[k]) / 1e3))
        else:
            rows.append(BenchRow(algorithm, tol, None, math.nan))
    return rows


def run_bench(task: DenoiseTask, algorithms: Sequence[str], tolerances: Sequence[float],
              reference_iters: int = 50_000, max_iters: int = 20_000, rho: float = BENCH_RHO,
              cache_dir=None, reference: Optional[np.ndarray] = None,
              threads: int = 1) -> list[BenchRow]:
    if reference is None:
        reference = reference_solution(task, reference_iters, cache_dir)
    rows = []
    for alg in algorithms:
        rows.extend(iterations_to_tolerance(task, alg, tolerances, reference, max_iters, rho, threads))
    return rows
