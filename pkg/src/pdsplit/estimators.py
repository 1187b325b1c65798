"""scikit-learn style wrappers around the imaging tasks.

Each estimator restores the image passed to :meth:`fit`; ``transform(X)``
solves the restoration problem for ``X`` and returns the restored image.
Parameters follow sklearn conventions so ``get_params``/``set_params``,
``clone`` and grid search work.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .imaging import (DeblurTask, DenoiseTask, InpaintTask, build, gaussian_kernel,
                      objective)
from .solvers import SolverConfig, solve
from .validation import check_image

# strong-convexity modulus used for the accelerated schemes on denoising by default
DENOISE_RHO = 0.3


class _Restoration(TransformerMixin, BaseEstimator):
    _default_output = "x"

    def _config(self, rho=None):
        return SolverConfig(variant=self.algorithm, max_iters=self.max_iter,
                            gamma0=self.gamma0, rho=rho, tol=self.tol,
                            output=self.output or self._default_output,
                            threads=self.threads, timing=self.timing)

    def _run(self, task, x0, reference=None, rho=None):
        spec = build(task)
        if reference is not None:
            reference = np.asarray(reference, dtype=float).ravel()
        res = solve(spec, self._config(rho), x0=x0.ravel(),
                    objective=lambda x: objective(task, x), reference=reference)
        self.task_ = task
        self.result_ = res
        self.log_ = res.log
        self.n_iter_ = res.n_iter
        self.converged_ = res.converged
        self.restored_ = res.primal().reshape(task.b.shape).copy()
        self.objective_ = objective(task, self.restored_)
        return self

    def transform(self, X, **fit_params):
        return self.fit(X, **fit_params).restored_

    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X, y, **fit_params).restored_

    def _check_fitted(self):
        if not hasattr(self, "restored_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted yet")


class TVDenoiser(_Restoration):
    """``min lam * TV(x) + 1/2 ||x - X||^2``.

    ``rho`` is the modulus handed to ``alg2``/``pd2``; ``None`` means 0.3.
    """

    def __init__(self, lam=0.07, algorithm="alg2", max_iter=100, rho=None, gamma0=None,
                 tol=None, flavor="aniso", output=None, threads=1, timing=True):
        self.lam = lam
        self.algorithm = algorithm
        self.max_iter = max_iter
        self.rho = rho
        self.gamma0 = gamma0
        self.tol = tol
        self.flavor = flavor
        self.output = output
        self.threads = threads
        self.timing = timing

    def fit(self, X, y=None, reference=None):
        b = check_image(X)
        task = DenoiseTask(b, self.lam, self.flavor)
        rho = self.rho
        if rho is None and self.algorithm in ("alg2", "pd2"):
            rho = DENOISE_RHO
        return self._run(task, b, reference, rho)


class TVDeblurrer(_Restoration):
    """``min ||A x - X||_1 + lam1 TV_iso(x) + lam2 ||x||_1`` over ``[0, 1]^n`` with a
    Gaussian blur ``A``; the averaged iterate is returned by default."""

    _default_output = "ergodic"

    def __init__(self, lam1=3e-3, lam2=2e-5, kernel_size=9, kernel_sigma=4.0,
                 algorithm="alg1", max_iter=400, gamma0=None, tol=None, output=None,
                 threads=1, timing=True):
        self.lam1 = lam1
        self.lam2 = lam2
        self.kernel_size = kernel_size
        self.kernel_sigma = kernel_sigma
        self.algorithm = algorithm
        self.max_iter = max_iter
        self.gamma0 = gamma0
        self.tol = tol
        self.output = output
        self.threads = threads
        self.timing = timing

    def fit(self, X, y=None, reference=None):
        b = check_image(X)
        k = gaussian_kernel(self.kernel_size, self.kernel_sigma)
        return self._run(DeblurTask(b, k, self.lam1, self.lam2), b, reference)


class TVInpainter(_Restoration):
    """``min lam TV_iso(x) + ||K x - X||_1`` over ``[0, 1]^n``.

    ``mask`` marks observed pixels with 1; when omitted, black pixels are
    taken as lost.  The last prox point (feasible) is returned by default.
    """

    _default_output = "p1"

    def __init__(self, lam=0.05, algorithm="alg1", max_iter=200, gamma0=None, tol=None,
                 output=None, threads=1, timing=True):
        self.lam = lam
        self.algorithm = algorithm
        self.max_iter = max_iter
        self.gamma0 = gamma0
        self.tol = tol
        self.output = output
        self.threads = threads
        self.timing = timing

    def fit(self, X, y=None, mask=None, reference=None):
        b = check_image(X)
        if mask is None:
            mask = (b != 0).astype(float)
        return self._run(InpaintTask(b, mask, self.lam), b, reference)
