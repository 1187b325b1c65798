"""``pdsplit`` command line: denoise, deblur, inpaint, bench, make-image.

Exit codes: 0 success, 2 configuration or input error, 3 divergence.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys

from . import bench as bn
from .core import DivergenceError, PDSplitError
from .imaging import (DeblurTask, DenoiseTask, InpaintTask, add_noise, blur, build,
                      gaussian_kernel, objective, random_mask, synthetic_image)
from .metrics import rmse
from .pgm import read_image, write_image
from .solvers import VARIANTS, SolverConfig, solve

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED = 0, 2, 3


def _threads_default():
    raw = os.environ.get("PDSPLIT_THREADS")
    if raw is None:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _alg_list(text):
    algs = [t.strip().lower() for t in text.split(",") if t.strip()]
    bad = [a for a in algs if a not in VARIANTS]
    if bad or not algs:
        raise argparse.ArgumentTypeError(f"unknown algorithm(s) {bad}; choose from {VARIANTS}")
    return algs


def _common(p, algorithm, iters):
    p.add_argument("--input", required=True, help="input PGM image")
    p.add_argument("--output", required=True, help="restored PGM image")
    p.add_argument("--algorithm", choices=VARIANTS, default=algorithm)
    p.add_argument("--iters", type=int, default=iters)
    p.add_argument("--sigma", type=float, default=0.0,
                   help="std of Gaussian noise added to the input before solving")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rho", type=float, default=None, help="strong-monotonicity modulus (alg2, alg3, pd2)")
    p.add_argument("--gamma0", type=float, default=None)
    p.add_argument("--log", default=None, help="CSV convergence log")
    p.add_argument("--reference", default=None, help="ground-truth PGM for RMSE reporting")
    p.add_argument("--ergodic", action="store_true", help="output the averaged prox iterate")
    p.add_argument("--observed", default=None, help="also save the degraded input here")
    p.add_argument("--threads", type=int, default=_threads_default())
    p.add_argument("--timing", action="store_true", help="fill the wall_ms column")
    p.add_argument("--maxval", type=int, choices=(255, 65535), default=255)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pdsplit",
                                 description="Primal-dual splitting solvers for TV imaging.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("denoise", help="TV denoising")
    _common(p, "alg2", 100)
    p.add_argument("--lambda", dest="lam", type=float, default=0.07)
    p.add_argument("--flavor", choices=("aniso", "iso"), default="aniso")

    p = sub.add_parser("deblur", help="TV-L1 deblurring")
    _common(p, "alg1", 400)
    p.add_argument("--lambda1", type=float, default=3e-3)
    p.add_argument("--lambda2", type=float, default=2e-5)
    p.add_argument("--kernel-size", type=int, default=9)
    p.add_argument("--kernel-sigma", type=float, default=4.0)
    p.add_argument("--no-blur", action="store_true", help="input is already blurred")

    p = sub.add_parser("inpaint", help="TV-L1 inpainting")
    _common(p, "alg1", 200)
    p.add_argument("--lambda", dest="lam", type=float, default=0.05)
    p.add_argument("--drop", type=float, default=None,
                   help="fraction of pixels to remove; default takes black pixels as lost")

    p = sub.add_parser("bench", help="iterations to reach RMSE tolerances on denoising")
    p.add_argument("--input", default=None, help="clean PGM image (default: synthetic 256x256)")
    p.add_argument("--size", type=int, default=256, help="side of the synthetic image")
    p.add_argument("--sigma", type=float, default=0.12)
    p.add_argument("--lambda", dest="lam", type=float, default=0.07)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--rho", type=float, default=bn.BENCH_RHO)
    p.add_argument("--tolerances", type=_float_list, default=[1e-4, 1e-6])
    p.add_argument("--algorithms", type=_alg_list, default=["alg1", "alg2", "pd1", "pd2"])
    p.add_argument("--reference-iters", type=int, default=50_000)
    p.add_argument("--max-iters", type=int, default=20_000)
    p.add_argument("--cache-dir", default=None,
                   help="where the reference solution is cached (default: no cache)")
    p.add_argument("--output", default=None, help="CSV table (default: stdout)")
    p.add_argument("--threads", type=int, default=_threads_default())

    p = sub.add_parser("make-image", help="write a synthetic test image")
    p.add_argument("--output", required=True)
    p.add_argument("--kind", choices=("shapes", "texture"), default="shapes")
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--maxval", type=int, choices=(255, 65535), default=255)
    return ap


def _config(args, rho=None, output="x"):
    return SolverConfig(variant=args.algorithm, max_iters=args.iters, gamma0=args.gamma0,
                        rho=rho, output="ergodic" if args.ergodic else output,
                        threads=args.threads, timing=args.timing)


def _run_task(args, task, rho=None, output="x"):
    spec = build(task)
    ref = None
    if args.reference is not None:
        ref = read_image(args.reference)
        if ref.shape != task.b.shape:
            raise PDSplitError(f"reference shape {ref.shape} differs from input {task.b.shape}")
    res = solve(spec, _config(args, rho, output), x0=task.b.ravel(),
                objective=lambda x: objective(task, x),
                reference=None if ref is None else ref.ravel())
    x = res.primal().reshape(task.b.shape)
    write_image(args.output, x, args.maxval)
    if args.log:
        res.log.to_csv(args.log)
    msg = f"{args.command}: {res.n_iter} iterations, objective {objective(task, x):.10g}"
    if ref is not None:
        msg += f", rmse {rmse(x, ref):.6g}"
    print(msg)
    return EXIT_OK


def cmd_denoise(args):
    clean = read_image(args.input)
    b = add_noise(clean, args.sigma, args.seed)
    if args.observed:
        write_image(args.observed, b, args.maxval)
    rho = args.rho
    if rho is None and args.algorithm in ("alg2", "pd2"):
        rho = bn.BENCH_RHO
    return _run_task(args, DenoiseTask(b, args.lam, args.flavor), rho)


def cmd_deblur(args):
    img = read_image(args.input)
    k = gaussian_kernel(args.kernel_size, args.kernel_sigma)
    b = img if args.no_blur else blur(img, k)
    b = add_noise(b, args.sigma, args.seed)
    if args.observed:
        write_image(args.observed, b, args.maxval)
    return _run_task(args, DeblurTask(b, k, args.lambda1, args.lambda2), args.rho, "ergodic")


def cmd_inpaint(args):
    img = read_image(args.input)
    if args.drop is None:
        mask = (img != 0).astype(float)
    else:
        mask = random_mask(img.shape, args.drop, args.seed)
    b = add_noise(img, args.sigma, args.seed) * mask
    if args.observed:
        write_image(args.observed, b, args.maxval)
    return _run_task(args, InpaintTask(b, mask, args.lam), args.rho, "p1")


def cmd_bench(args):
    if args.input is not None:
        clean = read_image(args.input)
    else:
        clean = synthetic_image("shapes", (args.size, args.size))
    task = DenoiseTask(add_noise(clean, args.sigma, args.seed), args.lam)
    rows = bn.run_bench(task, args.algorithms, args.tolerances, args.reference_iters,
                        args.max_iters, args.rho, args.cache_dir, threads=args.threads)
    fh = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(bn.BENCH_COLUMNS)
        for r in rows:
            w.writerow(r.as_csv_row())
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_make_image(args):
    write_image(args.output, synthetic_image(args.kind, (args.size, args.size)), args.maxval)
    return EXIT_OK


_COMMANDS = {"denoise": cmd_denoise, "deblur": cmd_deblur, "inpaint": cmd_inpaint,
             "bench": cmd_bench, "make-image": cmd_make_image}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except DivergenceError as e:
        print(f"pdsplit: diverged: {e}", file=sys.stderr)
        return EXIT_DIVERGED
    except (PDSplitError, OSError) as e:
        print(f"pdsplit: error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
