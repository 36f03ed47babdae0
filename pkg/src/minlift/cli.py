"""Command-line front end: denoise, compare, synthetic rate studies, verify.

All outputs are reproducible bit-for-bit for a fixed (config, seed), except
the timing columns. CSV files start with a comment line recording the
package version, a hash of the configuration and the seed.
"""

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .diagnostics import fit_rate, primal_dual_gap, snr, theoretical_beta
from .imaging import (
    DenoiseParams,
    FormatError,
    add_gaussian_noise,
    build_denoise_problem,
    load_pgm,
    phantom,
    save_pgm,
)
from .operators import UsageError, counterexample_cone_ops, counterexample_zero_ops
from .primal_dual import as_split_problem
from .splitting import SplitProblem, dr_product_apply, drive, mt_apply, mt_fixed_point_residual, shadow_tuple
from .synthetic import affine_family, monotone_family
from .verify import run_suites


def _config_hash(args_dict):
    blob = json.dumps({k: v for k, v in sorted(args_dict.items()) if k != "func"}, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _csv_header(fh, cfg_hash, seed, columns):
    fh.write(f"# minlift v{__version__} config={cfg_hash} seed={seed}\n")
    fh.write(",".join(columns) + "\n")


def _trace_rows(trace):
    for k, ch, dist, gap, ms in zip(trace.ks, trace.changes, trace.dists, trace.gaps, trace.elapsed_ms):
        yield k, ch, "" if dist is None else f"{dist:.17g}", "" if gap is None else f"{gap:.17g}", f"{ms:.3f}"


def write_trace_csv(path, trace, cfg_hash, seed):
    with open(path, "w") as fh:
        _csv_header(fh, cfg_hash, seed, ["k", "norm_change", "dist_to_ref", "gap", "elapsed_ms"])
        for k, ch, dist, gap, ms in _trace_rows(trace):
            fh.write(f"{k},{ch:.17g},{dist},{gap},{ms}\n")


# ---------------------------------------------------------------------------
# Denoising runs shared by `denoise` and `compare`
# ---------------------------------------------------------------------------

def denoise_run(noisy, params, algorithm="mt", reference=None, gap_anchor=None,
                max_iter=None, tol=None):
    """Run one denoising iteration to the stopping criterion.

    gap_anchor, when given, is a (ustar, vstar) pair; the primal-dual gap of
    the last shadow pair (u_n, v_n) is then recorded each iteration.
    Returns (final_state, trace, restored_image, pd_problem).
    """
    problem = build_denoise_problem(noisy, params)
    sp = as_split_problem(problem, params.gamma)
    d1 = problem.d1
    dim = d1 + problem.d2
    M = noisy.shape[0]
    tol = params.tol if tol is None else tol
    max_iter = params.max_iter if max_iter is None else max_iter

    if algorithm == "mt":
        z0 = np.zeros((problem.n - 1, dim))
        step = lambda z: mt_apply(sp, z)[0]
        restored_of = lambda z: shadow_tuple(sp, z)[0][:d1]
    elif algorithm == "dr-product":
        z0 = np.zeros((problem.n, dim))
        step = lambda Z: dr_product_apply(sp.ops, Z)[0]
        restored_of = lambda Z: Z.mean(axis=0)[:d1]
    else:
        raise UsageError(f"unknown algorithm {algorithm!r}")

    gap_fn = None
    if gap_anchor is not None:
        if algorithm != "mt":
            raise UsageError("gap tracing is defined for the mt algorithm")
        ustar, vstar = gap_anchor

        def gap_fn(z):
            xs = shadow_tuple(sp, z)
            un, vn = xs[-1][:d1], xs[-1][d1:]
            return primal_dual_gap(un, vn, ustar, vstar, problem)

    # normalize the stopping change by the pixel count so the rule is
    # resolution-independent
    final, trace = drive(step, z0, tol, max_iter, reference=reference, gap_fn=gap_fn, norm_scale=d1)
    restored = np.clip(restored_of(final).reshape(M, M), 0.0, 1.0)
    return final, trace, restored, problem


def mt_reference(noisy, params, iters=200):
    """High-accuracy lifted fixed point from a long run of the iteration."""
    problem = build_denoise_problem(noisy, params)
    sp = as_split_problem(problem, params.gamma)
    dim = problem.d1 + problem.d2
    z = np.zeros((problem.n - 1, dim))
    for _ in range(iters):
        z = mt_apply(sp, z)[0]
    return z, sp, problem


def dr_reference(noisy, params, iters=200):
    problem = build_denoise_problem(noisy, params)
    sp = as_split_problem(problem, params.gamma)
    dim = problem.d1 + problem.d2
    Z = np.zeros((problem.n, dim))
    for _ in range(iters):
        Z = dr_product_apply(sp.ops, Z)[0]
    return Z


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _load_or_phantom(args):
    if args.input:
        return load_pgm(args.input)
    return phantom(args.size)


def cmd_denoise(args):
    params = DenoiseParams(
        lambda1=args.lambda1, lambda2=args.lambda2, lambda3=args.lambda3,
        lambda4=args.lambda4, gamma=args.gamma, noise_sigma=args.sigma,
        seed=args.seed, tol=args.tol, max_iter=args.max_iter,
    )
    original = _load_or_phantom(args)
    noisy = add_gaussian_noise(original, params.noise_sigma, params.seed)
    ref_z, _, _ = mt_reference(noisy, params, iters=max(200, 10 * params.max_iter // 10))
    final, trace, restored, _ = denoise_run(
        noisy, params, algorithm=args.algorithm, reference=ref_z if args.algorithm == "mt" else None
    )
    if args.output:
        save_pgm(restored, args.output)
    cfg = _config_hash(vars(args))
    if args.trace:
        write_trace_csv(args.trace, trace, cfg, params.seed)
    dists = trace.distances()
    rate_txt = "n/a"
    if len(dists) >= 12 and np.all(dists > 0):
        rate, _ = fit_rate(dists)
        rate_txt = f"{rate:.4f}"
    print(
        f"iterations={trace.iterations} status={trace.status} "
        f"snr={snr(original, restored):.2f}dB fitted_rate={rate_txt}"
    )
    return 0 if trace.status == "converged" else 2


def _compare_one(noisy, params):
    ref_mt, _, _ = mt_reference(noisy, params)
    ref_dr = dr_reference(noisy, params)
    out = {}
    for name, ref in (("mt", ref_mt), ("dr-product", ref_dr)):
        t0 = time.perf_counter()
        _, trace, _, _ = denoise_run(noisy, params, algorithm=name, reference=ref)
        dists = trace.distances()
        out[name] = (
            trace.iterations,
            float(dists[-1]) / noisy.size if len(dists) else float("nan"),
            time.perf_counter() - t0,
        )
    return out


def cmd_compare(args):
    params = DenoiseParams(
        lambda1=args.lambda1, lambda2=args.lambda2, lambda3=args.lambda3,
        lambda4=args.lambda4, gamma=args.gamma, noise_sigma=args.sigma,
        seed=args.seed, tol=args.tol, max_iter=args.max_iter,
    )
    original = _load_or_phantom(args)
    seeds = [params.seed + r for r in range(args.repeats)]
    workers = max(1, int(os.environ.get("MINLIFT_THREADS", "1")))

    def run(seed):
        noisy = add_gaussian_noise(original, params.noise_sigma, seed)
        return _compare_one(noisy, params)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, seeds))
    else:
        results = [run(s) for s in seeds]

    mean = lambda alg, idx: float(np.mean([r[alg][idx] for r in results]))
    row = (
        original.shape[0],
        mean("mt", 0), mean("dr-product", 0),
        mean("mt", 1), mean("dr-product", 1),
        mean("mt", 2), mean("dr-product", 2),
    )
    cfg = _config_hash(vars(args))
    columns = ["size", "mt_iters", "dr_iters", "mt_dist", "dr_dist", "mt_time_s", "dr_time_s"]
    out = args.output or "compare.csv"
    with open(out, "w") as fh:
        _csv_header(fh, cfg, params.seed, columns)
        fh.write(f"{row[0]},{row[1]:.17g},{row[2]:.17g},{row[3]:.17g},{row[4]:.17g},{row[5]:.3f},{row[6]:.3f}\n")
    print(
        f"size={row[0]} mt_iters={row[1]:.1f} dr_iters={row[2]:.1f} "
        f"mt_dist={row[3]:.3e} dr_dist={row[4]:.3e}"
    )
    return 0


def cmd_synthetic(args):
    rows = []
    if args.case in ("counter-a", "counter-b"):
        if args.case == "counter-a":
            prob = SplitProblem(ops=counterexample_zero_ops(), gamma=args.gamma)
            points = [np.array([[t], [t]]) for t in (1.0, -2.0)]
        else:
            prob = SplitProblem(ops=counterexample_cone_ops(max(args.mu, 1.0)), gamma=args.gamma)
            points = [np.array([[-1.0], [0.0]]), np.array([[-2.0], [0.0]])]
        fixed = [z for z in points if mt_fixed_point_residual(prob, z)[0] <= 1e-14]
        print(f"family={args.case} exact_fixed_points={len(fixed)} not_a_contraction={len(fixed) >= 2}")
        return 0

    for s in range(args.repeats):
        seed = args.seed + s
        if args.mu > 0:
            fam = affine_family(args.n, args.dim, args.mu, args.lip, args.case, seed, gamma=args.gamma)
            beta = theoretical_beta(args.n, args.gamma, args.mu, args.lip, args.case).theoretical_beta
        else:
            fam = monotone_family(args.n, args.dim, seed, gamma=args.gamma, mu_choices=(0.0,))
            beta = None
        zstar, _ = drive(
            lambda z: mt_apply(fam.problem, z)[0],
            np.zeros((args.n - 1, args.dim)),
            tol=1e-14,
            max_iter=50000,
        )
        _, trace = drive(
            lambda z: mt_apply(fam.problem, z)[0],
            np.ones((args.n - 1, args.dim)),
            tol=args.tol,
            max_iter=args.max_iter,
            reference=zstar,
        )
        dists = trace.distances()
        try:
            rate, r2 = fit_rate(dists)
        except UsageError:
            rate, r2 = float("nan"), float("nan")
        rows.append((seed, args.gamma, rate, r2, beta, trace.iterations))

    cfg = _config_hash(vars(args))
    out = args.output or "synthetic.csv"
    with open(out, "w") as fh:
        _csv_header(fh, cfg, args.seed, ["seed", "gamma", "fitted_rate", "r_squared", "theoretical_beta", "iterations"])
        for seed, g, rate, r2, beta, iters in rows:
            beta_txt = "" if beta is None else f"{beta:.17g}"
            fh.write(f"{seed},{g},{rate:.17g},{r2:.17g},{beta_txt},{iters}\n")
    for seed, g, rate, r2, beta, iters in rows:
        beta_txt = "none" if beta is None else f"{beta:.4f}"
        print(f"seed={seed} fitted_rate={rate:.4f} r2={r2:.4f} beta={beta_txt} iters={iters}")
    return 0


def cmd_verify(args):
    names = args.suite if args.suite else None
    results = run_suites(names)
    failed = False
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
        failed = failed or not r.passed
    return 3 if failed else 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_denoise_flags(p):
    p.add_argument("--input", help="input PGM (square, maxval 255); omit to use the bundled phantom")
    p.add_argument("--size", type=int, default=96, help="phantom side length when no input is given")
    p.add_argument("--output", help="restored image PGM path")
    p.add_argument("--trace", help="per-iteration CSV path")
    p.add_argument("--gamma", type=float, default=0.99)
    p.add_argument("--lambda1", type=float, default=0.01)
    p.add_argument("--lambda2", type=float, default=0.05)
    p.add_argument("--lambda3", type=float, default=0.0001)
    p.add_argument("--lambda4", type=float, default=10.0)
    p.add_argument("--sigma", type=float, default=0.05, help="noise standard deviation")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--max-iter", type=int, default=500)


def build_parser():
    parser = argparse.ArgumentParser(prog="minlift", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("denoise", help="TV denoising with the primal-dual iteration")
    _add_denoise_flags(p)
    p.add_argument("--algorithm", choices=["mt", "dr-product"], default="mt")
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("compare", help="minimal-lifting vs product-space DR on seeded instances")
    _add_denoise_flags(p)
    p.add_argument("--repeats", type=int, default=10)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("synthetic", help="rate studies on random affine families")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--dim", type=int, default=20)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--lip", type=float, default=2.0)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--case", choices=["a", "b", "counter-a", "counter-b"], default="b")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--output", help="CSV output path")
    p.set_defaults(func=cmd_synthetic)

    p = sub.add_parser("verify", help="run the property suites")
    p.add_argument("--suite", action="append", help="run only the named suite (repeatable)")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, FormatError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
