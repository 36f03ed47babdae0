"""Self-contained property suites: each re-checks one of the library's
contracts against an independent computation (brute-force minimization,
dense matrices, hand formulas). The CLI exposes them through `verify`.
"""

from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from . import diagnostics, imaging, operators, splitting, synthetic
from .operators import (
    LinearMap,
    prox_conjugate,
    prox_iso,
    prox_quadratic_shift,
    prox_scaled_square,
    resolvent_skew,
    scaled_identity,
)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str


def grid_minimize(f, center, radius=10.0, rounds=60, points=33):
    """Shrinking-grid minimization of f over a box around `center`; an
    oracle for prox values on d <= 2, accurate to well below 1e-6."""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    d = center.size
    lo = center - radius
    hi = center + radius
    for _ in range(rounds):
        axes = [np.linspace(lo[i], hi[i], points) for i in range(d)]
        if d == 1:
            vals = np.array([f(np.array([x])) for x in axes[0]])
            idx = np.array([int(np.argmin(vals))])
        else:
            best, idx = np.inf, None
            for i, x in enumerate(axes[0]):
                for j, y in enumerate(axes[1]):
                    v = f(np.array([x, y]))
                    if v < best:
                        best, idx = v, np.array([i, j])
        step = (hi - lo) / (points - 1)
        center = np.array([axes[i][idx[i]] for i in range(d)])
        lo = center - 2 * step
        hi = center + 2 * step
        if np.max(step) < 1e-13:
            break
    return center


def prox_oracle(f, w, radius=10.0):
    """argmin of f(u) + 0.5 ||u - w||^2 by brute force."""
    w = np.atleast_1d(np.asarray(w, dtype=float))
    return grid_minimize(lambda u: f(u) + 0.5 * float(np.sum((u - w) ** 2)), w, radius)


def _catalog_resolvents(rng, d):
    """Sampled resolvents with random parameters for nonexpansiveness checks."""
    b = rng.standard_normal(d)
    lam = rng.uniform(0.1, 5.0)
    mu = rng.uniform(0.1, 5.0)
    lam2 = rng.uniform(0.1, 2.0)
    lam3 = rng.uniform(0.0, 2.0)
    res = [
        ("quadratic-shift", lambda w: prox_quadratic_shift(w, b)),
        ("scaled-square", lambda w: prox_scaled_square(w, lam)),
        ("scaled-identity", scaled_identity(mu).resolvent),
        ("conjugate", lambda w: prox_conjugate(lambda x: prox_scaled_square(x, lam), w)),
    ]
    if d % 2 == 0:
        res.append(("iso", lambda w: prox_iso(w, lam2, lam3)))
        C = LinearMap.from_matrix(rng.standard_normal((d // 2, d // 2)))
        res.append(
            (
                "skew",
                lambda w: np.concatenate(resolvent_skew(w[: d // 2], w[d // 2 :], C)),
            )
        )
    return res


def suite_firm_nonexpansive(samples=1000, seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        d = int(rng.choice([2, 4, 6]))
        for _, J in _catalog_resolvents(rng, d):
            x = rng.standard_normal(d) * rng.uniform(0.1, 10)
            y = rng.standard_normal(d) * rng.uniform(0.1, 10)
            jx, jy = J(x), J(y)
            lhs = np.sum((jx - jy) ** 2) + np.sum(((x - jx) - (y - jy)) ** 2)
            rhs = np.sum((x - y) ** 2)
            worst = max(worst, (lhs - rhs) / (1.0 + rhs))
    ok = worst <= 1e-12
    return SuiteResult("firm-nonexpansive", ok, f"worst relative violation {worst:.2e}")


def suite_moreau(samples=200, seed=1):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        d = int(rng.choice([1, 3, 5]))
        w = rng.standard_normal(d) * rng.uniform(0.1, 10)
        lam = rng.uniform(0.1, 5.0)
        # identity decomposition holds by construction
        pf = prox_scaled_square(w, lam)
        pc = prox_conjugate(lambda x: prox_scaled_square(x, lam), w)
        worst = max(worst, float(np.max(np.abs(pf + pc - w))))
        # conjugate of (lam/2)||.||^2 is (1/(2 lam))||.||^2, prox'd directly
        direct = prox_scaled_square(w, 1.0 / lam)
        worst = max(worst, float(np.max(np.abs(pc - direct))))
        b = rng.standard_normal(d)
        pc2 = prox_conjugate(lambda x: prox_quadratic_shift(x, b), w)
        # conjugate of (1/2)||.-b||^2 is (1/2)||y||^2 + <y,b>: prox = (w-b)/2
        worst = max(worst, float(np.max(np.abs(pc2 - (w - b) / 2.0))))
    ok = worst <= 1e-10
    return SuiteResult("moreau", ok, f"worst deviation {worst:.2e}")


def suite_prox_oracle(seed=2):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(12):
        w = rng.standard_normal(1) * 3
        b = rng.standard_normal(1) * 3
        lam = rng.uniform(0.2, 3.0)
        got = prox_quadratic_shift(w, b)
        ref = prox_oracle(lambda u: 0.5 * float(np.sum((u - b) ** 2)), w)
        worst = max(worst, float(np.max(np.abs(got - ref))))
        got = prox_scaled_square(w, lam)
        ref = prox_oracle(lambda u: 0.5 * lam * float(np.sum(u**2)), w)
        worst = max(worst, float(np.max(np.abs(got - ref))))
    for _ in range(8):
        v = rng.standard_normal(2) * 3
        lam2 = rng.uniform(0.2, 2.0)
        lam3 = rng.uniform(0.0, 2.0)
        got = prox_iso(v, lam2, lam3)
        ref = prox_oracle(
            lambda u: lam2 * float(np.hypot(u[0], u[1])) + 0.5 * lam3 * float(np.sum(u**2)),
            v,
        )
        worst = max(worst, float(np.max(np.abs(got - ref))))
    ok = worst <= 1e-6
    return SuiteResult("prox-oracle", ok, f"worst deviation from brute force {worst:.2e}")


def suite_skew(samples=100, seed=3):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        d1 = int(rng.integers(1, 6))
        d2 = int(rng.integers(1, 6))
        C = LinearMap.from_matrix(rng.standard_normal((d2, d1)))
        p = rng.standard_normal(d1) * rng.uniform(0.1, 10)
        q = rng.standard_normal(d2) * rng.uniform(0.1, 10)
        u, v = resolvent_skew(p, q, C)
        scale = np.linalg.norm(np.concatenate([p, q]))
        r1 = np.linalg.norm(u + C.adjoint(v) - p)
        r2 = np.linalg.norm(-C.apply(u) + v - q)
        worst = max(worst, (r1 + r2) / (1.0 + scale))
    ok = worst <= 1e-10
    return SuiteResult("skew-resolvent", ok, f"worst block-equation residual {worst:.2e}")


def suite_descent(samples=1000, seed=4):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(samples):
        n = int(rng.integers(2, 7))
        d = int(rng.integers(1, 9))
        fam = synthetic.monotone_family(n, d, seed=seed * 100000 + i, gamma=float(rng.uniform(0.05, 0.95)))
        z = rng.standard_normal((n - 1, d)) * rng.uniform(0.1, 5)
        zbar = rng.standard_normal((n - 1, d)) * rng.uniform(0.1, 5)
        slack = diagnostics.check_descent_inequality(fam.problem, z, zbar)
        scale = 1.0 + float(np.sum((z - zbar) ** 2))
        worst = min(worst, slack / scale) if i else slack / scale
    ok = worst >= -1e-10
    return SuiteResult("descent-inequality", ok, f"worst normalized slack {worst:.2e}")


def suite_chains():
    bad = []
    for n in range(2, 11):
        for eps2 in (1.05, 1.3, 1.5, 1.7, 1.95):
            _, ep = diagnostics.epsilon_chain(n, eps2)
            if ep <= 0:
                bad.append(f"eps'(n={n},eps2={eps2})={ep}")
        for gamma in np.arange(0.1, 1.0, 0.1):
            for mu in (0.1, 1.0, 10.0):
                _, ap = diagnostics.alpha_chain(n, float(gamma), mu)
                if ap <= 0:
                    bad.append(f"alpha'(n={n},g={gamma:.1f},mu={mu})={ap}")
                for case in ("a", "b"):
                    L = max(2.0, 2.0 * mu)  # case 'b' needs mu <= L
                    rep = diagnostics.theoretical_beta(n, float(gamma), mu, L, case)
                    if not (0.0 < rep.theoretical_beta < 1.0):
                        bad.append(f"beta(n={n},g={gamma:.1f},mu={mu},{case})")
    return SuiteResult("constant-chains", not bad, bad[0] if bad else "all chains positive, beta in (0,1)")


def suite_n2_dr(samples=1000, seed=5):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(samples):
        d = int(rng.integers(1, 6))
        fam = synthetic.monotone_family(2, d, seed=seed * 100000 + i, gamma=float(rng.uniform(0.05, 0.95)))
        z = rng.standard_normal(d) * rng.uniform(0.1, 5)
        znext, _ = splitting.mt_apply(fam.problem, z)
        g = fam.problem.gamma
        relaxed = (1 - g) * z + g * splitting.dr_apply(fam.problem.ops[0], fam.problem.ops[1], z)
        worst = max(worst, float(np.max(np.abs(znext.ravel() - relaxed))))
    ok = worst <= 1e-12
    return SuiteResult("n2-equals-relaxed-dr", ok, f"worst deviation {worst:.2e}")


def suite_counterexamples():
    bad = []
    zero_prob = splitting.SplitProblem(ops=operators.counterexample_zero_ops(), gamma=0.5)
    for t in (-3.0, 1.0, 7.5):
        res, _ = splitting.mt_fixed_point_residual(zero_prob, np.array([[t], [t]]))
        if res > 1e-14:
            bad.append(f"diagonal ray residual {res:.2e} at t={t}")
    cone_prob = splitting.SplitProblem(ops=operators.counterexample_cone_ops(1.0), gamma=0.5)
    for t in (-1.0, -2.0, -0.25, 0.0):
        res, _ = splitting.mt_fixed_point_residual(cone_prob, np.array([[t], [0.0]]))
        if res > 1e-14:
            bad.append(f"cone ray residual {res:.2e} at t={t}")
    detail = bad[0] if bad else "both families expose multiple exact fixed points"
    return SuiteResult("counterexamples", not bad, detail)


def suite_contraction(seed=6):
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for case in ("a", "b"):
        for gamma in (0.3, 0.5, 0.7):
            rep = diagnostics.theoretical_beta(3, gamma, 1.0, 2.0, case)
            beta = rep.theoretical_beta
            for s in range(5):
                fam = synthetic.affine_family(3, 20, 1.0, 2.0, case, seed=seed + s, gamma=gamma)
                for _ in range(20):
                    z = rng.standard_normal((2, 20)) * rng.uniform(0.1, 5)
                    zb = rng.standard_normal((2, 20)) * rng.uniform(0.1, 5)
                    num = np.linalg.norm(splitting.mt_apply(fam.problem, z)[0] - splitting.mt_apply(fam.problem, zb)[0])
                    den = np.linalg.norm(z - zb)
                    # the certified inequality bounds the squared step ratio
                    worst = max(worst, (num / den) ** 2 - beta)
    ok = worst <= 1e-9
    return SuiteResult("contraction-factor", ok, f"worst squared-ratio excess over beta {worst:.2e}")


def implied_operator_sum(problem, z):
    """Sum of the operator values each resolvent evaluation certifies; it
    telescopes to x_1 - x_n plus boundary terms and vanishes at fixed points."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    xs = splitting.shadow_tuple(problem, z)
    n = problem.n
    total = z[0] - xs[0]
    for i in range(1, n - 1):
        total = total + (z[i] - z[i - 1] + xs[i - 1] - xs[i])
    total = total + (xs[0] + xs[n - 2] - xs[n - 1] - z[n - 2])
    return total


def suite_consensus(seed=7):
    bad = []
    for s in range(10):
        fam = synthetic.affine_family(3, 6, 1.0, 2.0, "a", seed=seed + s, gamma=0.5)
        z, _ = splitting.drive(
            lambda state: splitting.mt_apply(fam.problem, state)[0],
            np.zeros((2, 6)),
            tol=1e-14,
            max_iter=20000,
        )
        res, cons = splitting.mt_fixed_point_residual(fam.problem, z)
        if res <= 1e-10 and cons > 1e-8:
            bad.append(f"seed {s}: residual {res:.1e} but consensus {cons:.1e}")
        total = np.linalg.norm(implied_operator_sum(fam.problem, z))
        if res <= 1e-10 and total > 1e-8:
            bad.append(f"seed {s}: operator-sum norm {total:.1e}")
    return SuiteResult("fixed-point-consensus", not bad, bad[0] if bad else "shadows agree, operator sums vanish")


def suite_imaging():
    bad = []
    rng = np.random.default_rng(8)
    for M in (1, 2, 3, 4):
        m = M * M
        D = imaging.dense_gradient_matrix(M)
        u = rng.standard_normal(m)
        y = rng.standard_normal(2 * m)
        if np.linalg.norm(imaging.discrete_gradient_apply(u) - D @ u) > 1e-9:
            bad.append(f"D mismatch at M={M}")
        if np.linalg.norm(imaging.discrete_gradient_adjoint(y) - D.T @ y) > 1e-9:
            bad.append(f"Dt mismatch at M={M}")
        rhs = rng.standard_normal(m)
        direct = np.linalg.solve(np.eye(m) + D.T @ D, rhs)
        if np.linalg.norm(imaging.solve_identity_plus_DtD(rhs) - direct) > 1e-9:
            bad.append(f"solve mismatch at M={M}")
    for M in (8, 16, 32):
        nrm = imaging.gradient_map(M).operator_norm()
        if nrm**2 > imaging.GRAD_NORM_SQ_BOUND + 1e-9:
            bad.append(f"||D||^2={nrm**2:.3f} exceeds bound at M={M}")
    return SuiteResult("imaging-gradient", not bad, bad[0] if bad else "dense equivalence and norm bound hold")


ALL_SUITES: Dict[str, Callable[[], SuiteResult]] = {
    "firm-nonexpansive": suite_firm_nonexpansive,
    "moreau": suite_moreau,
    "prox-oracle": suite_prox_oracle,
    "skew": suite_skew,
    "descent": suite_descent,
    "chains": suite_chains,
    "n2-dr": suite_n2_dr,
    "counterexamples": suite_counterexamples,
    "contraction": suite_contraction,
    "consensus": suite_consensus,
    "imaging": suite_imaging,
}


def run_suites(names=None) -> List[SuiteResult]:
    if names:
        unknown = [n for n in names if n not in ALL_SUITES]
        if unknown:
            raise operators.UsageError(f"unknown suite(s): {', '.join(unknown)}")
        selected = names
    else:
        selected = list(ALL_SUITES)
    return [ALL_SUITES[name]() for name in selected]
