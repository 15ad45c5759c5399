"""Self-check suites: equivalence, unbiasedness, gradients, critic, game audit."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from armac.approx import random_gradient_checks
from armac.exact import PolicyTable, load_tree, perfect_recall_violations
from armac.sampling import outcome_sampling_check
from armac.sampling.trajectory import TablePolicy
from armac.trainer import compare_with_cfr, exact_q_by_history, random_policy, tree_backup_fixed_point, unbiasedness_harness


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name:<14} {self.detail}  ({self.seconds:.1f}s)"


def equivalence(quick: bool = False) -> SuiteResult:
    runs = [("kuhn", 200 if quick else 1000), ("leduc", 30 if quick else 200)]
    worst = 0.0
    parts = []
    for game, epochs in runs:
        rep = compare_with_cfr(game, epochs)
        worst = max(worst, rep.max_deviation)
        parts.append(f"{game} x{epochs}: {rep.max_deviation:.2e}")
    return SuiteResult("equivalence", worst < 1e-9, "max policy deviation " + ", ".join(parts))


def unbiasedness(quick: bool = False) -> SuiteResult:
    tree = load_tree("kuhn")
    rng = np.random.default_rng(2024)
    snaps = [random_policy(tree, rng) for _ in range(3)]
    n = 10_000 if quick else 100_000
    z = np.concatenate([unbiasedness_harness("kuhn", snaps, p, n, rng).z_scores() for p in range(2)])
    cov = float(np.mean(z <= 3.0))
    return SuiteResult("unbiasedness", cov >= 0.99, f"{cov:.1%} of {len(z)} pairs within 3 SE (N={n} per player)")


def sampled_cf_values(quick: bool = False) -> SuiteResult:
    tree = load_tree("kuhn")
    rng = np.random.default_rng(7)
    pol = random_policy(tree, rng)
    n = 10_000 if quick else 100_000
    chk = outcome_sampling_check("kuhn", pol, n, rng)
    z = chk.z_scores()
    return SuiteResult("sampled-cfv", bool(np.all(z <= 3.0)), f"max z {z.max():.2f} over {len(z)} pairs (N={n} per player)")


def gradients(quick: bool = False) -> SuiteResult:
    err = random_gradient_checks(20 if quick else 100, seed=0)
    return SuiteResult("gradients", bool(err.max() < 1e-4), f"worst relative error {err.max():.1e} over {len(err)} configs")


def critic(quick: bool = False) -> SuiteResult:
    tree = load_tree("kuhn")
    pol = random_policy(tree, np.random.default_rng(3))
    target = TablePolicy(PolicyTable.from_array(tree, pol))
    exact = exact_q_by_history("kuhn", pol)
    worst = 0.0
    for lam in (0.0, 0.5, 1.0):
        q, _ = tree_backup_fixed_point("kuhn", target, lambda k, m: m / m.sum(), lam)
        worst = max(worst, max(float(np.abs(q[h] - row).max()) for h, row in exact.items()))
    return SuiteResult("tree-backup", worst < 1e-3, f"max |q - q_exact| {worst:.1e} for lambda in {{0, 0.5, 1}}")


def perfect_recall(quick: bool = False) -> SuiteResult:
    games = ("kuhn", "leduc") if quick else ("kuhn", "leduc", "goofspiel5", "liars_dice")
    bad = {g: perfect_recall_violations(load_tree(g)) for g in games}
    return SuiteResult("perfect-recall", not any(bad.values()), ", ".join(f"{g}: {v} violations" for g, v in bad.items()))


SUITES = {
    "equivalence": equivalence,
    "unbiasedness": unbiasedness,
    "sampled-cfv": sampled_cf_values,
    "gradients": gradients,
    "tree-backup": critic,
    "perfect-recall": perfect_recall,
}


def run_selfcheck(names=None, quick: bool = False, report=print) -> list[SuiteResult]:
    out = []
    for name in names or SUITES:
        start = time.perf_counter()
        try:
            res = SUITES[name](quick)
        except Exception as exc:  # a crashing suite is a failing suite
            res = SuiteResult(name, False, f"error: {exc!r}")
        res.seconds = time.perf_counter() - start
        report(res.line())
        out.append(res)
    return out
