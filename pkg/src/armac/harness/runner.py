"""Runs one configured experiment and streams its metrics."""

from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import dataclass

import numpy as np

from armac.approx import RegressorSpec, checkpoint, make_regressor
from armac.exact import CFRSolver, PolicyTable, TreeTooLarge, load_tree, nash_conv
from armac.games import get_descriptor
from armac.sampling import mc_rcfr_run, mccfr_outcome_sampling_run
from armac.trainer import ArmacTrainer, ExactArmac

from .config import RunConfig
from .metrics import SCHEMA_VERSION, MetricsRow, MetricsWriter

log = logging.getLogger(__name__)


@dataclass
class RunResult:
    rows: list
    policy: PolicyTable | None
    final_nash_conv: float | None


def oracle_tree(game_id: str):
    """Compiled tree for NashConv, or None (with a warning) when out of reach."""
    if not get_descriptor(game_id).enumerable:
        log.warning("%s has no best-response oracle; NashConv columns left empty", game_id)
        return None
    try:
        return load_tree(game_id)
    except TreeTooLarge as exc:
        log.warning("%s; NashConv columns left empty", exc)
        return None


def _is_eval(it: int, total: int, interval: int) -> bool:
    return it == total or (interval > 0 and it % interval == 0)


class Runner:
    def __init__(self, config: RunConfig, writer: MetricsWriter | None = None):
        self.config = config.validate()
        self.writer = writer
        self.rows: list[MetricsRow] = []
        self.tree = oracle_tree(config.game)
        self._start = time.perf_counter()
        self.trainer = None

    def emit(self, row: MetricsRow) -> None:
        row.seconds = time.perf_counter() - self._start
        self.rows.append(row)
        if self.writer is not None:
            self.writer.write(row)

    def nash(self, policy) -> float | None:
        return None if self.tree is None or policy is None else nash_conv(self.tree, policy)

    def run(self) -> RunResult:
        algo = self.config.algo
        policy = getattr(self, f"_run_{algo}")()
        final = self.rows[-1].nash_conv_avg if self.rows else None
        return RunResult(self.rows, policy, final)

    # -- algorithms --------------------------------------------------------
    def _run_cfr(self):
        cfg, tree = self.config, self.tree
        solver = CFRSolver(tree)
        per_iter = len(tree.decision_nodes)
        for it in range(1, cfg.iterations + 1):
            played = solver.step()
            if _is_eval(it, cfg.iterations, cfg.eval_interval):
                self.emit(MetricsRow(it, it * per_iter, self.nash(solver.average_policy()), self.nash(played)))
        return solver.average_policy_table()

    def _run_armac_exact(self):
        cfg, tree = self.config, self.tree
        ex = ExactArmac(cfg.game, tree)
        per_iter = len(tree.decision_nodes)
        for it in range(1, cfg.iterations + 1):
            ep = ex.step()
            if _is_eval(it, cfg.iterations, cfg.eval_interval):
                self.emit(MetricsRow(it, it * per_iter, self.nash(ex.average_policy()), self.nash(ep.policy)))
        return PolicyTable.from_array(tree, ex.average_policy())

    def _sampled_callback(self, it, table, steps):
        self.emit(MetricsRow(it, steps, self.nash(table.to_array(self.tree)) if self.tree is not None else None))

    def _run_mccfr_os(self):
        cfg = self.config
        p = cfg.resolved_params()
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed]))
        every = cfg.eval_interval or cfg.iterations
        table, _ = mccfr_outcome_sampling_run(cfg.game, cfg.iterations, p["epsilon"], rng, eval_every=every, callback=self._sampled_callback)
        return table

    def _run_mc_rcfr(self):
        cfg = self.config
        p = cfg.resolved_params()
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed]))
        regressor = None
        if p["regressor"] == "feedforward":
            desc = get_descriptor(cfg.game)
            spec = RegressorSpec("feedforward", desc.info_state_width, desc.max_actions, tuple(p["hidden"]), step_size=p["step_size"], seed=cfg.seed)
            regressor = make_regressor(spec)
        every = cfg.eval_interval or cfg.iterations
        table, _ = mc_rcfr_run(
            cfg.game,
            cfg.iterations,
            p["epsilon"],
            rng,
            regressor=regressor,
            episodes_per_iteration=p["episodes_per_iteration"],
            memory=p["memory"],
            train_steps=p["train_steps"],
            batch_size=p["batch_size"],
            eval_every=every,
            callback=self._sampled_callback,
        )
        return table

    def _run_armac(self):
        cfg = self.config
        tr = ArmacTrainer(cfg.game, cfg.epoch_config(), seed=cfg.seed)
        tr.tree = self.tree
        self.trainer = tr
        for it in range(1, cfg.iterations + 1):
            do_eval = self.tree is not None and _is_eval(it, cfg.iterations, cfg.eval_interval)
            s = tr.step_epoch(evaluate=do_eval)
            returns = s.candidate_returns or None
            row = MetricsRow(it, s.acting_steps, s.nash_conv_avg, s.nash_conv_current, s.primary, returns or [])
            self.emit(row)
        if self.tree is None:
            return None
        avg, _ = tr.policy_arrays()
        return PolicyTable.from_array(self.tree, avg)


def solve(config: RunConfig, metrics_handle=None, timing_handle=None) -> RunResult:
    writer = MetricsWriter(metrics_handle, timing_handle) if metrics_handle is not None else None
    runner = Runner(config, writer)
    result = runner.run()
    if config.out:
        write_artifacts(config, runner, result)
    return result


def write_artifacts(config: RunConfig, runner: Runner, result: RunResult) -> None:
    """Final policy, run manifest and (for ARMAC) the final head checkpoints."""
    out = config.out
    os.makedirs(out, exist_ok=True)
    files = {"metrics": "metrics.csv", "timing": "timing.csv"}
    if result.policy is not None:
        with open(os.path.join(out, "policy.json"), "w") as fh:
            fh.write(result.policy.to_json(config.game))
        files["policy"] = "policy.json"
    if runner.trainer is not None:
        heads_dir = os.path.join(out, "heads")
        os.makedirs(heads_dir, exist_ok=True)
        for name, head in runner.trainer.heads.items():
            checkpoint.save(os.path.join(heads_dir, f"{name}.bin"), head.model, head.spec)
        files["heads"] = "heads"
    manifest = {
        "format": "armac-run",
        "metrics_schema": SCHEMA_VERSION,
        "config": config.to_dict(),
        "resolved_params": config.resolved_params(),
        "files": files,
    }
    with open(os.path.join(out, "run.json"), "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
