"""Sampled training loop: act with past snapshots, learn from the epoch's replay."""

from __future__ import annotations

import logging
import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from armac.approx import RegressorSpec
from armac.exact.policy import regret_matching_rows
from armac.exact.tree import TreeTooLarge, load_tree
from armac.exact.values import nash_conv
from armac.games import get_descriptor
from armac.sampling import build_episode_record, sample_episode

from .candidates import build_behavior, default_candidates, evaluate_candidates, primary_index
from .config import EpochConfig
from .heads import Head
from .snapshot import PolicyReservoir, PolicySnapshot
from .targets import episode_inputs

log = logging.getLogger(__name__)


class ReplayBuffer:
    """Episode store; emptied at every epoch start unless ``reset_per_epoch`` is off."""

    def __init__(self, capacity: int = 100_000, reset_per_epoch: bool = True):
        self.capacity = capacity
        self.reset_per_epoch = reset_per_epoch
        self.episodes: deque = deque(maxlen=capacity)

    def start_epoch(self) -> None:
        if self.reset_per_epoch:
            self.episodes.clear()

    def extend(self, records) -> None:
        self.episodes.extend(records)

    def __len__(self):
        return len(self.episodes)

    def __getitem__(self, i):
        return self.episodes[i]


class PreparedEpisode:
    """Replay entry: a record plus the arrays every learning step needs."""

    def __init__(self, record, num_actions: int):
        self.record = record
        hkeys, infos, actions = episode_inputs(record, num_actions)
        self.hkeys = hkeys
        self.infos = infos
        self.actions = np.asarray(actions, dtype=np.int64)
        self.num_steps = len(actions)
        masks = np.array([m for _, m in infos[: self.num_steps]], dtype=bool).reshape(self.num_steps, num_actions)
        mine = np.array([s.player == record.learner for s in record.steps], dtype=bool)
        self.learner_rows = np.flatnonzero(mine)
        self.learner_keys = [record.steps[k].info_key.data for k in self.learner_rows]
        self.learner_masks = masks[self.learner_rows]
        self.w_targets = np.zeros((len(self.learner_rows), num_actions))
        for r, k in enumerate(self.learner_rows):
            s = record.steps[k]
            self.w_targets[r, s.legal] = s.advantages
        other = np.flatnonzero(~mine)
        self.avg_keys = [record.steps[k].info_key.data for k in other]
        self.avg_masks = masks[other]
        self.avg_targets = np.zeros((len(other), num_actions))
        for r, k in enumerate(other):
            s = record.steps[k]
            self.avg_targets[r, s.legal] = s.policy / s.policy.sum()
        self.pi = None
        self.pi_epoch = None

    def ensure_policy(self, snapshot) -> None:
        """Cache target-policy rows for every history row (per epoch)."""
        if self.pi_epoch != snapshot.epoch:
            self.pi = np.stack([snapshot.policy(key, mask) for key, mask in self.infos])
            self.pi_epoch = snapshot.epoch


def batch_backup(batch, q, pi, offsets, lam):
    """Tree-Backup targets for a batch of episodes at once.

    Episodes are right-aligned on a virtual terminal row whose value is the
    return (or the bootstrap value of a truncated episode) and which takes
    no action. Returns ``(targets (steps, n), row index of every step)``.
    """
    B = len(batch)
    n = q.shape[1]
    L = max(ep.num_steps for ep in batch) + 1
    pos = np.full((B, L), -1, dtype=np.int64)
    V = np.zeros((B, L, n))
    pa = np.zeros((B, L))
    qa = np.zeros((B, L, n))
    for b, ep in enumerate(batch):
        m = ep.num_steps
        pos[b, L - 1 - m : L - 1] = offsets[b] + np.arange(m)
        if ep.record.truncated:
            r = offsets[b] + m
            V[b, L - 1] = q[r] @ pi[r]
        else:
            V[b, L - 1] = ep.record.returns
    valid = pos >= 0
    rows = pos[valid]
    acts = np.concatenate([ep.actions for ep in batch])
    V[valid] = np.einsum("rna,ra->rn", q[rows], pi[rows])
    pa[valid] = pi[rows, acts]
    qa[valid] = q[rows, :, acts]
    G = np.zeros((B, L, n))
    for k in range(L - 2, -1, -1):
        G[:, k] = V[:, k + 1] + lam * pa[:, k + 1, None] * (G[:, k + 1] - qa[:, k + 1])
    return G[valid], rows


def threads_from_env() -> int:
    try:
        return max(1, int(os.environ.get("ARMAC_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class EpochStats:
    epoch: int
    acting_steps: int
    episodes: int
    primary: str
    candidate_returns: list
    losses: dict = field(default_factory=dict)
    nash_conv_avg: float | None = None
    nash_conv_current: float | None = None
    visited: set = field(default_factory=set)
    returns: np.ndarray | None = None  # (episodes, players) returns of the acting episodes


class ArmacTrainer:
    def __init__(self, game_id: str, config: EpochConfig | None = None, seed: int = 0, threads: int | None = None):
        self.game_id = game_id
        self.config = (config or EpochConfig()).validate()
        self.seed = seed
        self.threads = threads or threads_from_env()
        desc = get_descriptor(game_id)
        self.desc = desc
        self.n, self.A = desc.num_players, desc.max_actions
        cfg = self.config

        def spec(k, width, out):
            return RegressorSpec(cfg.regressor, width, out, cfg.hidden, step_size=cfg.step_size, seed=seed * 16 + k)

        info, hist = desc.info_state_width, desc.history_width
        self.heads = {
            "wbar": Head(spec(0, info, self.A)),
            "critic": Head(spec(1, hist, self.n * self.A)),
            "avg": Head(spec(2, info, self.A)),
            "regret": Head(spec(3, info, self.A)),
        }
        self.reservoir = PolicyReservoir(cfg.reservoir_capacity, np.random.default_rng(np.random.SeedSequence([seed, 1 << 30])))
        self.replay = ReplayBuffer(cfg.replay_capacity, not cfg.cross_epoch_replay)
        self.candidates = default_candidates()
        self.primary = 0
        self.epoch = 0
        self.acting_steps = 0
        self.episodes = 0
        self.history: list[EpochStats] = []
        try:
            self.tree = load_tree(game_id) if desc.enumerable else None
        except TreeTooLarge:
            self.tree = None
        self.latest: PolicySnapshot | None = None

    # -- snapshots -------------------------------------------------------
    def freeze(self, epoch: int, critic: Head | None = None) -> PolicySnapshot:
        heads = {name: h.frozen() for name, h in self.heads.items() if name != "critic"}
        heads["critic"] = critic if critic is not None else self.heads["critic"].frozen()
        return PolicySnapshot(epoch, heads, self.n, self.A, {"acting_steps": self.acting_steps, "seed": self.seed})

    # -- acting ----------------------------------------------------------
    def _episode(self, t: int, k: int, latest: PolicySnapshot):
        cfg = self.config
        learner = (self.episodes + k) % self.n
        rng = np.random.default_rng(np.random.SeedSequence([self.seed, t, 0, k]))
        snap = self.reservoir.sample(rng) if len(self.reservoir) else latest
        choice = build_behavior(latest, self.reservoir, self.candidates, self.primary, rng, cfg.primary_share, cfg.latest_share)
        behavior = [choice.policy if p == learner else snap.policy for p in range(self.n)]
        traj = sample_episode(behavior, self.game_id, rng)
        return build_episode_record(traj, learner, snap.epoch, snap, candidate=choice.candidate, primary=choice.primary)

    def act_epoch(self, t: int, latest: PolicySnapshot) -> list:
        ks = range(self.config.k_act)
        if self.threads > 1:
            with ThreadPoolExecutor(self.threads) as pool:
                records = list(pool.map(lambda k: self._episode(t, k, latest), ks))
        else:
            records = [self._episode(t, k, latest) for k in ks]
        self.episodes += len(records)
        self.acting_steps += sum(len(r.steps) for r in records)
        return records

    # -- learning --------------------------------------------------------
    def learn_epoch(self, t: int, latest: PolicySnapshot) -> dict:
        if len(self.replay) == 0:
            log.warning("epoch %d: empty replay, skipping learning", t)
            return {}
        cfg = self.config
        rng = np.random.default_rng(np.random.SeedSequence([self.seed, t, 2]))
        lr = cfg.step_size_at(t)
        for head in self.heads.values():
            if not head.tabular:
                head.model.optimizer.step_size = lr
        losses = {name: [] for name in self.heads}
        for _ in range(cfg.k_learn):
            size = min(cfg.batch_episodes, len(self.replay))
            batch = [self.replay[int(i)] for i in rng.choice(len(self.replay), size=size, replace=False)]
            for name, value in self._learn_step(batch, latest).items():
                losses[name].append(value)
        return {k: float(np.mean(v)) for k, v in losses.items() if v}

    def _learn_step(self, batch, latest: PolicySnapshot) -> dict:
        n, A = self.n, self.A
        critic = self.heads["critic"]
        for ep in batch:
            ep.ensure_policy(latest)
        hkeys = [k for ep in batch for k in ep.hkeys]
        q = critic.predict(hkeys).reshape(len(hkeys), n, A)
        pi = np.concatenate([ep.pi for ep in batch])
        offsets = np.cumsum([0] + [len(ep.hkeys) for ep in batch])
        g, step_rows = batch_backup(batch, q, pi, offsets, self.config.lam)

        acts = np.concatenate([ep.actions for ep in batch])
        rows = np.arange(len(step_rows))
        tgt = np.zeros((len(step_rows), n, A))
        msk = np.zeros((len(step_rows), n, A))
        tgt[rows, :, acts] = g
        msk[rows, :, acts] = 1.0
        out = {"critic": critic.train_regression([hkeys[r] for r in step_rows], tgt.reshape(len(rows), -1), msk.reshape(len(rows), -1))}

        w = [ep for ep in batch if ep.record.primary and len(ep.learner_rows)]
        if w:
            out["wbar"] = self.heads["wbar"].train_regression(
                [k for ep in w for k in ep.learner_keys], np.concatenate([ep.w_targets for ep in w]), np.concatenate([ep.learner_masks for ep in w])
            )
        lrows = np.concatenate([offsets[b] + ep.learner_rows for b, ep in enumerate(batch)]).astype(np.int64)
        if len(lrows):
            players = np.concatenate([np.full(len(ep.learner_rows), ep.record.learner) for ep in batch]).astype(np.int64)
            qrow = q[lrows, players]
            lmask = np.concatenate([ep.learner_masks for ep in batch])
            adv = np.where(lmask, qrow - np.einsum("ra,ra->r", pi[lrows], qrow)[:, None], 0.0)
            out["regret"] = self.heads["regret"].train_regression([k for ep in batch for k in ep.learner_keys], adv, lmask)
        a = [ep for ep in batch if len(ep.avg_keys)]
        if a:
            out["avg"] = self.heads["avg"].train_classification(
                [k for ep in a for k in ep.avg_keys], np.concatenate([ep.avg_targets for ep in a]), np.concatenate([ep.avg_masks for ep in a])
            )
        return out

    # -- evaluation ------------------------------------------------------
    def policy_arrays(self):
        """(average policy, current policy) over every tree information state."""
        tree = self.tree
        keys = [k.data for k in tree.infoset_keys]
        avg = self.heads["avg"].distribution(keys, tree.legal)
        current = regret_matching_rows(self.heads["wbar"].predict(keys), tree.legal)
        return avg, current

    def evaluate(self) -> tuple[float, float]:
        avg, current = self.policy_arrays()
        return nash_conv(self.tree, avg), nash_conv(self.tree, current)

    # -- outer loop ------------------------------------------------------
    def step_epoch(self, evaluate: bool = False) -> EpochStats:
        cfg = self.config
        t = self.epoch
        latest = self.freeze(t)
        returns = []
        if cfg.eval_episodes:
            returns = evaluate_candidates(
                self.game_id, self.candidates, latest, cfg.eval_episodes, [self.seed, t, 1], cfg.candidate_decay
            )
            self.primary = primary_index(self.candidates)
        self.replay.start_epoch()
        records = self.act_epoch(t, latest)
        self.replay.extend(PreparedEpisode(r, self.A) for r in records)
        losses = self.learn_epoch(t, latest)
        self.reservoir.add(self.freeze_for_reservoir(t, latest))
        for snap in self.reservoir.slots:
            snap.clear_cache()
        stats = EpochStats(t, self.acting_steps, self.episodes, self.candidates[self.primary].name, returns, losses)
        stats.visited = {r.final_history_key for r in records}
        stats.returns = np.array([r.returns for r in records], dtype=float)
        if evaluate and self.tree is not None:
            stats.nash_conv_avg, stats.nash_conv_current = self.evaluate()
        self.history.append(stats)
        self.epoch += 1
        return stats

    def freeze_for_reservoir(self, t: int, latest: PolicySnapshot) -> PolicySnapshot:
        """Snapshot t: the epoch-start policy heads plus the critic trained for pi^t."""
        heads = dict(latest.heads)
        heads["critic"] = self.heads["critic"].frozen()
        return PolicySnapshot(t, heads, self.n, self.A, dict(latest.metadata))

    def run(self, epochs: int, eval_interval: int = 10, callback=None):
        for _ in range(epochs):
            t = self.epoch
            do_eval = eval_interval > 0 and ((t + 1) % eval_interval == 0 or t + 1 == epochs)
            stats = self.step_epoch(evaluate=do_eval)
            if callback is not None:
                callback(stats)
        return self.history
