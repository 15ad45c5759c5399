"""Run configuration: one JSON document, validated before anything runs."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

from armac.games import GAME_IDS
from armac.trainer.config import EpochConfig

ALGORITHMS = ("cfr", "mccfr_os", "mc_rcfr", "armac", "armac_exact")

# algorithm-specific keys and their defaults
_SAMPLED_CFR = {"epsilon": 0.6}
_RCFR = {
    "epsilon": 0.6,
    "regressor": "tabular_mean",
    "episodes_per_iteration": 1,
    "memory": 100_000,
    "train_steps": 100,
    "batch_size": 64,
    "hidden": [64, 64],
    "step_size": 5e-5,
}
PARAM_DEFAULTS = {
    "cfr": {},
    "armac_exact": {},
    "mccfr_os": _SAMPLED_CFR,
    "mc_rcfr": _RCFR,
    "armac": EpochConfig().to_dict(),
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    game: str = "kuhn"
    algo: str = "cfr"
    iterations: int = 1000  # CFR iterations or ARMAC epochs
    seed: int = 0
    eval_interval: int = 10
    out: str | None = None
    params: dict = field(default_factory=dict)

    def validate(self) -> "RunConfig":
        if self.game not in GAME_IDS:
            raise ConfigError(f"unknown game {self.game!r}; known: {', '.join(GAME_IDS)}")
        if self.algo not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algo!r}; known: {', '.join(ALGORITHMS)}")
        for name in ("iterations", "seed", "eval_interval"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"{name} must be an integer")
        if self.iterations < 1:
            raise ConfigError("iterations must be at least 1")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.eval_interval < 0:
            raise ConfigError("eval_interval must be non-negative")
        if not isinstance(self.params, dict):
            raise ConfigError("params must be an object")
        known = PARAM_DEFAULTS[self.algo]
        unknown = set(self.params) - set(known)
        if unknown:
            raise ConfigError(f"unknown {self.algo} parameters: {sorted(unknown)}")
        if self.algo == "armac":
            try:
                self.epoch_config()
            except (TypeError, ValueError) as exc:
                raise ConfigError(str(exc)) from None
        if self.algo in ("mccfr_os", "mc_rcfr"):
            eps = self.resolved_params()["epsilon"]
            if not 0.0 < eps <= 1.0:
                raise ConfigError("epsilon must be in (0, 1]")
        if self.algo == "mc_rcfr" and self.resolved_params()["regressor"] not in ("tabular_mean", "feedforward"):
            raise ConfigError("regressor must be tabular_mean or feedforward")
        if self.algo == "armac_exact" and self.game == "gridworld":
            raise ConfigError("armac_exact needs an enumerable game")
        if self.algo == "cfr" and self.game == "gridworld":
            raise ConfigError("cfr needs an enumerable game")
        return self

    def resolved_params(self) -> dict:
        out = dict(PARAM_DEFAULTS[self.algo])
        out.update(self.params)
        return out

    def epoch_config(self) -> EpochConfig:
        return EpochConfig.from_dict(self.resolved_params())

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


def load_config(path: str | None, overrides: dict) -> RunConfig:
    """File values first, then every non-None override; validated."""
    base: dict = {}
    if path:
        try:
            with open(path) as fh:
                base = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror}") from None
    cfg = RunConfig.from_dict(base)
    for k, v in overrides.items():
        if v is not None:
            setattr(cfg, k, v)
    return cfg.validate()
