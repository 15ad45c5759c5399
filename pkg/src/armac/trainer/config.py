from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

EPSILONS = (0.0, 0.01, 0.05)


@dataclass
class EpochConfig:
    k_act: int = 512
    k_learn: int = 100
    lam: float = 0.9
    batch_episodes: int = 64
    reservoir_capacity: int = 1024
    epsilons: tuple = EPSILONS
    exact_mode: bool = False
    eval_episodes: int = 128
    candidate_decay: float = 0.9
    primary_share: float = 0.5
    latest_share: float = 0.5
    cross_epoch_replay: bool = False
    replay_capacity: int = 100_000
    regressor: str = "feedforward"
    hidden: tuple = (64, 64)
    step_size: float = 5e-5
    step_size_decay: float = 0.0  # epoch t trains with step_size / sqrt(1 + decay * t)
    extra: dict = field(default_factory=dict)

    def validate(self) -> "EpochConfig":
        if self.k_act < 1 or self.k_learn < 1:
            raise ValueError("k_act and k_learn must be at least 1")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lam must be in [0, 1]")
        if self.batch_episodes < 1 or self.reservoir_capacity < 1 or self.eval_episodes < 0:
            raise ValueError("batch_episodes and reservoir_capacity must be positive")
        if tuple(self.epsilons) != EPSILONS:
            raise ValueError(f"epsilon grid is fixed to {EPSILONS}")
        if self.regressor not in ("feedforward", "tabular_mean"):
            raise ValueError(f"unknown regressor {self.regressor!r}")
        if not 0.0 <= self.candidate_decay < 1.0:
            raise ValueError("candidate_decay must be in [0, 1)")
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if self.step_size_decay < 0:
            raise ValueError("step_size_decay must be non-negative")
        self.epsilons = tuple(self.epsilons)
        self.hidden = tuple(self.hidden)
        return self

    @classmethod
    def from_dict(cls, d: dict) -> "EpochConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown epoch config keys: {sorted(unknown)}")
        return cls(**d).validate()

    def step_size_at(self, epoch: int) -> float:
        return self.step_size / (1.0 + self.step_size_decay * epoch) ** 0.5

    def to_dict(self) -> dict:
        d = asdict(self)
        d["epsilons"] = list(self.epsilons)
        d["hidden"] = list(self.hidden)
        return d
