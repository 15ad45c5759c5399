from __future__ import annotations

from dataclasses import asdict, dataclass, field

STEP_SIZES = (5e-5, 2e-4)


@dataclass(frozen=True)
class RegressorSpec:
    """Shape and optimizer settings of one approximator head.

    ``output_width`` is ``max_actions`` for policy-like heads and
    ``num_players * max_actions`` for the critic.
    """

    kind: str
    input_width: int
    output_width: int
    hidden: tuple[int, ...] = (64, 64)
    step_size: float = 5e-5
    beta1: float = 0.0
    beta2: float = 0.999
    eps: float = 1e-8
    activation: str = "crelu"
    seed: int = 0
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in ("tabular_mean", "feedforward"):
            raise ValueError(f"unknown regressor kind {self.kind!r}")
        if self.activation not in ("crelu", "relu"):
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.input_width <= 0 or self.output_width <= 0:
            raise ValueError("widths must be positive")
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hidden"] = list(self.hidden)
        d.pop("extra")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RegressorSpec":
        return cls(**{k: (tuple(v) if k == "hidden" else v) for k, v in d.items()})
