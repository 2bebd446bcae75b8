# models/train_config.py

"""
Run hyper-parameters. Defaults mirror config/defaults.yml; the command line and
user YAML files override them through TrainConfig.from_dict.
"""

from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Optional

from prompt_learning_engine.models.constants import (
    BILLING_UNITS, LOSS_ALIASES, LOSS_KINDS, METRICS, OPTIMIZER_ALIASES, OPTIMIZER_KINDS,
    PLACEMENTS, BillingUnit, LossKind, Metric, OptimizerKind, Placement,
)
from prompt_learning_engine.models.errors import ConfigurationError


@dataclass
class TrainConfig:
    """Hyper-parameters of one training run."""
    prompt_length: int = 50  # n
    vocab_size: int = 100  # N
    sample_count: int = 4  # I
    learning_rate: float = 1e-4  # eta
    epochs: int = 30
    batch_size: int = 4
    eval_batch_size: int = 4
    loss_kind: str = LossKind.CROSS_ENTROPY
    hinge_margin: float = 1.0
    optimizer_kind: str = OptimizerKind.PROJECTED_SGD
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    weight_decay: float = 0.0
    grad_clip: Optional[float] = None
    placement: str = Placement.PREFIX
    budget_limit: int = 8000
    billing_unit: str = BillingUnit.BATCH
    metric: str = Metric.ACCURACY
    k_shot: int = 16
    seed: int = 42

    def __post_init__(self):
        self.loss_kind = LOSS_ALIASES.get(self.loss_kind, self.loss_kind)
        self.optimizer_kind = OPTIMIZER_ALIASES.get(self.optimizer_kind, self.optimizer_kind)

    def validate(self) -> "TrainConfig":
        """Check the invariants a training run relies on; returns self."""
        problems = []
        if not self.learning_rate > 0:
            problems.append(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.epochs < 1:
            problems.append(f"epochs must be >= 1, got {self.epochs}")
        if self.sample_count < 2:
            problems.append(f"sample_count must be >= 2, got {self.sample_count}")
        if self.budget_limit < 0:
            problems.append(f"budget_limit must be >= 0, got {self.budget_limit}")
        if self.prompt_length < 1:
            problems.append(f"prompt_length must be >= 1, got {self.prompt_length}")
        if self.vocab_size < 2:
            problems.append(f"vocab_size must be >= 2, got {self.vocab_size}")
        if self.batch_size < 1 or self.eval_batch_size < 1:
            problems.append("batch sizes must be >= 1")
        if self.hinge_margin <= 0:
            problems.append(f"hinge_margin must be > 0, got {self.hinge_margin}")
        if self.grad_clip is not None and self.grad_clip <= 0:
            problems.append(f"grad_clip must be > 0 when set, got {self.grad_clip}")
        if self.loss_kind not in LOSS_KINDS:
            problems.append(f"unknown loss_kind '{self.loss_kind}'")
        if self.optimizer_kind not in OPTIMIZER_KINDS:
            problems.append(f"unknown optimizer_kind '{self.optimizer_kind}'")
        if self.placement not in PLACEMENTS:
            problems.append(f"unknown placement '{self.placement}'")
        if self.billing_unit not in BILLING_UNITS:
            problems.append(f"unknown billing_unit '{self.billing_unit}'")
        if self.metric not in METRICS:
            problems.append(f"unknown metric '{self.metric}'")
        if problems:
            raise ConfigurationError("; ".join(problems))
        return self

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"unknown training options: {', '.join(unknown)}")
        return cls(**{key: value for key, value in data.items() if value is not None or key == "grad_clip"})
