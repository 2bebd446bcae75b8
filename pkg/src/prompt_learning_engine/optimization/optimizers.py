# optimization/optimizers.py

"""
Row update rules. Each optimizer takes a gradient estimate, moves the rows
against it and projects every row back onto the simplex.
"""

from typing import Any, Dict

import numpy as np

from prompt_learning_engine.models.constants import OptimizerKind
from prompt_learning_engine.models.errors import ConfigurationError, InvalidInputError
from prompt_learning_engine.models.prompt import GradientEstimate, PromptDistribution
from prompt_learning_engine.models.train_config import TrainConfig
from prompt_learning_engine.optimization.simplex import project_rows


class ProjectedSGD:
    """p_i <- proj_C(p_i - lr * g_i)."""

    kind = OptimizerKind.PROJECTED_SGD

    def __init__(self, learning_rate: float):
        self.learning_rate = learning_rate

    def step(self, dist: PromptDistribution, grad: GradientEstimate) -> PromptDistribution:
        _check_shapes(dist, grad)
        return PromptDistribution(project_rows(dist.rows - self.learning_rate * grad.rows))

    def state_dict(self) -> Dict[str, Any]:
        return {}

    def load_state_dict(self, state: Dict[str, Any]) -> None:
        pass


class AdaptiveMomentProjected:
    """
    Bias-corrected first/second moment update with optional decoupled weight
    decay, followed by the same per-row projection.
    """

    kind = OptimizerKind.ADAPTIVE_MOMENT_PROJECTED

    def __init__(self, learning_rate: float, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8, weight_decay: float = 0.0):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.weight_decay = weight_decay
        self.t = 0
        self.m = None
        self.v = None

    def step(self, dist: PromptDistribution, grad: GradientEstimate) -> PromptDistribution:
        _check_shapes(dist, grad)
        if self.m is None:
            self.m = np.zeros_like(dist.rows)
            self.v = np.zeros_like(dist.rows)
        self.t += 1
        g = grad.rows
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * g
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * g * g
        m_hat = self.m / (1.0 - self.beta1 ** self.t)
        v_hat = self.v / (1.0 - self.beta2 ** self.t)
        rows = dist.rows * (1.0 - self.learning_rate * self.weight_decay)
        rows = rows - self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)
        return PromptDistribution(project_rows(rows))

    def state_dict(self) -> Dict[str, Any]:
        if self.m is None:
            return {"t": self.t}
        return {
            "t": self.t,
            "m": [[repr(float(x)) for x in row] for row in self.m],
            "v": [[repr(float(x)) for x in row] for row in self.v],
        }

    def load_state_dict(self, state: Dict[str, Any]) -> None:
        self.t = int(state.get("t", 0))
        if "m" in state:
            self.m = np.array([[float(x) for x in row] for row in state["m"]])
            self.v = np.array([[float(x) for x in row] for row in state["v"]])


def _check_shapes(dist: PromptDistribution, grad: GradientEstimate) -> None:
    if grad.rows.shape != dist.rows.shape:
        raise InvalidInputError(f"gradient shape {grad.rows.shape} does not match distribution {dist.rows.shape}")


def build_optimizer(config: TrainConfig):
    if config.optimizer_kind == OptimizerKind.PROJECTED_SGD:
        return ProjectedSGD(config.learning_rate)
    if config.optimizer_kind == OptimizerKind.ADAPTIVE_MOMENT_PROJECTED:
        return AdaptiveMomentProjected(
            config.learning_rate, config.beta1, config.beta2, config.adam_eps, config.weight_decay,
        )
    raise ConfigurationError(f"unknown optimizer_kind '{config.optimizer_kind}'")
