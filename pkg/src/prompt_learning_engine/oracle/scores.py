# oracle/scores.py

"""
Per-class scores returned by an oracle and the losses computed from them.
"""

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from prompt_learning_engine.models.constants import LOSS_PROB_CLAMP, LossKind
from prompt_learning_engine.models.errors import ConfigurationError, InvalidInputError


@dataclass(frozen=True)
class ClassScores:
    """Raw per-class scores (log-probabilities or logits) and their softmax."""
    raw: np.ndarray
    probs: np.ndarray

    @classmethod
    def from_logits(cls, raw: Sequence[float]) -> "ClassScores":
        raw = np.asarray(raw, dtype=np.float64)
        shifted = np.exp(raw - raw.max())
        return cls(raw=raw, probs=shifted / shifted.sum())

    @classmethod
    def from_word_scores(cls, word_scores: Sequence[float], class_slices: Sequence[slice]) -> "ClassScores":
        """
        Collapse per-word log-probabilities into per-class scores: a class's
        probability mass is the sum of its words' probabilities.
        """
        word_scores = np.asarray(word_scores, dtype=np.float64)
        raw = np.array([np.logaddexp.reduce(word_scores[s]) for s in class_slices])
        return cls.from_logits(raw)

    @property
    def num_classes(self) -> int:
        return int(self.probs.size)

    @property
    def prediction(self) -> int:
        return int(np.argmax(self.probs))


def _check_label(scores: ClassScores, label: int) -> None:
    if not 0 <= label < scores.num_classes:
        raise InvalidInputError(f"label {label} out of range for {scores.num_classes} classes")


def cross_entropy(scores: ClassScores, label: int) -> float:
    """-ln p_label, with p clamped below at 1e-12."""
    _check_label(scores, label)
    return float(-np.log(max(scores.probs[label], LOSS_PROB_CLAMP)))


def hinge(scores: ClassScores, label: int, margin: float = 1.0) -> float:
    """Multiclass margin hinge on probabilities: max(0, margin - p_y + max_{y' != y} p_y')."""
    _check_label(scores, label)
    if margin <= 0:
        raise InvalidInputError(f"margin must be > 0, got {margin}")
    rivals = np.delete(scores.probs, label)
    return float(max(0.0, margin - scores.probs[label] + rivals.max()))


def loss_function(loss_kind: str, margin: float = 1.0) -> Callable[[ClassScores, int], float]:
    if loss_kind == LossKind.CROSS_ENTROPY:
        return cross_entropy
    if loss_kind == LossKind.HINGE:
        return lambda scores, label: hinge(scores, label, margin)
    raise ConfigurationError(f"unknown loss kind '{loss_kind}'")
