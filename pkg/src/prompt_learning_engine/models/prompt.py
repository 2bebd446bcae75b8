# models/prompt.py

"""
This file defines the data classes that carry the learnable prompt state
through sampling, gradient estimation and the optimizer update.

A PromptDistribution holds one categorical distribution per prompt position,
all over the same N candidate tokens. Samples, score matrices and gradient
estimates are plain values derived from a distribution snapshot.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np

from prompt_learning_engine.models.constants import SIMPLEX_TOLERANCE
from prompt_learning_engine.models.errors import InvalidInputError


def check_prob_vector(values: np.ndarray, tol: float = SIMPLEX_TOLERANCE) -> None:
    """Raise InvalidInputError unless every row of `values` lies on the simplex."""
    values = np.atleast_2d(values)
    if not np.all(np.isfinite(values)):
        raise InvalidInputError("probability vector contains non-finite entries")
    if np.any(values < -tol) or np.any(values > 1.0 + tol):
        raise InvalidInputError("probability vector entries must lie in [0, 1]")
    sums = values.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > tol):
        raise InvalidInputError(f"probability vector must sum to 1, got {sums.tolist()}")


@dataclass
class PromptDistribution:
    """
    n independent categorical distributions (p_1 ... p_n) over N candidates.
    `rows` has shape (n, N).
    """
    rows: np.ndarray

    def __post_init__(self):
        self.rows = np.array(self.rows, dtype=np.float64)
        if self.rows.ndim != 2:
            raise InvalidInputError("distribution rows must form an n x N matrix")
        if self.n < 1 or self.N < 2:
            raise InvalidInputError(f"need n >= 1 and N >= 2, got n={self.n}, N={self.N}")
        check_prob_vector(self.rows)

    @property
    def n(self) -> int:
        return int(self.rows.shape[0])

    @property
    def N(self) -> int:
        return int(self.rows.shape[1])

    def copy(self) -> "PromptDistribution":
        return PromptDistribution(self.rows.copy())

    def to_dict(self) -> Dict[str, Any]:
        # Decimal strings keep checkpoints byte-stable across platforms.
        return {"rows": [[repr(float(p)) for p in row] for row in self.rows]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PromptDistribution":
        return cls(np.array([[float(p) for p in row] for row in data["rows"]], dtype=np.float64))


@dataclass(frozen=True)
class PromptSample:
    """One sampled index sequence j_1 ... j_n and the realized token strings."""
    indices: np.ndarray
    tokens: List[str]
    log_prob: float

    @property
    def n(self) -> int:
        return int(len(self.indices))


@dataclass(frozen=True)
class ScoreMatrix:
    """
    Gradient of ln P(t_i) with respect to p_i for every position i, evaluated
    at one sample. Row i is +1/p_{i,j_i} at column j_i and -1/p_{i,j_i} elsewhere.
    """
    rows: np.ndarray


@dataclass(frozen=True)
class GradientEstimate:
    """Estimated gradient of the expected loss, one row per prompt position."""
    rows: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.rows))


@dataclass
class SampleBatchRecord:
    """
    The I prompt samples drawn from one distribution snapshot, the mean
    mini-batch loss each of them produced, and their score matrices.
    """
    samples: Sequence[PromptSample]
    losses: Sequence[float]
    scores: Sequence[ScoreMatrix] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.samples)

    def loss_vector(self) -> np.ndarray:
        return np.asarray(self.losses, dtype=np.float64)

    def score_tensor(self) -> np.ndarray:
        """Stack the score matrices into an (I, n, N) array, checking shapes."""
        if len(self.scores) != len(self.losses) or len(self.samples) != len(self.losses):
            raise InvalidInputError(
                f"record has {len(self.samples)} samples, {len(self.losses)} losses "
                f"and {len(self.scores)} scores"
            )
        if not self.scores:
            raise InvalidInputError("record holds no samples")
        shape = self.scores[0].rows.shape
        for score in self.scores:
            if score.rows.shape != shape:
                raise InvalidInputError(f"score shapes differ: {score.rows.shape} vs {shape}")
        return np.stack([score.rows for score in self.scores])
