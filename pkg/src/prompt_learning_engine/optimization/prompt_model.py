# optimization/prompt_model.py

"""
Operations on the categorical prompt distribution: initialization, sampling,
the score function of a sample, and the deterministic argmax readout.
"""

from typing import List, Optional

import numpy as np

from prompt_learning_engine.models.constants import PROB_FLOOR
from prompt_learning_engine.models.errors import InvalidInputError
from prompt_learning_engine.models.prompt import PromptDistribution, PromptSample, ScoreMatrix
from prompt_learning_engine.models.vocabulary import CandidateVocabulary


def uniform_init(n: int, N: int) -> PromptDistribution:
    """n rows, each the uniform distribution over N candidates."""
    if n < 1 or N < 2:
        raise InvalidInputError(f"need n >= 1 and N >= 2, got n={n}, N={N}")
    return PromptDistribution(np.full((n, N), 1.0 / N))


def sample(
    dist: PromptDistribution,
    rng: np.random.Generator,
    vocab: Optional[CandidateVocabulary] = None,
) -> PromptSample:
    """
    Draw j_i ~ Cat(p_i) independently for every position by inverse-CDF
    sampling. Consumes exactly n uniforms from `rng`.
    """
    rows = dist.rows
    cdf = np.cumsum(rows, axis=1)
    cdf[:, -1] = 1.0
    u = rng.random(dist.n)
    indices = np.argmax(u[:, None] < cdf, axis=1)
    log_prob = float(np.log(rows[np.arange(dist.n), indices]).sum())
    tokens = [vocab[j] for j in indices] if vocab is not None else [str(j) for j in indices]
    return PromptSample(indices=indices, tokens=tokens, log_prob=log_prob)


def score(dist: PromptDistribution, prompt_sample: PromptSample, floor: float = PROB_FLOOR) -> ScoreMatrix:
    """
    Gradient of ln P(t_i) with respect to p_i, using the sum-to-one
    substitution: +1/p_{i,j_i} at the sampled column, -1/p_{i,j_i} elsewhere.
    p_{i,j_i} is clamped below at `floor`.
    """
    indices = np.asarray(prompt_sample.indices)
    if indices.shape != (dist.n,):
        raise InvalidInputError(f"sample has {indices.size} positions, distribution has {dist.n}")
    if np.any(indices < 0) or np.any(indices >= dist.N):
        raise InvalidInputError(f"sample indices must lie in [0, {dist.N})")
    positions = np.arange(dist.n)
    inv = 1.0 / np.maximum(dist.rows[positions, indices], floor)
    rows = np.repeat(-inv[:, None], dist.N, axis=1)
    rows[positions, indices] = inv
    return ScoreMatrix(rows=rows)


def argmax_prompt(dist: PromptDistribution, vocab: CandidateVocabulary) -> List[str]:
    """Most probable token per position; np.argmax breaks ties at the lowest index."""
    if len(vocab) != dist.N:
        raise InvalidInputError(f"vocabulary has {len(vocab)} entries, distribution expects {dist.N}")
    return [vocab[j] for j in np.argmax(dist.rows, axis=1)]
