# optimization/estimator.py

"""
Policy-gradient estimators over a batch of I prompt samples.

    plain:  g_i = (1/I)     sum_k L_k * score_k[i]
    vr:     g_i = (1/(I-1)) sum_k (L_k - L_avg) * score_k[i]

Both share the same expectation along every direction that keeps the row on
the simplex; the leave-mean-out form is invariant to a constant shift of the
losses.
"""

import logging
from typing import Optional

import numpy as np

from prompt_learning_engine.models.errors import InvalidInputError
from prompt_learning_engine.models.prompt import GradientEstimate, SampleBatchRecord

logger = logging.getLogger(__name__)


def _losses_and_scores(record: SampleBatchRecord):
    scores = record.score_tensor()
    losses = record.loss_vector()
    if not np.all(np.isfinite(losses)):
        raise InvalidInputError("losses must be finite")
    return losses, scores


def vr_pge(record: SampleBatchRecord) -> GradientEstimate:
    """Variance-reduced estimator with the mean of the I losses as baseline."""
    if record.size < 2:
        raise InvalidInputError(f"variance-reduced estimator needs I >= 2 samples, got {record.size}")
    losses, scores = _losses_and_scores(record)
    weights = (losses - losses.mean()) / (len(losses) - 1)
    return GradientEstimate(rows=np.tensordot(weights, scores, axes=1))


def plain_pge(record: SampleBatchRecord) -> GradientEstimate:
    """Score-function estimator without a baseline."""
    if record.size < 1:
        raise InvalidInputError("plain estimator needs at least one sample")
    losses, scores = _losses_and_scores(record)
    return GradientEstimate(rows=np.tensordot(losses / len(losses), scores, axes=1))


def clip_by_norm(grad: GradientEstimate, max_norm: Optional[float]) -> GradientEstimate:
    """Rescale the whole estimate so its Frobenius norm is at most `max_norm`."""
    if max_norm is None:
        return grad
    norm = grad.norm
    if norm <= max_norm or norm == 0.0:
        return grad
    logger.debug("Clipping gradient norm %.4g to %.4g", norm, max_norm)
    return GradientEstimate(rows=grad.rows * (max_norm / norm))
