# training/metrics.py

"""
Classification metrics computed from a confusion matrix. Degenerate cases
(no predicted or no true positives, constant predictions) score 0 rather than
raising, matching the usual convention.
"""

from typing import Callable, Dict, Optional, Sequence

import numpy as np

from prompt_learning_engine.models.constants import Metric
from prompt_learning_engine.models.errors import InvalidInputError


def confusion_matrix(labels: Sequence[int], predictions: Sequence[int], num_classes: int) -> np.ndarray:
    """counts[t, p] = number of examples of true class t predicted as p."""
    labels = np.asarray(labels, dtype=np.int64)
    predictions = np.asarray(predictions, dtype=np.int64)
    if labels.shape != predictions.shape:
        raise InvalidInputError(f"{labels.size} labels but {predictions.size} predictions")
    if labels.size == 0:
        raise InvalidInputError("cannot score an empty split")
    for name, values in (("label", labels), ("prediction", predictions)):
        if values.min() < 0 or values.max() >= num_classes:
            raise InvalidInputError(f"{name} out of range for {num_classes} classes")
    counts = np.zeros((num_classes, num_classes), dtype=np.int64)
    np.add.at(counts, (labels, predictions), 1)
    return counts


def accuracy(counts: np.ndarray) -> float:
    return float(np.trace(counts) / counts.sum())


def _f1(tp: float, fp: float, fn: float) -> float:
    denom = 2 * tp + fp + fn
    return float(2 * tp / denom) if denom else 0.0


def binary_f1(counts: np.ndarray) -> float:
    """F1 of class 1 (the positive class)."""
    if counts.shape != (2, 2):
        raise InvalidInputError("binary_f1 needs exactly two classes")
    return _f1(counts[1, 1], counts[0, 1], counts[1, 0])


def macro_f1(counts: np.ndarray) -> float:
    """Unweighted mean F1 over classes that occur in the labels or the predictions."""
    scores = []
    for c in range(counts.shape[0]):
        tp = counts[c, c]
        fp = counts[:, c].sum() - tp
        fn = counts[c, :].sum() - tp
        if tp + fp + fn:
            scores.append(_f1(tp, fp, fn))
    return float(np.mean(scores)) if scores else 0.0


def mcc(counts: np.ndarray) -> float:
    """Matthews correlation, multiclass form; reduces to the binary formula for 2 classes."""
    counts = counts.astype(np.float64)
    s = counts.sum()
    c = np.trace(counts)
    t = counts.sum(axis=1)
    p = counts.sum(axis=0)
    numerator = c * s - np.dot(t, p)
    denominator = np.sqrt((s * s - np.dot(p, p)) * (s * s - np.dot(t, t)))
    return float(numerator / denominator) if denominator > 0 else 0.0


METRIC_FUNCTIONS: Dict[str, Callable[[np.ndarray], float]] = {
    Metric.ACCURACY: accuracy,
    Metric.MACRO_F1: macro_f1,
    Metric.BINARY_F1: binary_f1,
    Metric.MCC: mcc,
}


def compute_metric(metric: str, labels: Sequence[int], predictions: Sequence[int],
                   num_classes: Optional[int] = None) -> float:
    try:
        fn = METRIC_FUNCTIONS[metric]
    except KeyError:
        raise InvalidInputError(f"unknown metric '{metric}'; choose from {sorted(METRIC_FUNCTIONS)}")
    if num_classes is None:
        num_classes = int(max(max(labels, default=0), max(predictions, default=0))) + 1
        num_classes = max(num_classes, 2)
    return fn(confusion_matrix(labels, predictions, num_classes))
