import numpy as np
import pytest

from prompt_learning_engine.models.constants import Metric
from prompt_learning_engine.models.errors import InvalidInputError
from prompt_learning_engine.training.metrics import compute_metric, confusion_matrix


class TestConfusionMatrix:
    def test_counts(self):
        counts = confusion_matrix([0, 0, 1, 1], [0, 1, 1, 1], 2)
        np.testing.assert_array_equal(counts, [[1, 1], [0, 2]])

    def test_length_mismatch(self):
        with pytest.raises(InvalidInputError):
            confusion_matrix([0, 1], [0], 2)

    def test_out_of_range(self):
        with pytest.raises(InvalidInputError):
            confusion_matrix([0, 2], [0, 1], 2)


class TestMetrics:
    @pytest.mark.parametrize("metric", [Metric.ACCURACY, Metric.MCC, Metric.MACRO_F1, Metric.BINARY_F1])
    def test_perfect_predictions(self, metric):
        labels = [0, 1, 1, 0, 1]
        assert compute_metric(metric, labels, labels) == pytest.approx(1.0)

    def test_one_of_each_outcome(self):
        # TP = FP = FN = TN = 1
        labels, preds = [1, 0, 1, 0], [1, 1, 0, 0]
        assert compute_metric(Metric.BINARY_F1, labels, preds) == pytest.approx(0.5)
        assert compute_metric(Metric.ACCURACY, labels, preds) == pytest.approx(0.5)
        assert compute_metric(Metric.MCC, labels, preds) == pytest.approx(0.0)

    def test_mcc_near_zero_on_random_predictions(self):
        rng = np.random.default_rng(0)
        labels = np.repeat([0, 1], 5000)
        preds = rng.integers(0, 2, size=labels.size)
        assert abs(compute_metric(Metric.MCC, labels, preds)) < 0.05

    def test_mcc_of_inverted_predictions(self):
        labels = [0, 1, 0, 1]
        assert compute_metric(Metric.MCC, labels, [1, 0, 1, 0]) == pytest.approx(-1.0)

    def test_constant_predictions_score_zero_mcc(self):
        assert compute_metric(Metric.MCC, [0, 1, 1], [1, 1, 1]) == 0.0

    def test_macro_f1_multiclass(self):
        labels, preds = [0, 1, 2, 2], [0, 2, 2, 2]
        # class 0: 1.0, class 1: 0.0, class 2: 2*2/(4+1) = 0.8
        assert compute_metric(Metric.MACRO_F1, labels, preds, num_classes=3) == pytest.approx(0.6)

    def test_binary_f1_needs_two_classes(self):
        with pytest.raises(InvalidInputError):
            compute_metric(Metric.BINARY_F1, [0, 1, 2], [0, 1, 2])

    def test_unknown_metric(self):
        with pytest.raises(InvalidInputError, match="unknown metric"):
            compute_metric("auc", [0, 1], [0, 1])
