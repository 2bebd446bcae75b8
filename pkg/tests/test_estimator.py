import itertools

import numpy as np
import pytest

from prompt_learning_engine.models.errors import InvalidInputError
from prompt_learning_engine.models.prompt import (
    GradientEstimate, PromptDistribution, PromptSample, SampleBatchRecord, ScoreMatrix,
)
from prompt_learning_engine.optimization.estimator import clip_by_norm, plain_pge, vr_pge
from prompt_learning_engine.optimization.prompt_model import score, uniform_init


def make_sample(dist, indices):
    indices = np.asarray(indices)
    log_prob = float(np.log(dist.rows[np.arange(dist.n), indices]).sum())
    return PromptSample(indices=indices, tokens=[str(j) for j in indices], log_prob=log_prob)


def make_record(dist, prompts, losses):
    samples = [make_sample(dist, p) for p in prompts]
    return SampleBatchRecord(samples=samples, losses=list(losses), scores=[score(dist, s) for s in samples])


def enumerate_expectation(dist, loss_of, num_samples, estimator):
    """Probability-weighted average of an estimator over every ordered tuple of prompts."""
    prompts = list(itertools.product(range(dist.N), repeat=dist.n))
    total = np.zeros_like(dist.rows)
    for combo in itertools.product(prompts, repeat=num_samples):
        weight = np.prod([dist.rows[np.arange(dist.n), p].prod() for p in combo])
        record = make_record(dist, combo, [loss_of[p] for p in combo])
        total += weight * estimator(record).rows
    return total


def population_terms(dist, loss_of):
    """E[L * score], E[L] and E[score], summed in closed form over all prompts."""
    e_ls = np.zeros_like(dist.rows)
    e_s = np.zeros_like(dist.rows)
    e_l = 0.0
    for p, loss in loss_of.items():
        prob = dist.rows[np.arange(dist.n), p].prod()
        s = score(dist, make_sample(dist, p)).rows
        e_ls += prob * loss * s
        e_s += prob * s
        e_l += prob * loss
    return e_ls, e_l, e_s


class TestVrPge:
    def test_equal_losses_give_zero(self):
        dist = uniform_init(2, 3)
        record = make_record(dist, [(0, 1), (2, 2)], [0.7, 0.7])
        np.testing.assert_array_equal(vr_pge(record).rows, np.zeros((2, 3)))

    def test_two_samples_weighted_half(self):
        dist = PromptDistribution([[0.5, 0.25, 0.25]])
        record = make_record(dist, [(0,), (1,)], [1.0, 0.0])
        expected = 0.5 * record.scores[0].rows - 0.5 * record.scores[1].rows
        np.testing.assert_allclose(vr_pge(record).rows, expected)

    def test_planted_pair_expectation(self):
        dist = PromptDistribution([[0.6, 0.4]])
        loss_of = {(0,): 1.0, (1,): 0.0}
        np.testing.assert_allclose(enumerate_expectation(dist, loss_of, 2, vr_pge), [[1.0, -1.0]], atol=1e-12)
        e_ls, _, _ = population_terms(dist, loss_of)
        np.testing.assert_allclose(e_ls, [[1.0, -1.0]], atol=1e-12)

    def test_needs_two_samples(self):
        dist = uniform_init(1, 2)
        with pytest.raises(InvalidInputError):
            vr_pge(make_record(dist, [(0,)], [1.0]))

    def test_mismatched_shapes(self):
        dist = uniform_init(1, 2)
        record = make_record(dist, [(0,), (1,)], [1.0, 0.0])
        record.scores = [record.scores[0], ScoreMatrix(rows=np.zeros((2, 2)))]
        with pytest.raises(InvalidInputError):
            vr_pge(record)
        with pytest.raises(InvalidInputError):
            vr_pge(SampleBatchRecord(samples=record.samples, losses=[1.0], scores=record.scores))


class TestPlainPge:
    def test_zero_loss(self):
        dist = uniform_init(1, 4)
        np.testing.assert_array_equal(plain_pge(make_record(dist, [(1,)], [0.0])).rows, np.zeros((1, 4)))

    def test_scalar_multiple_of_score(self):
        dist = uniform_init(1, 4)
        record = make_record(dist, [(0,)], [2.0])
        np.testing.assert_allclose(plain_pge(record).rows, [[8.0, -8.0, -8.0, -8.0]])

    def test_planted_pair_expectation(self):
        dist = PromptDistribution([[0.6, 0.4]])
        loss_of = {(0,): 1.0, (1,): 0.0}
        np.testing.assert_allclose(enumerate_expectation(dist, loss_of, 2, plain_pge), [[1.0, -1.0]], atol=1e-12)


class TestUnbiasedness:
    """
    The leave-mean-out estimator has expectation E[L s] - E[L] E[s]. With the
    sum-to-one score, E[s] is (2 - N) in every entry, so the two sides agree
    exactly for N = 2 and up to a per-row constant (which the simplex
    projection absorbs) for larger N.
    """

    @pytest.mark.parametrize("n, N", [(1, 2), (2, 2), (1, 3), (2, 3)])
    @pytest.mark.parametrize("num_samples", [2, 3])
    def test_matches_population_covariance(self, n, N, num_samples):
        rng = np.random.default_rng(100 * n + 10 * N + num_samples)
        dist = PromptDistribution(rng.dirichlet(np.ones(N) * 2.0, size=n))
        loss_of = {p: float(rng.uniform(0.0, 3.0)) for p in itertools.product(range(N), repeat=n)}

        expectation = enumerate_expectation(dist, loss_of, num_samples, vr_pge)
        e_ls, e_l, e_s = population_terms(dist, loss_of)
        np.testing.assert_allclose(e_s, 2.0 - N, atol=1e-12)
        np.testing.assert_allclose(expectation, e_ls - e_l * e_s, atol=1e-10)

        centered = lambda m: m - m.mean(axis=1, keepdims=True)
        np.testing.assert_allclose(centered(expectation), centered(e_ls), atol=1e-10)
        if N == 2:
            np.testing.assert_allclose(expectation, e_ls, atol=1e-10)


class TestBaselineAndLinearity:
    def test_shift_leaves_vr_unchanged_but_moves_plain(self):
        dist = uniform_init(2, 4)
        prompts = [(0, 1), (3, 3), (2, 0), (1, 1)]
        losses = np.array([0.5, 0.25, 1.0, 2.0])
        base = make_record(dist, prompts, losses)
        shifted = make_record(dist, prompts, losses + 3.0)
        np.testing.assert_array_equal(vr_pge(shifted).rows, vr_pge(base).rows)
        assert not np.allclose(plain_pge(shifted).rows, plain_pge(base).rows)

    def test_vr_is_linear_in_losses(self):
        rng = np.random.default_rng(9)
        dist = PromptDistribution(rng.dirichlet(np.ones(5), size=3))
        prompts = [tuple(rng.integers(0, 5, size=3)) for _ in range(4)]
        l1, l2 = rng.normal(size=4), rng.normal(size=4)
        combined = vr_pge(make_record(dist, prompts, 2.0 * l1 - 0.5 * l2)).rows
        separate = 2.0 * vr_pge(make_record(dist, prompts, l1)).rows - 0.5 * vr_pge(make_record(dist, prompts, l2)).rows
        np.testing.assert_allclose(combined, separate, atol=1e-9)


@pytest.mark.slow
class TestVarianceReduction:
    def test_vr_has_lower_variance_than_plain(self):
        # losses offset from zero, where a baseline pays off
        dist = PromptDistribution([[0.6, 0.4]])
        loss_of = {0: 2.0, 1: 1.0}
        rng = np.random.default_rng(12)
        trials, num_samples = 50000, 4
        draws = (rng.random((trials, num_samples)) >= 0.6).astype(int)
        scores = {j: score(dist, make_sample(dist, [j])) for j in (0, 1)}
        samples = {j: make_sample(dist, [j]) for j in (0, 1)}

        vr, plain = np.empty((trials, 2)), np.empty((trials, 2))
        for t, row in enumerate(draws):
            record = SampleBatchRecord(
                samples=[samples[j] for j in row],
                losses=[loss_of[j] for j in row],
                scores=[scores[j] for j in row],
            )
            vr[t] = vr_pge(record).rows[0]
            plain[t] = plain_pge(record).rows[0]
        assert np.all(vr.var(axis=0) < plain.var(axis=0))


class TestClip:
    def test_no_clip_when_disabled_or_small(self):
        grad = GradientEstimate(rows=np.array([[3.0, 4.0]]))
        assert clip_by_norm(grad, None) is grad
        assert clip_by_norm(grad, 10.0) is grad

    def test_rescales_to_max_norm(self):
        clipped = clip_by_norm(GradientEstimate(rows=np.array([[3.0, 4.0]])), 1.0)
        np.testing.assert_allclose(clipped.rows, [[0.6, 0.8]])
        assert clipped.norm == pytest.approx(1.0)
