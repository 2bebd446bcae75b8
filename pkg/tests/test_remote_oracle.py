from types import SimpleNamespace

import numpy as np
import pytest
import requests
from flask import Flask, jsonify

from prompt_learning_engine.models.constants import TrainStatus
from prompt_learning_engine.models.errors import (
    BudgetExceededError, ConfigurationError, OracleUnavailableError,
)
from prompt_learning_engine.models.train_config import TrainConfig
from prompt_learning_engine.oracle.budget import BudgetLedger
from prompt_learning_engine.oracle import remote as remote_module
from prompt_learning_engine.oracle.mock_server import MockScoringServer, word_logprob_seed
from prompt_learning_engine.oracle.query import build_query
from prompt_learning_engine.oracle.remote import RemoteOracle
from prompt_learning_engine.oracle.synthetic import make_planted_examples, planted_vocabulary
from prompt_learning_engine.training.few_shot import make_few_shot_split
from prompt_learning_engine.training.trainer import Trainer


def remote(server, limit=100, **kwargs):
    kwargs.setdefault("backoff_seconds", 0.01)
    return RemoteOracle(server.url, BudgetLedger(limit), **kwargs)


def fixed_reply_app(reply, hits):
    """A scoring endpoint that answers every request with the same 200 body."""
    app = Flask(__name__)

    @app.route("/v1/score", methods=["POST"])
    def score():
        hits.append(1)
        return reply()

    return app


def small_config(**overrides):
    values = dict(prompt_length=2, vocab_size=5, sample_count=2, learning_rate=1e-2, epochs=2,
                  batch_size=4, eval_batch_size=4, k_shot=4, budget_limit=100, seed=5)
    values.update(overrides)
    return TrainConfig(**values)


class TestMockScoring:
    def test_scores_follow_the_seeded_log_probs(self, mock_server_factory, planted_verbalizer):
        oracle = remote(mock_server_factory())
        text = "the plot was great"
        [scores] = oracle.predict([build_query([], text)], planted_verbalizer)
        raw = np.array([word_logprob_seed(text, "terrible"), word_logprob_seed(text, "great")])
        expected = np.exp(raw - raw.max()) / np.exp(raw - raw.max()).sum()
        np.testing.assert_allclose(scores.probs, expected, atol=1e-9)
        assert oracle.ledger.used == 1

    def test_boost_makes_trigger_word_learnable(self, mock_server_factory, planted_verbalizer):
        oracle = remote(mock_server_factory(boosts={"brisk": {"terrible": 8.0}}))
        [plain, boosted] = oracle.predict(
            [build_query([], "the film"), build_query(["brisk"], "the film")], planted_verbalizer,
        )
        assert boosted.probs[0] > plain.probs[0]
        assert boosted.prediction == 0

    def test_stats_endpoint(self, mock_server_factory, planted_verbalizer):
        server = mock_server_factory()
        remote(server).predict([build_query([], "x")], planted_verbalizer)
        assert requests.get(server.url + "/v1/stats", timeout=5).json() == {
            "received": 1, "served": 1, "rate_limited": 0,
        }

    def test_malformed_body_is_rejected(self, mock_server_factory):
        server = mock_server_factory()
        response = requests.post(server.url + "/v1/score", json={"inputs": ["x"]}, timeout=5)
        assert response.status_code == 400


class TestRetriesAndFailures:
    def test_rate_limited_request_is_retried_and_billed_once(self, mock_server_factory, planted_verbalizer):
        server = mock_server_factory(rate_limit_every=2)
        oracle = remote(server, max_in_flight=1)
        for _ in range(4):
            oracle.predict([build_query([], "the plot")], planted_verbalizer)
        assert oracle.ledger.used == 4
        assert server.served == 4

    def test_retries_exhausted(self, mock_server_factory, planted_verbalizer):
        server = mock_server_factory(rate_limit_every=1)
        oracle = remote(server, max_attempts=3)
        with pytest.raises(OracleUnavailableError, match="after 3 attempts"):
            oracle.predict([build_query([], "the plot")], planted_verbalizer)
        assert oracle.ledger.used == 0
        assert oracle.ledger.remaining == 100
        assert server.served == 0

    def test_client_error_is_not_retried(self, mock_server_factory, planted_verbalizer):
        server = mock_server_factory(auth_token="s3cret")
        oracle = remote(server)
        with pytest.raises(OracleUnavailableError, match="HTTP 401"):
            oracle.predict([build_query([], "x")], planted_verbalizer)
        stats = requests.get(server.url + "/v1/stats", timeout=5).json()
        assert stats["received"] == 1
        assert oracle.ledger.used == 0

    def test_bearer_token_is_sent(self, mock_server_factory, planted_verbalizer):
        server = mock_server_factory(auth_token="s3cret")
        oracle = remote(server, auth_token="s3cret")
        assert len(oracle.predict([build_query([], "x")], planted_verbalizer)) == 1

    def test_unreachable_endpoint(self, planted_verbalizer):
        oracle = RemoteOracle("http://127.0.0.1:9", BudgetLedger(10), max_attempts=2, backoff_seconds=0.0, timeout=2)
        with pytest.raises(OracleUnavailableError, match="transport error"):
            oracle.predict([build_query([], "x")], planted_verbalizer)
        assert oracle.ledger.used == 0

    @pytest.mark.parametrize("reply", [
        lambda: jsonify({"scores": [[-0.1]]}),
        lambda: jsonify({"scores": [[-0.1, -0.2], [-0.3, -0.4]]}),
        lambda: jsonify({"result": []}),
        lambda: ("not json", 200, {"Content-Type": "text/plain"}),
    ], ids=["wrong-width", "wrong-rows", "no-scores", "non-json"])
    def test_unusable_success_is_still_billed(self, planted_verbalizer, reply):
        hits = []
        with MockScoringServer(fixed_reply_app(reply, hits)) as server:
            oracle = remote(server)
            with pytest.raises(OracleUnavailableError) as info:
                oracle.predict([build_query([], "x")], planted_verbalizer)
        assert info.value.billed
        assert len(hits) == 1
        assert oracle.ledger.used == 1
        assert oracle.ledger.remaining == 99

    def test_training_halt_on_unusable_success_counts_the_call(self, planted_task, planted_verbalizer, tmp_path):
        hits = []
        examples = make_planted_examples(planted_task, per_class=8, seed=5)
        split = make_few_shot_split(examples, k=4, seed=5)
        config = small_config()
        with MockScoringServer(fixed_reply_app(lambda: jsonify({"scores": [[-0.1]]}), hits)) as server:
            oracle = remote(server, max_in_flight=1)
            trainer = Trainer(config, planted_vocabulary(planted_task, 5), oracle, planted_verbalizer)
            with pytest.raises(OracleUnavailableError) as info:
                trainer.train(split, str(tmp_path / "halted.json"))
        assert info.value.checkpoint.status == TrainStatus.ORACLE_UNAVAILABLE
        assert info.value.checkpoint.billed_calls == len(hits) == 1

    def test_backoff_is_jittered_around_the_exponential_schedule(self, mock_server_factory, planted_verbalizer,
                                                                 monkeypatch):
        delays = []
        monkeypatch.setattr(remote_module, "time", SimpleNamespace(sleep=delays.append))
        oracle = remote(mock_server_factory(rate_limit_every=1), max_attempts=4, backoff_seconds=1.0, jitter=0.2)
        with pytest.raises(OracleUnavailableError):
            oracle.predict([build_query([], "x")], planted_verbalizer)
        assert len(delays) == 3
        for delay, base in zip(delays, [1.0, 2.0, 4.0]):
            assert 0.8 * base <= delay <= 1.2 * base

    def test_zero_jitter_gives_the_plain_schedule(self, mock_server_factory, planted_verbalizer, monkeypatch):
        delays = []
        monkeypatch.setattr(remote_module, "time", SimpleNamespace(sleep=delays.append))
        oracle = remote(mock_server_factory(rate_limit_every=1), max_attempts=3, backoff_seconds=0.5, jitter=0.0)
        with pytest.raises(OracleUnavailableError):
            oracle.predict([build_query([], "x")], planted_verbalizer)
        assert delays == [0.5, 1.0]


class TestConfiguration:
    def test_from_env_requires_endpoint(self, monkeypatch):
        monkeypatch.delenv("ORACLE_ENDPOINT", raising=False)
        with pytest.raises(ConfigurationError):
            RemoteOracle.from_env(BudgetLedger(1))

    def test_from_env(self, monkeypatch):
        monkeypatch.setenv("ORACLE_ENDPOINT", "http://scoring.internal:8080/")
        monkeypatch.setenv("ORACLE_AUTH_TOKEN", "tok")
        oracle = RemoteOracle.from_env(BudgetLedger(1))
        assert oracle.url == "http://scoring.internal:8080/v1/score"
        assert oracle.auth_token == "tok"


class TestConcurrency:
    def test_predict_many_preserves_order(self, mock_server_factory, planted_verbalizer):
        server = mock_server_factory()
        batches = [[build_query([f"tok{b}"], f"input {b} {i}") for i in range(3)] for b in range(8)]
        parallel = remote(server, max_in_flight=4).predict_many(batches, planted_verbalizer)
        serial = remote(server, max_in_flight=1).predict_many(batches, planted_verbalizer)
        for got, want in zip(parallel, serial):
            np.testing.assert_allclose([s.probs for s in got], [s.probs for s in want])

    def test_concurrent_senders_never_overshoot(self, mock_server_factory, planted_verbalizer):
        server = mock_server_factory()
        oracle = remote(server, limit=5, max_in_flight=4)
        batches = [[build_query([], f"q{b}")] for b in range(8)]
        with pytest.raises(BudgetExceededError):
            oracle.predict_many(batches, planted_verbalizer)
        assert oracle.ledger.used <= 5
        assert server.served == oracle.ledger.used


class TestTrainingThroughTheServer:
    def _split(self, planted_task):
        examples = make_planted_examples(planted_task, per_class=10, seed=1)
        return make_few_shot_split(examples, k=4, seed=1)

    def test_served_requests_match_the_ledger(self, mock_server_factory, planted_task, planted_verbalizer):
        server = mock_server_factory()
        config = small_config()
        oracle = remote(server, limit=config.budget_limit)
        trainer = Trainer(config, planted_vocabulary(planted_task, 5), oracle, planted_verbalizer)
        checkpoint = trainer.train(self._split(planted_task))
        # per epoch: 2 steps x 2 samples, plus 2 dev batches
        assert checkpoint.billed_calls == 12
        assert server.served == oracle.ledger.used == 12

    def test_rate_limited_run_still_bills_each_request_once(self, mock_server_factory, planted_task,
                                                            planted_verbalizer):
        server = mock_server_factory(rate_limit_every=3)
        config = small_config()
        oracle = remote(server, limit=config.budget_limit, max_in_flight=1)
        Trainer(config, planted_vocabulary(planted_task, 5), oracle, planted_verbalizer).train(self._split(planted_task))
        stats = requests.get(server.url + "/v1/stats", timeout=5).json()
        assert stats["rate_limited"] > 0
        assert server.served == oracle.ledger.used == 12 <= config.budget_limit

    def test_budget_exhaustion_halts_with_checkpoint(self, mock_server_factory, planted_task, planted_verbalizer,
                                                     tmp_path):
        server = mock_server_factory()
        config = small_config(budget_limit=7)
        oracle = remote(server, limit=7)
        trainer = Trainer(config, planted_vocabulary(planted_task, 5), oracle, planted_verbalizer)
        path = tmp_path / "halted.json"
        with pytest.raises(BudgetExceededError) as info:
            trainer.train(self._split(planted_task), str(path))
        assert info.value.checkpoint.status == TrainStatus.BUDGET_EXHAUSTED
        assert info.value.checkpoint.epochs_completed == 1
        assert path.exists()
        assert server.served == oracle.ledger.used == 6
