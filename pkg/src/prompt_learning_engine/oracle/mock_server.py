# oracle/mock_server.py

"""
Local stand-in for a scoring service, speaking the same /v1/score protocol as
RemoteOracle. Log-probabilities are derived from an md5 of (input, word), so a
given query always gets the same answer. Optional boosts raise a candidate
word's score whenever a trigger word appears in the input, which gives the
server a learnable signal.

Run standalone with:
    python -m prompt_learning_engine.oracle.mock_server --port 5000
"""

import argparse
import hashlib
import logging
import threading
from typing import Dict, List, Optional

import numpy as np
from flask import Flask, jsonify, request
from werkzeug.serving import make_server

logger = logging.getLogger(__name__)


def word_logprob_seed(text: str, word: str) -> float:
    """Stable pseudo-random score in [-3, 0) for an (input, candidate) pair."""
    digest = hashlib.md5(f"{text}\x1f{word}".encode("utf-8")).hexdigest()
    return -3.0 * int(digest[:8], 16) / 0x100000000


class _Counters:
    def __init__(self):
        self.lock = threading.Lock()
        self.received = 0
        self.served = 0
        self.rate_limited = 0


def create_app(boosts: Optional[Dict[str, Dict[str, float]]] = None,
               rate_limit_every: int = 0,
               auth_token: Optional[str] = None) -> Flask:
    """
    Build the mock scoring app.

    Args:
        boosts: trigger word -> {candidate word: added log-score}
        rate_limit_every: when > 0, every n-th request is answered with 429
        auth_token: when set, requests must carry it as a bearer credential

    Returns:
        A Flask app; GET /v1/stats reports how many score requests were served.
    """
    app = Flask(__name__)
    boosts = boosts or {}
    counters = _Counters()
    app.config["COUNTERS"] = counters

    def score_row(text: str, candidates: List[str]) -> List[float]:
        words = text.lower().split()
        raw = np.array([
            word_logprob_seed(text, c) + sum(boosts.get(w, {}).get(c, 0.0) for w in words)
            for c in candidates
        ])
        log_norm = np.logaddexp.reduce(raw)
        return [float(v) for v in raw - log_norm]

    @app.route("/v1/score", methods=["POST"])
    def score():
        with counters.lock:
            counters.received += 1
            throttled = rate_limit_every > 0 and counters.received % rate_limit_every == 0
            if throttled:
                counters.rate_limited += 1
        if throttled:
            return jsonify({"error": "rate limited"}), 429

        if auth_token and request.headers.get("Authorization") != f"Bearer {auth_token}":
            return jsonify({"error": "unauthorized"}), 401

        body = request.get_json(silent=True)
        if not isinstance(body, dict) or "inputs" not in body or "candidates" not in body:
            return jsonify({"error": "body needs 'inputs' and 'candidates'"}), 400
        inputs, candidates = body["inputs"], body["candidates"]
        if len(inputs) != len(candidates) or any(not row for row in candidates):
            return jsonify({"error": "inputs and candidates must align and be non-empty"}), 400

        scores = [score_row(str(text), [str(c) for c in row]) for text, row in zip(inputs, candidates)]
        with counters.lock:
            counters.served += 1
        return jsonify({"scores": scores})

    @app.route("/v1/stats", methods=["GET"])
    def stats():
        with counters.lock:
            return jsonify({
                "received": counters.received,
                "served": counters.served,
                "rate_limited": counters.rate_limited,
            })

    return app


class MockScoringServer:
    """Serves a mock app from a background thread on an ephemeral port."""

    def __init__(self, app: Flask, host: str = "127.0.0.1", port: int = 0):
        self.app = app
        self.host = host
        self._server = make_server(host, port, app, threaded=True)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        return f"http://{self.host}:{self._server.server_port}"

    @property
    def served(self) -> int:
        counters = self.app.config["COUNTERS"]
        with counters.lock:
            return counters.served

    def start(self) -> "MockScoringServer":
        self._thread.start()
        logger.debug("Mock scoring server listening on %s", self.url)
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._thread.join(timeout=5)

    def __enter__(self) -> "MockScoringServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()


def main():
    parser = argparse.ArgumentParser(description="Run the mock scoring server")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=5000)
    parser.add_argument("--rate-limit-every", type=int, default=0)
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO)
    create_app(rate_limit_every=args.rate_limit_every).run(host=args.host, port=args.port)


if __name__ == "__main__":
    main()
