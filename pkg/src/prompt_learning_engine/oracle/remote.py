# oracle/remote.py

"""
HTTP client for a remote scoring service.

Wire protocol: POST {endpoint}/v1/score with
    {"inputs": [text, ...], "candidates": [[word, ...], ...]}
answered by
    {"scores": [[logprob, ...], ...]}
one log-probability per candidate word, in the order sent. 429 and 5xx are
retried with exponential backoff scaled by a random factor in
[1 - jitter, 1 + jitter]; any other 4xx is a permanent failure.

Adapters for other request schemas can subclass RemoteOracle and override
`_build_payload` / `_parse_scores`.
"""

import logging
import os
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional, Sequence

import requests

from prompt_learning_engine.models.constants import (
    ENV_ORACLE_AUTH_TOKEN, ENV_ORACLE_ENDPOINT, BillingUnit,
)
from prompt_learning_engine.models.errors import ConfigurationError, OracleUnavailableError
from prompt_learning_engine.oracle.base import Oracle
from prompt_learning_engine.oracle.budget import BudgetLedger
from prompt_learning_engine.oracle.query import Query
from prompt_learning_engine.oracle.scores import ClassScores
from prompt_learning_engine.oracle.verbalizer import Verbalizer

logger = logging.getLogger(__name__)

SCORE_PATH = "/v1/score"
RETRYABLE_STATUS = {429, 500, 502, 503, 504}


class RemoteOracle(Oracle):
    """Scores queries through the /v1/score protocol with bounded retries."""

    def __init__(self, endpoint: str, ledger: BudgetLedger,
                 billing_unit: str = BillingUnit.BATCH,
                 auth_token: Optional[str] = None,
                 timeout: float = 30.0,
                 max_attempts: int = 3,
                 backoff_seconds: float = 0.5,
                 jitter: float = 0.2,
                 max_in_flight: int = 4):
        super().__init__(ledger, billing_unit)
        if not endpoint:
            raise ConfigurationError(f"no oracle endpoint configured; set {ENV_ORACLE_ENDPOINT}")
        self.url = endpoint.rstrip("/") + SCORE_PATH
        self.auth_token = auth_token
        self.timeout = timeout
        self.max_attempts = max(1, int(max_attempts))
        self.backoff_seconds = backoff_seconds
        self.jitter = min(max(float(jitter), 0.0), 1.0)
        self._jitter_rng = random.Random()
        self.max_in_flight = max(1, int(max_in_flight))
        self._local = threading.local()

    @classmethod
    def from_env(cls, ledger: BudgetLedger, **kwargs) -> "RemoteOracle":
        endpoint = os.environ.get(ENV_ORACLE_ENDPOINT)
        if not endpoint:
            raise ConfigurationError(f"{ENV_ORACLE_ENDPOINT} is not set and --synthetic was not given")
        return cls(endpoint, ledger, auth_token=os.environ.get(ENV_ORACLE_AUTH_TOKEN), **kwargs)

    def _session(self) -> requests.Session:
        # requests.Session is not guaranteed thread-safe; keep one per worker thread.
        session = getattr(self._local, "session", None)
        if session is None:
            session = requests.Session()
            session.headers["Content-Type"] = "application/json"
            if self.auth_token:
                session.headers["Authorization"] = f"Bearer {self.auth_token}"
            self._local.session = session
        return session

    def predict_many(self, batches: Sequence[Sequence[Query]], verbalizer: Verbalizer) -> List[List[ClassScores]]:
        if self.max_in_flight == 1 or len(batches) <= 1:
            return super().predict_many(batches, verbalizer)
        with ThreadPoolExecutor(max_workers=min(self.max_in_flight, len(batches))) as pool:
            futures = [pool.submit(self.predict, batch, verbalizer) for batch in batches]
            return [future.result() for future in futures]

    def _build_payload(self, queries: List[Query], verbalizer: Verbalizer) -> Dict[str, Any]:
        candidates = verbalizer.candidates
        return {"inputs": [q.text for q in queries], "candidates": [candidates for _ in queries]}

    def _parse_scores(self, body: Dict[str, Any], queries: List[Query], verbalizer: Verbalizer) -> List[ClassScores]:
        try:
            rows = body["scores"]
        except (KeyError, TypeError):
            raise OracleUnavailableError("oracle response has no 'scores' field")
        width = len(verbalizer.candidates)
        if len(rows) != len(queries) or any(len(row) != width for row in rows):
            raise OracleUnavailableError(
                f"oracle returned {len(rows)} score rows for {len(queries)} queries of {width} candidates"
            )
        slices = verbalizer.class_slices()
        return [ClassScores.from_word_scores(row, slices) for row in rows]

    def _score(self, queries: List[Query], verbalizer: Verbalizer) -> List[ClassScores]:
        payload = self._build_payload(queries, verbalizer)
        last_error = "no attempt made"
        for attempt in range(self.max_attempts):
            if attempt:
                delay = self.backoff_seconds * (2 ** (attempt - 1))
                delay *= self._jitter_rng.uniform(1.0 - self.jitter, 1.0 + self.jitter)
                logger.debug("Retrying oracle request in %.3fs (attempt %d/%d)", delay, attempt + 1, self.max_attempts)
                time.sleep(delay)
            try:
                response = self._session().post(self.url, json=payload, timeout=self.timeout)
            except (requests.ConnectionError, requests.Timeout) as e:
                last_error = f"transport error: {e}"
                logger.warning("Oracle request failed: %s", last_error)
                continue
            if response.status_code == 200:
                # the service has charged for this call whatever the body holds
                try:
                    return self._parse_scores(response.json(), queries, verbalizer)
                except OracleUnavailableError as e:
                    e.billed = True
                    raise
                except (ValueError, TypeError) as e:
                    raise OracleUnavailableError(f"oracle returned an unusable body: {e}", billed=True)
            if response.status_code in RETRYABLE_STATUS:
                last_error = f"HTTP {response.status_code}"
                logger.warning("Oracle answered %s, will retry", last_error)
                continue
            raise OracleUnavailableError(
                f"oracle rejected the request with HTTP {response.status_code}: {response.text[:200]}"
            )
        raise OracleUnavailableError(f"oracle unavailable after {self.max_attempts} attempts ({last_error})")
