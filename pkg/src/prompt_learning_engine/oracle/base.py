# oracle/base.py

import logging
from abc import ABC, abstractmethod
from typing import List, Sequence

from prompt_learning_engine.models.constants import BillingUnit
from prompt_learning_engine.models.errors import InvalidInputError
from prompt_learning_engine.oracle.budget import BudgetLedger
from prompt_learning_engine.oracle.query import Query
from prompt_learning_engine.oracle.scores import ClassScores
from prompt_learning_engine.oracle.verbalizer import Verbalizer

logger = logging.getLogger(__name__)


class Oracle(ABC):
    """
    Black-box scorer: a batch of queries in, one ClassScores per query out.
    Every batch is billed against the ledger before it is sent.
    """

    def __init__(self, ledger: BudgetLedger, billing_unit: str = BillingUnit.BATCH):
        if billing_unit not in (BillingUnit.BATCH, BillingUnit.EXAMPLE):
            raise InvalidInputError(f"unknown billing unit '{billing_unit}'")
        self.ledger = ledger
        self.billing_unit = billing_unit

    def cost(self, batch_size: int) -> int:
        """Ledger units one request of `batch_size` queries costs."""
        if batch_size == 0:
            return 0
        return 1 if self.billing_unit == BillingUnit.BATCH else batch_size

    def predict(self, queries: Sequence[Query], verbalizer: Verbalizer) -> List[ClassScores]:
        if not queries:
            return []
        units = self.cost(len(queries))
        self.ledger.reserve(units)
        try:
            scores = self._score(list(queries), verbalizer)
        except BaseException as e:
            if getattr(e, "billed", False):
                self.ledger.commit(units)
            else:
                self.ledger.release(units)
            raise
        self.ledger.commit(units)
        return scores

    def predict_many(self, batches: Sequence[Sequence[Query]], verbalizer: Verbalizer) -> List[List[ClassScores]]:
        """Score several batches; results come back in input order."""
        return [self.predict(batch, verbalizer) for batch in batches]

    @abstractmethod
    def _score(self, queries: List[Query], verbalizer: Verbalizer) -> List[ClassScores]:
        """Score one request's worth of queries. Billing is handled by predict."""
