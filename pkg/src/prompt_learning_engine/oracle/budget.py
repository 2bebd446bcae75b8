# oracle/budget.py

import logging
import threading
from typing import Any, Dict

from prompt_learning_engine.models.errors import BudgetExceededError, InvalidInputError

logger = logging.getLogger(__name__)


class BudgetLedger:
    """
    Shared counter of billed oracle calls.

    Callers reserve units before sending a request, then commit them when a
    response arrives or release them when the request finally fails. Reserved
    units count against the limit, so concurrent senders can never overshoot;
    `used` only ever grows.
    """

    def __init__(self, limit: int, used: int = 0):
        if limit < 0 or used < 0 or used > limit:
            raise InvalidInputError(f"invalid ledger state: used={used}, limit={limit}")
        self.limit = int(limit)
        self._used = int(used)
        self._pending = 0
        self._lock = threading.Lock()

    @property
    def used(self) -> int:
        return self._used

    @property
    def remaining(self) -> int:
        with self._lock:
            return self.limit - self._used - self._pending

    def reserve(self, units: int) -> None:
        with self._lock:
            if self._used + self._pending + units > self.limit:
                raise BudgetExceededError(
                    f"API budget exhausted: {self._used} of {self.limit} calls used, "
                    f"{self._pending} in flight, {units} more requested"
                )
            self._pending += units

    def commit(self, units: int) -> None:
        with self._lock:
            self._pending -= units
            self._used += units

    def release(self, units: int) -> None:
        with self._lock:
            self._pending -= units
        logger.debug("Released %d reserved unit(s) after a failed request", units)

    def to_dict(self) -> Dict[str, Any]:
        return {"limit": self.limit, "used": self._used}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BudgetLedger":
        return cls(limit=int(data["limit"]), used=int(data.get("used", 0)))
