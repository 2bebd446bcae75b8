# training/checkpoint.py

"""
Versioned JSON checkpoints of a training run.

Files are written with sorted keys and probabilities as repr() strings, and
carry no timestamps, so two runs with the same seed and config produce
byte-identical files.
"""

import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from prompt_learning_engine.models.constants import CHECKPOINT_VERSION, TrainStatus
from prompt_learning_engine.models.errors import CheckpointError, ConfigurationError, InvalidInputError
from prompt_learning_engine.models.prompt import PromptDistribution
from prompt_learning_engine.models.train_config import TrainConfig
from prompt_learning_engine.models.vocabulary import CandidateVocabulary
from prompt_learning_engine.optimization.prompt_model import argmax_prompt

logger = logging.getLogger(__name__)


@dataclass
class Checkpoint:
    """
    Serialized state of a run. `rows` is the best-dev distribution (or the
    latest one if no dev evaluation ran); `current_rows` is where optimization
    stopped and is what a resumed run continues from. A checkpoint without
    rows stands for the empty prompt.
    """
    config: TrainConfig
    vocab: Optional[CandidateVocabulary]
    rows: Optional[PromptDistribution]
    ledger: Dict[str, int]
    rng_state: Dict[str, Any] = field(default_factory=dict)
    best_dev: Optional[float] = None
    current_rows: Optional[PromptDistribution] = None
    optimizer_state: Dict[str, Any] = field(default_factory=dict)
    history: Dict[str, List[Dict[str, Any]]] = field(default_factory=lambda: {"steps": [], "epochs": []})
    status: str = TrainStatus.COMPLETED
    epochs_completed: int = 0
    version: int = CHECKPOINT_VERSION

    @property
    def billed_calls(self) -> int:
        return int(self.ledger.get("used", 0))

    def prompt_tokens(self) -> List[str]:
        """Argmax readout of the stored distribution; [] for an empty-prompt checkpoint."""
        if self.rows is None:
            return []
        if self.vocab is None:
            raise CheckpointError("checkpoint has distribution rows but no vocabulary")
        return argmax_prompt(self.rows, self.vocab)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "version": self.version,
            "config": self.config.to_dict(),
            "vocab": self.vocab.to_dict() if self.vocab is not None else None,
            "rows": self.rows.to_dict()["rows"] if self.rows is not None else [],
            "current_rows": self.current_rows.to_dict()["rows"] if self.current_rows is not None else [],
            "ledger": dict(self.ledger),
            "rng_state": self.rng_state,
            "best_dev": self.best_dev,
            "optimizer_state": self.optimizer_state,
            "history": self.history,
            "status": self.status,
            "epochs_completed": self.epochs_completed,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Checkpoint":
        version = data.get("version")
        if version != CHECKPOINT_VERSION:
            raise CheckpointError(
                f"unsupported checkpoint version {version!r}; this build reads version {CHECKPOINT_VERSION}"
            )
        try:
            rows = PromptDistribution.from_dict({"rows": data["rows"]}) if data.get("rows") else None
            current = (PromptDistribution.from_dict({"rows": data["current_rows"]})
                       if data.get("current_rows") else None)
            vocab = CandidateVocabulary.from_dict(data["vocab"]) if data.get("vocab") else None
            checkpoint = cls(
                config=TrainConfig.from_dict(data["config"]),
                vocab=vocab,
                rows=rows,
                ledger={"limit": int(data["ledger"]["limit"]), "used": int(data["ledger"]["used"])},
                rng_state=data.get("rng_state") or {},
                best_dev=data.get("best_dev"),
                current_rows=current,
                optimizer_state=data.get("optimizer_state") or {},
                history=data.get("history") or {"steps": [], "epochs": []},
                status=data.get("status", TrainStatus.COMPLETED),
                epochs_completed=int(data.get("epochs_completed", 0)),
                version=version,
            )
        except (KeyError, TypeError, ValueError, InvalidInputError, ConfigurationError) as e:
            raise CheckpointError(f"corrupt checkpoint (version {version}): {e}")
        if rows is not None and vocab is not None and len(vocab) != rows.N:
            raise CheckpointError(f"checkpoint vocabulary has {len(vocab)} entries but rows have {rows.N} columns")
        return checkpoint


def write_checkpoint(checkpoint: Checkpoint, path: str) -> None:
    """Write atomically: a crash mid-write leaves the previous file intact."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    tmp_path = path + ".tmp"
    with open(tmp_path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(checkpoint.to_dict(), f, sort_keys=True, indent=2)
        f.write("\n")
    os.replace(tmp_path, path)
    logger.info("Checkpoint written to %s (status=%s, billed=%d)", path, checkpoint.status, checkpoint.billed_calls)


def read_checkpoint(path: str) -> Checkpoint:
    """Missing files raise OSError; anything unreadable after opening raises CheckpointError."""
    with open(path, "r", encoding="utf-8") as f:
        raw = f.read()
    try:
        data = json.loads(raw)
    except ValueError as e:
        raise CheckpointError(f"{path} is not a valid checkpoint (version unknown): {e}")
    if not isinstance(data, dict):
        raise CheckpointError(f"{path} is not a valid checkpoint (version unknown)")
    return Checkpoint.from_dict(data)
