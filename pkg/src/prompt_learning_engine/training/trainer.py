# training/trainer.py

"""
The black-box training loop: sample I prompts from the distribution, score
each on a mini-batch through the oracle, estimate the gradient with the
variance-reduced estimator and take a projected optimizer step. After each
epoch the argmax prompt is evaluated on dev and the best distribution kept.
"""

import copy
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from prompt_learning_engine.models.constants import Placement, TrainStatus
from prompt_learning_engine.models.errors import (
    BudgetExceededError, InvalidDatasetError, InvalidInputError, OracleUnavailableError,
)
from prompt_learning_engine.models.example import Example, FewShotSplit
from prompt_learning_engine.models.prompt import PromptDistribution, SampleBatchRecord
from prompt_learning_engine.models.train_config import TrainConfig
from prompt_learning_engine.models.vocabulary import CandidateVocabulary
from prompt_learning_engine.optimization.estimator import clip_by_norm, vr_pge
from prompt_learning_engine.optimization.optimizers import build_optimizer
from prompt_learning_engine.optimization.prompt_model import argmax_prompt, sample, score, uniform_init
from prompt_learning_engine.oracle.base import Oracle
from prompt_learning_engine.oracle.query import Query, build_query
from prompt_learning_engine.oracle.scores import ClassScores, cross_entropy, loss_function
from prompt_learning_engine.oracle.verbalizer import Verbalizer
from prompt_learning_engine.training.checkpoint import Checkpoint, read_checkpoint, write_checkpoint
from prompt_learning_engine.training.metrics import METRIC_FUNCTIONS, compute_metric

logger = logging.getLogger(__name__)

LossFn = Callable[[ClassScores, int], float]


@dataclass
class EvalResult:
    metric: str
    value: float
    loss: float
    predictions: List[int]


def build_queries(prompt_tokens: Sequence[str], examples: Sequence[Example],
                  verbalizer: Verbalizer, placement: str) -> List[Query]:
    return [build_query(prompt_tokens, verbalizer.render(ex), placement) for ex in examples]


def evaluate_prompt(prompt_tokens: Sequence[str], examples: Sequence[Example], oracle: Oracle,
                    verbalizer: Verbalizer, metric: str, placement: str = Placement.PREFIX,
                    batch_size: int = 4, loss_fn: LossFn = cross_entropy) -> EvalResult:
    """Score a fixed prompt on a split; every request is billed."""
    if not examples:
        raise InvalidInputError("evaluation split is empty")
    if metric not in METRIC_FUNCTIONS:
        raise InvalidInputError(f"unknown metric '{metric}'; choose from {sorted(METRIC_FUNCTIONS)}")
    queries = build_queries(prompt_tokens, examples, verbalizer, placement)
    batches = [queries[i:i + batch_size] for i in range(0, len(queries), batch_size)]
    scores = [s for batch_scores in oracle.predict_many(batches, verbalizer) for s in batch_scores]
    labels = [ex.label for ex in examples]
    predictions = [s.prediction for s in scores]
    loss = float(np.mean([loss_fn(s, label) for s, label in zip(scores, labels)]))
    value = compute_metric(metric, labels, predictions, verbalizer.num_classes)
    return EvalResult(metric=metric, value=value, loss=loss, predictions=predictions)


def evaluate(prompt_tokens: Sequence[str], examples: Sequence[Example], oracle: Oracle,
             verbalizer: Verbalizer, metric: str, placement: str = Placement.PREFIX,
             batch_size: int = 4) -> float:
    return evaluate_prompt(prompt_tokens, examples, oracle, verbalizer, metric, placement, batch_size).value


def evaluate_checkpoint(checkpoint: Optional[Checkpoint], examples: Sequence[Example], oracle: Oracle,
                        verbalizer: Verbalizer, metric: str, placement: str = Placement.PREFIX,
                        batch_size: int = 4) -> EvalResult:
    """Score a checkpoint's argmax prompt; None scores the bare inputs."""
    tokens = checkpoint.prompt_tokens() if checkpoint is not None else []
    logger.info("Evaluating prompt %r on %d examples", " ".join(tokens), len(examples))
    return evaluate_prompt(tokens, examples, oracle, verbalizer, metric, placement, batch_size)


def transfer(source_checkpoint: Union[str, Checkpoint], examples: Sequence[Example], oracle: Oracle,
             verbalizer: Verbalizer, metric: str, placement: str = Placement.PREFIX, batch_size: int = 4) -> float:
    """
    Evaluate the argmax prompt of a source checkpoint (a path or a loaded
    Checkpoint) on a target split with no further updates. The target
    verbalizer may be unrelated to the source task.
    """
    if isinstance(source_checkpoint, str):
        source_checkpoint = read_checkpoint(source_checkpoint)
    return evaluate_checkpoint(source_checkpoint, examples, oracle, verbalizer, metric, placement, batch_size).value


class Trainer:
    """
    Owns the prompt distribution for one run and is its only writer.

    Args:
        config: Run hyper-parameters; `vocab_size` must equal len(vocab).
        vocab: Candidate tokens indexed by the distribution columns.
        oracle: Scorer billed against its own ledger.
        verbalizer: Label words and template for the task.
        dist: Starting distribution; uniform when omitted.
        on_epoch_end: Called with each epoch's history entry.
    """

    def __init__(self, config: TrainConfig, vocab: CandidateVocabulary, oracle: Oracle, verbalizer: Verbalizer,
                 dist: Optional[PromptDistribution] = None,
                 on_epoch_end: Optional[Callable[[Dict[str, Any]], None]] = None):
        if len(vocab) != config.vocab_size:
            raise InvalidInputError(f"vocabulary has {len(vocab)} entries, config.vocab_size is {config.vocab_size}")
        self.config = config
        self.vocab = vocab
        self.oracle = oracle
        self.verbalizer = verbalizer
        self.dist = dist.copy() if dist is not None else uniform_init(config.prompt_length, len(vocab))
        if (self.dist.n, self.dist.N) != (config.prompt_length, len(vocab)):
            raise InvalidInputError(
                f"distribution is {self.dist.n}x{self.dist.N}, config expects {config.prompt_length}x{len(vocab)}"
            )
        self.rng = np.random.default_rng(config.seed)
        self.optimizer = build_optimizer(config)
        self.loss_fn = loss_function(config.loss_kind, config.hinge_margin)
        self.on_epoch_end = on_epoch_end
        self.history: Dict[str, List[Dict[str, Any]]] = {"steps": [], "epochs": []}
        self.best_rows: Optional[PromptDistribution] = None
        self.best_dev: Optional[float] = None
        self.best_dev_loss: Optional[float] = None
        self.epochs_completed = 0
        self.status = TrainStatus.COMPLETED
        # state at the start of the running epoch; a halt checkpoints this instead of the partial epoch
        self._epoch_start: Optional[Dict[str, Any]] = None

    @classmethod
    def from_checkpoint(cls, checkpoint: Checkpoint, oracle: Oracle, verbalizer: Verbalizer,
                        config: Optional[TrainConfig] = None,
                        on_epoch_end: Optional[Callable[[Dict[str, Any]], None]] = None) -> "Trainer":
        """
        Resume from where a checkpoint stopped. An interrupted epoch is rerun
        from its start; the RNG continues from the saved state.
        """
        config = config or checkpoint.config
        start = checkpoint.current_rows or checkpoint.rows
        trainer = cls(config, checkpoint.vocab, oracle, verbalizer, dist=start, on_epoch_end=on_epoch_end)
        if checkpoint.rng_state:
            trainer.rng.bit_generator.state = checkpoint.rng_state
        trainer.optimizer.load_state_dict(checkpoint.optimizer_state)
        trainer.history = copy.deepcopy(checkpoint.history)
        trainer.epochs_completed = checkpoint.epochs_completed
        if checkpoint.best_dev is not None:
            trainer.best_rows = checkpoint.rows.copy()
            trainer.best_dev = checkpoint.best_dev
            best_losses = [e["dev_loss"] for e in trainer.history["epochs"]
                           if e.get("best") and e.get("dev_loss") is not None]
            trainer.best_dev_loss = best_losses[-1] if best_losses else None
        return trainer

    @property
    def ledger(self):
        return self.oracle.ledger

    def prompt_tokens(self) -> List[str]:
        return argmax_prompt(self.dist, self.vocab)

    def train_step(self, batch: Sequence[Example]) -> PromptDistribution:
        """One update from I prompt samples scored on `batch`."""
        if not batch:
            raise InvalidInputError("training batch is empty")
        num_samples = self.config.sample_count
        units = num_samples * self.oracle.cost(len(batch))
        if self.ledger.remaining < units:
            raise BudgetExceededError(
                f"API budget exhausted: step needs {units} calls, {self.ledger.remaining} of "
                f"{self.ledger.limit} remain"
            )

        samples = [sample(self.dist, self.rng, self.vocab) for _ in range(num_samples)]
        query_batches = [build_queries(s.tokens, batch, self.verbalizer, self.config.placement) for s in samples]
        results = self.oracle.predict_many(query_batches, self.verbalizer)
        losses = [
            float(np.mean([self.loss_fn(scores, ex.label) for scores, ex in zip(batch_scores, batch)]))
            for batch_scores in results
        ]
        record = SampleBatchRecord(samples=samples, losses=losses, scores=[score(self.dist, s) for s in samples])
        grad = clip_by_norm(vr_pge(record), self.config.grad_clip)
        self.dist = self.optimizer.step(self.dist, grad)

        step_loss = float(np.mean(losses))
        self.history["steps"].append({
            "step": len(self.history["steps"]) + 1,
            "loss": step_loss,
            "billed_calls": self.ledger.used,
        })
        logger.debug("step %d: mean sampled loss %.6f, |g| %.4g", len(self.history["steps"]), step_loss, grad.norm)
        return self.dist

    def _is_better(self, value: float, loss: float) -> bool:
        # higher metric wins; equal metric falls back to lower dev loss; remaining ties keep the earlier epoch
        if self.best_dev is None or value > self.best_dev:
            return True
        if value == self.best_dev and self.best_dev_loss is not None:
            return loss < self.best_dev_loss
        return False

    def _run_epoch(self, split: FewShotSplit) -> Dict[str, Any]:
        epoch = self.epochs_completed + 1
        first_step = len(self.history["steps"])
        self._epoch_start = {
            "rows": self.dist.copy(),
            "rng_state": copy.deepcopy(self.rng.bit_generator.state),
            "optimizer_state": self.optimizer.state_dict(),
            "steps": first_step,
        }
        order = self.rng.permutation(len(split.train))
        for start in range(0, len(order), self.config.batch_size):
            self.train_step([split.train[i] for i in order[start:start + self.config.batch_size]])

        step_losses = [s["loss"] for s in self.history["steps"][first_step:]]
        entry: Dict[str, Any] = {"epoch": epoch, "train_loss": float(np.mean(step_losses))}
        if split.dev:
            result = evaluate_prompt(
                self.prompt_tokens(), split.dev, self.oracle, self.verbalizer, self.config.metric,
                self.config.placement, self.config.eval_batch_size, self.loss_fn,
            )
            entry["dev_metric"] = result.value
            entry["dev_loss"] = result.loss
            if self._is_better(result.value, result.loss):
                self.best_rows = self.dist.copy()
                self.best_dev = result.value
                self.best_dev_loss = result.loss
                entry["best"] = True
        entry["billed_calls"] = self.ledger.used
        return entry

    def train(self, split: FewShotSplit, checkpoint_path: Optional[str] = None) -> Checkpoint:
        """
        Run the remaining epochs. On budget exhaustion or oracle failure a
        checkpoint is written first, attached to the error as `.checkpoint`,
        and the error is re-raised.
        """
        self.config.validate()
        if not split.train:
            raise InvalidDatasetError("training split is empty")
        try:
            while self.epochs_completed < self.config.epochs:
                entry = self._run_epoch(split)
                self.history["epochs"].append(entry)
                self.epochs_completed += 1
                self._epoch_start = None
                logger.info(
                    "epoch %d/%d: train loss %.4f, dev %s %s, billed %d/%d",
                    entry["epoch"], self.config.epochs, entry["train_loss"], self.config.metric,
                    f"{entry['dev_metric']:.4f}" if "dev_metric" in entry else "n/a",
                    entry["billed_calls"], self.ledger.limit,
                )
                if self.on_epoch_end:
                    self.on_epoch_end(entry)
        except BudgetExceededError as e:
            self._halt(e, TrainStatus.BUDGET_EXHAUSTED, checkpoint_path)
            raise
        except OracleUnavailableError as e:
            self._halt(e, TrainStatus.ORACLE_UNAVAILABLE, checkpoint_path)
            raise

        self.status = TrainStatus.COMPLETED
        checkpoint = self.checkpoint()
        if checkpoint_path:
            write_checkpoint(checkpoint, checkpoint_path)
        return checkpoint

    def _halt(self, error, status: str, checkpoint_path: Optional[str]) -> None:
        self.status = status
        checkpoint = self.checkpoint()
        if checkpoint_path:
            write_checkpoint(checkpoint, checkpoint_path)
        error.checkpoint = checkpoint
        logger.warning("Training halted in epoch %d (%s): %s", self.epochs_completed + 1, status, error)

    def checkpoint(self) -> Checkpoint:
        """
        Snapshot the run. Outside an epoch this is the live state; inside one
        (a halt) it is the state the epoch started from, so a resume replays
        the interrupted epoch whole and never applies its updates twice.
        """
        start = self._epoch_start
        if start is None:
            current = self.dist
            rng_state = copy.deepcopy(self.rng.bit_generator.state)
            optimizer_state = self.optimizer.state_dict()
            history = copy.deepcopy(self.history)
        else:
            current = start["rows"]
            rng_state = copy.deepcopy(start["rng_state"])
            optimizer_state = copy.deepcopy(start["optimizer_state"])
            history = {
                "steps": copy.deepcopy(self.history["steps"][:start["steps"]]),
                "epochs": copy.deepcopy(self.history["epochs"]),
            }
        rows = self.best_rows if self.best_rows is not None else current
        return Checkpoint(
            config=self.config,
            vocab=self.vocab,
            rows=rows.copy(),
            ledger=self.ledger.to_dict(),
            rng_state=rng_state,
            best_dev=self.best_dev,
            current_rows=current.copy(),
            optimizer_state=optimizer_state,
            history=history,
            status=self.status,
            epochs_completed=self.epochs_completed,
        )
