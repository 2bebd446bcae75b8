# oracle/synthetic.py

"""
An in-process oracle with a known optimum, for checking the optimizer end to
end at desk scale.

Class score of a query:

    base(input, c) + weight * |planted_c intersect prompt words|

where base(input, c) is an explicit override if the input text is listed in
`base_scores`, else class_bias[c] + cue_weight * (cue words of c in the input).
Scores are treated as logits.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from prompt_learning_engine.models.constants import BillingUnit
from prompt_learning_engine.models.errors import InvalidSpecError
from prompt_learning_engine.models.example import Example
from prompt_learning_engine.models.vocabulary import CandidateVocabulary
from prompt_learning_engine.oracle.base import Oracle
from prompt_learning_engine.oracle.budget import BudgetLedger
from prompt_learning_engine.oracle.query import Query
from prompt_learning_engine.oracle.scores import ClassScores
from prompt_learning_engine.oracle.verbalizer import Verbalizer
from prompt_learning_engine.processing.pmi_vocab import WhitespaceTokenizer

logger = logging.getLogger(__name__)

DEFAULT_FILLER_WORDS = [
    "the", "film", "story", "plot", "scene", "actor", "music", "ending",
    "script", "camera", "was", "felt", "quite", "really", "overall", "cast",
]


@dataclass
class PlantedTask:
    """Closed-form description of a synthetic classification task."""
    num_classes: int
    planted_tokens: Dict[int, List[str]]
    weight: float = 1.0
    class_bias: List[float] = field(default_factory=list)
    cue_words: Dict[int, List[str]] = field(default_factory=dict)
    cue_weight: float = 0.0
    base_scores: Dict[str, List[float]] = field(default_factory=dict)

    def __post_init__(self):
        if self.num_classes < 2:
            raise InvalidSpecError(f"num_classes must be >= 2, got {self.num_classes}")
        if not self.weight > 0:
            raise InvalidSpecError(f"weight must be > 0, got {self.weight}")
        self.planted_tokens = {int(c): [str(t) for t in tokens] for c, tokens in (self.planted_tokens or {}).items()}
        self.cue_words = {int(c): [str(w) for w in words] for c, words in (self.cue_words or {}).items()}
        if not any(self.planted_tokens.values()):
            raise InvalidSpecError("planted task has no planted tokens")
        for mapping, name in ((self.planted_tokens, "planted_tokens"), (self.cue_words, "cue_words")):
            for c in mapping:
                if not 0 <= c < self.num_classes:
                    raise InvalidSpecError(f"{name} refers to class {c}, task has {self.num_classes}")
        if not self.class_bias:
            self.class_bias = [0.0] * self.num_classes
        if len(self.class_bias) != self.num_classes:
            raise InvalidSpecError(f"class_bias needs {self.num_classes} entries, got {len(self.class_bias)}")
        for text, scores in self.base_scores.items():
            if len(scores) != self.num_classes:
                raise InvalidSpecError(f"base_scores['{text}'] needs {self.num_classes} entries")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PlantedTask":
        try:
            return cls(
                num_classes=int(data["num_classes"]),
                planted_tokens=data.get("planted_tokens") or {},
                weight=float(data.get("weight", 1.0)),
                class_bias=[float(b) for b in data.get("class_bias") or []],
                cue_words=data.get("cue_words") or {},
                cue_weight=float(data.get("cue_weight", 0.0)),
                base_scores={str(k): [float(s) for s in v] for k, v in (data.get("base_scores") or {}).items()},
            )
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidSpecError(f"malformed planted task: {e}")

    def base(self, input_text: str) -> np.ndarray:
        if input_text in self.base_scores:
            return np.asarray(self.base_scores[input_text], dtype=np.float64)
        words = WhitespaceTokenizer().tokenize(input_text)
        scores = np.asarray(self.class_bias, dtype=np.float64).copy()
        for c, cues in self.cue_words.items():
            scores[c] += self.cue_weight * sum(1 for word in words if word in cues)
        return scores

    def planted_counts(self, prompt_tokens: Sequence[str]) -> np.ndarray:
        words = set(" ".join(prompt_tokens).split())
        counts = np.zeros(self.num_classes)
        for c, tokens in self.planted_tokens.items():
            counts[c] = len(words.intersection(tokens))
        return counts

    def logits(self, query: Query) -> np.ndarray:
        return self.base(query.input_text) + self.weight * self.planted_counts(query.prompt_tokens)


class SyntheticPlantedOracle(Oracle):
    """Deterministic oracle scoring queries with a PlantedTask, billed like a remote one."""

    def __init__(self, task: PlantedTask, ledger: BudgetLedger, billing_unit: str = BillingUnit.BATCH):
        super().__init__(ledger, billing_unit)
        self.task = task

    def class_scores(self, query: Query) -> ClassScores:
        """Unbilled closed-form evaluation of one query."""
        return ClassScores.from_logits(self.task.logits(query))

    def _score(self, queries: List[Query], verbalizer: Verbalizer) -> List[ClassScores]:
        if verbalizer.num_classes != self.task.num_classes:
            raise InvalidSpecError(
                f"verbalizer has {verbalizer.num_classes} classes, planted task has {self.task.num_classes}"
            )
        return [self.class_scores(query) for query in queries]


def planted_vocabulary(task: PlantedTask, size: int,
                       filler_words: Optional[Sequence[str]] = None) -> CandidateVocabulary:
    """Planted tokens of every class first, then filler words, up to `size` entries."""
    entries: List[str] = []
    for c in sorted(task.planted_tokens):
        entries.extend(t for t in task.planted_tokens[c] if t not in entries)
    for word in filler_words or DEFAULT_FILLER_WORDS:
        if len(entries) >= size:
            break
        if word not in entries:
            entries.append(word)
    if len(entries) < size:
        logger.warning("Planted vocabulary has only %d entries, %d requested", len(entries), size)
    return CandidateVocabulary(entries[:max(size, 2)])


def make_planted_examples(task: PlantedTask, per_class: int, seed: int = 0,
                          sentence_length: int = 5,
                          filler_words: Optional[Sequence[str]] = None,
                          start_uid: int = 0) -> List[Example]:
    """
    Generate a labelled dataset for a planted task: each sentence carries one
    cue word of its class (when the class has any) among neutral filler words.
    """
    rng = np.random.default_rng(seed)
    fillers = list(filler_words or DEFAULT_FILLER_WORDS)
    examples, uid = [], start_uid
    for label in range(task.num_classes):
        cues = task.cue_words.get(label, [])
        for _ in range(per_class):
            words = [fillers[i] for i in rng.integers(0, len(fillers), size=sentence_length - 1)]
            if cues:
                words.insert(int(rng.integers(0, len(words) + 1)), cues[int(rng.integers(0, len(cues)))])
            examples.append(Example(uid=uid, label=label, text_a=" ".join(words)))
            uid += 1
    return examples
