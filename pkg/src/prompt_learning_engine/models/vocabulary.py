# models/vocabulary.py

"""
Candidate vocabulary (the list V of prompt n-grams) and the knobs that
control its PMI-based extraction.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List

from prompt_learning_engine.models.errors import ConfigurationError, InvalidInputError


@dataclass(frozen=True)
class PmiConfig:
    """Thresholds for PMI segmentation and n-gram extraction."""
    sigma: float = 0.0  # delimiter inserted where PMI < sigma
    min_freq: int = 2  # f
    max_vocab: int = 100  # N cap
    max_ngram_len: int = 3

    def __post_init__(self):
        if self.min_freq < 1:
            raise ConfigurationError(f"min_freq must be >= 1, got {self.min_freq}")
        if self.max_vocab < 2:
            raise ConfigurationError(f"max_vocab must be >= 2, got {self.max_vocab}")
        if self.max_ngram_len < 1:
            raise ConfigurationError(f"max_ngram_len must be >= 1, got {self.max_ngram_len}")


@dataclass
class CandidateVocabulary:
    """
    Ordered list of N unique n-gram strings with their corpus frequencies.
    Position in `entries` is the candidate index j used by the distribution.
    """
    entries: List[str]
    frequencies: List[int] = field(default_factory=list)

    def __post_init__(self):
        self.entries = list(self.entries)
        if not self.frequencies:
            self.frequencies = [0] * len(self.entries)
        self.frequencies = [int(f) for f in self.frequencies]
        if len(self.frequencies) != len(self.entries):
            raise InvalidInputError("vocabulary entries and frequencies differ in length")
        if len(set(self.entries)) != len(self.entries):
            raise InvalidInputError("vocabulary entries must be unique")
        if len(self.entries) < 2:
            raise InvalidInputError(f"vocabulary needs at least 2 entries, got {len(self.entries)}")

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, index: int) -> str:
        return self.entries[index]

    def truncate(self, size: int) -> "CandidateVocabulary":
        """Keep the first `size` entries (the vocabulary is frequency ordered)."""
        return CandidateVocabulary(self.entries[:size], self.frequencies[:size])

    def to_dict(self) -> Dict[str, Any]:
        return {"entries": list(self.entries), "frequencies": list(self.frequencies)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CandidateVocabulary":
        return cls(data["entries"], data.get("frequencies") or [])
