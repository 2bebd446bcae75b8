# processing/pmi_vocab.py

"""
Unsupervised construction of the candidate prompt vocabulary.

Every sentence is cut wherever two adjacent words have a PMI below sigma; the
word runs between cuts are segments, and every contiguous n-gram (up to
max_ngram_len words) inside a segment is counted. N-grams seen at least
min_freq times, ranked by frequency (ties lexicographic), form the vocabulary.
"""

import logging
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, List, Protocol, Sequence, Tuple

from prompt_learning_engine.models.errors import ConfigurationError, InvalidInputError
from prompt_learning_engine.models.vocabulary import CandidateVocabulary, PmiConfig

logger = logging.getLogger(__name__)

_PUNCTUATION = re.compile(r"[^\w\s]", re.UNICODE)


class Tokenizer(Protocol):
    """Anything that turns a line of text into word tokens."""

    def tokenize(self, text: str) -> List[str]:
        ...


class WhitespaceTokenizer:
    """Lowercase, strip punctuation, split on whitespace."""

    def tokenize(self, text: str) -> List[str]:
        return _PUNCTUATION.sub(" ", text.lower()).split()


@dataclass
class CorpusStats:
    """Unigram and adjacent-pair counts of a tokenized corpus."""
    unigrams: Counter = field(default_factory=Counter)
    pairs: Counter = field(default_factory=Counter)

    def __post_init__(self):
        self.total_tokens = sum(self.unigrams.values())
        self.total_pairs = sum(self.pairs.values())

    @classmethod
    def from_corpus(cls, corpus: Iterable[Sequence[str]]) -> "CorpusStats":
        unigrams, pairs = Counter(), Counter()
        for sentence in corpus:
            unigrams.update(sentence)
            pairs.update(zip(sentence, sentence[1:]))
        return cls(unigrams, pairs)

    def pair_pmi(self, left: str, right: str) -> float:
        """
        PMI of two adjacent words from maximum-likelihood counts. A pair or
        word never seen in the corpus counts as seen once.
        """
        total_tokens = max(self.total_tokens, 1)
        total_pairs = max(self.total_pairs, 1)
        p_joint = max(self.pairs.get((left, right), 0), 1) / total_pairs
        p_left = max(self.unigrams.get(left, 0), 1) / total_tokens
        p_right = max(self.unigrams.get(right, 0), 1) / total_tokens
        return pmi(p_joint, p_left, p_right)


def pmi(p_joint: float, p_left: float, p_right: float) -> float:
    """ln(p(xy) / (p(x) p(y)))."""
    for name, value in (("p_joint", p_joint), ("p_left", p_left), ("p_right", p_right)):
        if not 0.0 < value <= 1.0:
            raise InvalidInputError(f"{name} must lie in (0, 1], got {value}")
    return math.log(p_joint / (p_left * p_right))


def segment(sentence: Sequence[str], stats: CorpusStats, sigma: float) -> List[Tuple[str, ...]]:
    """Split a token sequence at every adjacent pair whose PMI is below sigma."""
    if not sentence:
        return []
    segments = []
    current = [sentence[0]]
    for left, right in zip(sentence, sentence[1:]):
        if stats.pair_pmi(left, right) < sigma:
            segments.append(tuple(current))
            current = []
        current.append(right)
    segments.append(tuple(current))
    return segments


def count_ngrams(segments: Iterable[Tuple[str, ...]], max_ngram_len: int) -> Counter:
    """Count every contiguous n-gram of length <= max_ngram_len inside each segment."""
    counts = Counter()
    for seg in segments:
        for length in range(1, min(max_ngram_len, len(seg)) + 1):
            for start in range(len(seg) - length + 1):
                counts[" ".join(seg[start:start + length])] += 1
    return counts


def build_vocab(corpus: Sequence[Sequence[str]], config: PmiConfig) -> CandidateVocabulary:
    """Segment a tokenized corpus by PMI and keep the most frequent n-grams."""
    corpus = [list(sentence) for sentence in corpus if sentence]
    if not corpus:
        raise InvalidInputError("corpus is empty")

    stats = CorpusStats.from_corpus(corpus)
    segments = [seg for sentence in corpus for seg in segment(sentence, stats, config.sigma)]
    counts = count_ngrams(segments, config.max_ngram_len)
    logger.info("Segmented %d sentences into %d segments, %d distinct n-grams",
                len(corpus), len(segments), len(counts))

    kept = sorted(
        ((gram, freq) for gram, freq in counts.items() if freq >= config.min_freq),
        key=lambda item: (-item[1], item[0]),
    )[:config.max_vocab]
    if len(kept) < 2:
        raise ConfigurationError(
            f"only {len(kept)} n-gram(s) survive sigma={config.sigma}, min_freq={config.min_freq}; "
            "lower sigma or min_freq"
        )
    return CandidateVocabulary([gram for gram, _ in kept], [freq for _, freq in kept])


def build_vocab_from_lines(lines: Iterable[str], config: PmiConfig,
                           tokenizer: Tokenizer = None) -> CandidateVocabulary:
    tokenizer = tokenizer or WhitespaceTokenizer()
    return build_vocab([tokenizer.tokenize(line) for line in lines], config)
