# parsers/vocab_file.py

"""
Vocabulary files: a version header line, then `frequency<TAB>ngram` per entry
in vocabulary order.
"""

from prompt_learning_engine.models.constants import VOCAB_FILE_HEADER
from prompt_learning_engine.models.errors import ConfigurationError
from prompt_learning_engine.models.vocabulary import CandidateVocabulary


def write_vocab(vocab: CandidateVocabulary, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(VOCAB_FILE_HEADER + "\n")
        for gram, freq in zip(vocab.entries, vocab.frequencies):
            f.write(f"{freq}\t{gram}\n")


def read_vocab(path: str) -> CandidateVocabulary:
    with open(path, "r", encoding="utf-8") as f:
        lines = [line.rstrip("\n") for line in f if line.strip()]
    if not lines or lines[0] != VOCAB_FILE_HEADER:
        raise ConfigurationError(f"{path} is not a vocabulary file (missing '{VOCAB_FILE_HEADER}' header)")
    entries, frequencies = [], []
    for line_no, line in enumerate(lines[1:], start=2):
        freq, sep, gram = line.partition("\t")
        if not sep or not freq.isdigit():
            raise ConfigurationError(f"{path}:{line_no}: expected 'frequency<TAB>ngram'")
        entries.append(gram)
        frequencies.append(int(freq))
    return CandidateVocabulary(entries, frequencies)
