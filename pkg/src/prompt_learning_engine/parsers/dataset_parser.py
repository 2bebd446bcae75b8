# parsers/dataset_parser.py

import logging
from typing import Callable, List

from prompt_learning_engine.models.errors import ConfigurationError, InvalidDatasetError
from prompt_learning_engine.models.example import Example

logger = logging.getLogger(__name__)


class DatasetParser:
    """
    Parses labelled UTF-8 TSV datasets: `label<TAB>text` for single-sentence
    tasks and `label<TAB>text_a<TAB>text_b` for pair tasks. Blank lines and
    lines starting with '#' are skipped; an example's uid is its line number.
    """

    def __init__(self, label_resolver: Callable[[str], int], pair: bool = False):
        """
        Args:
            label_resolver: Maps the raw label column to a class index, e.g.
                TaskDefinition.label_index.
            pair: Whether rows carry a second text column.
        """
        self.label_resolver = label_resolver
        self.pair = pair

    def parse_lines(self, lines) -> List[Example]:
        examples = []
        for line_no, line in enumerate(lines, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("#"):
                continue
            columns = line.split("\t")
            expected = 3 if self.pair else 2
            if len(columns) != expected:
                raise InvalidDatasetError(
                    f"line {line_no}: expected {expected} tab-separated columns, got {len(columns)}"
                )
            try:
                label = self.label_resolver(columns[0])
            except ConfigurationError as e:
                raise InvalidDatasetError(f"line {line_no}: {e}")
            examples.append(Example(
                uid=line_no,
                label=label,
                text_a=columns[1].strip(),
                text_b=columns[2].strip() if self.pair else None,
            ))
        if not examples:
            raise InvalidDatasetError("dataset contains no examples")
        return examples

    def load(self, path: str) -> List[Example]:
        with open(path, "r", encoding="utf-8") as f:
            examples = self.parse_lines(f)
        logger.info("Loaded %d examples from %s", len(examples), path)
        return examples


def read_corpus(path: str) -> List[str]:
    """One example per line; an optional leading `label<TAB>` column is dropped."""
    lines = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            lines.append(line.split("\t", 1)[1] if "\t" in line else line)
    return lines
