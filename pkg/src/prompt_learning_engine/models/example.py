# models/example.py

"""
Labelled examples and the k-shot train/dev/test split built from them.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional


@dataclass(frozen=True)
class Example:
    """
    One labelled input. `uid` is the example's identity (its row index in the
    source file) and is what split disjointness is checked against.
    """
    uid: int
    label: int
    text_a: str
    text_b: Optional[str] = None


@dataclass
class FewShotSplit:
    """k examples per class for training, k different ones for dev, the rest for test."""
    train: List[Example]
    dev: List[Example]
    test: List[Example]
    k: int
    # class index -> number of examples available, for classes with fewer than 2k
    undersized_classes: Dict[int, int] = field(default_factory=dict)

    @property
    def is_undersized(self) -> bool:
        return bool(self.undersized_classes)
