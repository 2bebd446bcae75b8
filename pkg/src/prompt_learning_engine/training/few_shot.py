# training/few_shot.py

import logging
from collections import defaultdict
from typing import Dict, List, Optional, Sequence

import numpy as np

from prompt_learning_engine.models.errors import InvalidDatasetError, InvalidInputError
from prompt_learning_engine.models.example import Example, FewShotSplit

logger = logging.getLogger(__name__)


def make_few_shot_split(dataset: Sequence[Example], k: int, seed: int,
                        num_classes: Optional[int] = None) -> FewShotSplit:
    """
    Draw k examples per class for training and k different ones for dev; every
    remaining example goes to test.

    Args:
        dataset: Labelled examples; uids must be unique.
        k: Shots per class.
        seed: Seeds the per-class permutation, so equal seeds give equal splits.
        num_classes: When given, every class in [0, num_classes) must be present.

    Returns:
        A FewShotSplit. Classes with fewer than 2k examples give all they have
        (train first) and are listed in `undersized_classes`.
    """
    if k < 1:
        raise InvalidInputError(f"k must be >= 1, got {k}")
    if not dataset:
        raise InvalidDatasetError("dataset is empty")
    if len({ex.uid for ex in dataset}) != len(dataset):
        raise InvalidDatasetError("example uids are not unique")

    by_class: Dict[int, List[Example]] = defaultdict(list)
    for ex in sorted(dataset, key=lambda e: e.uid):
        by_class[ex.label].append(ex)
    labels = range(num_classes) if num_classes is not None else sorted(by_class)
    for label in labels:
        if not by_class.get(label):
            raise InvalidDatasetError(f"class {label} has no examples")
    if num_classes is not None and any(label >= num_classes or label < 0 for label in by_class):
        raise InvalidDatasetError(f"dataset has labels outside [0, {num_classes})")

    rng = np.random.default_rng(seed)
    train, dev, test = [], [], []
    undersized = {}
    for label in labels:
        members = by_class[label]
        order = rng.permutation(len(members))
        shuffled = [members[i] for i in order]
        if len(shuffled) < 2 * k:
            undersized[label] = len(shuffled)
            logger.warning("Class %d has only %d examples, fewer than 2k=%d", label, len(shuffled), 2 * k)
        train.extend(shuffled[:k])
        dev.extend(shuffled[k:2 * k])
        test.extend(shuffled[2 * k:])

    logger.info("Few-shot split: %d train, %d dev, %d test (k=%d)", len(train), len(dev), len(test), k)
    return FewShotSplit(train=train, dev=dev, test=test, k=k, undersized_classes=undersized)
