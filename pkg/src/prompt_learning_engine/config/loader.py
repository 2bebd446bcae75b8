# config/loader.py

"""
Loading of the packaged YAML configuration (defaults, task verbalizers, the
planted synthetic task) and of user-supplied overrides.
"""

import logging
import os
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import yaml
from fuzzywuzzy import process

from prompt_learning_engine.models.errors import ConfigurationError
from prompt_learning_engine.models.train_config import TrainConfig
from prompt_learning_engine.oracle.synthetic import PlantedTask
from prompt_learning_engine.oracle.verbalizer import Verbalizer

logger = logging.getLogger(__name__)

CONFIG_DIR = os.path.dirname(os.path.abspath(__file__))
DEFAULTS_FILE = os.path.join(CONFIG_DIR, "defaults.yml")
TASKS_FILE = os.path.join(CONFIG_DIR, "tasks.yml")
PLANTED_TASK_FILE = os.path.join(CONFIG_DIR, "planted_task.yml")


@dataclass
class TaskDefinition:
    """A task's class names, verbalizer and default evaluation metric."""
    name: str
    labels: List[str]
    verbalizer: Verbalizer
    metric: str
    pair: bool = False

    def label_index(self, raw: str) -> int:
        """Resolve a TSV label (class name or integer index) to a class index."""
        raw = raw.strip()
        if raw in self.labels:
            return self.labels.index(raw)
        try:
            index = int(raw)
        except ValueError:
            raise ConfigurationError(f"label '{raw}' is not one of {self.labels} for task '{self.name}'")
        if not 0 <= index < len(self.labels):
            raise ConfigurationError(f"label index {index} out of range for task '{self.name}'")
        return index


def load_yaml_config(filepath: str) -> Dict[str, Any]:
    """Helper function to load a YAML configuration file."""
    try:
        with open(filepath, "r", encoding="utf-8") as f:
            return yaml.safe_load(f) or {}
    except FileNotFoundError:
        raise ConfigurationError(f"Configuration file not found at {filepath}")
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Error parsing YAML file {filepath}: {e}")


def load_train_defaults() -> Dict[str, Any]:
    return load_yaml_config(DEFAULTS_FILE)


def load_train_config(user_file: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> TrainConfig:
    """
    Resolve a TrainConfig from packaged defaults, an optional user YAML file
    (either a flat mapping or one nested under `train:`), and explicit overrides.
    None-valued overrides are ignored so unset CLI flags keep lower layers.
    """
    resolved = dict(load_train_defaults().get("train", {}))
    if user_file:
        user = load_yaml_config(user_file)
        resolved.update(user.get("train", user))
    for key, value in (overrides or {}).items():
        if value is not None:
            resolved[key] = value
    return TrainConfig.from_dict(resolved)


def check_bounds(config: TrainConfig, bounds: Optional[Dict[str, Any]] = None) -> List[str]:
    """
    Compare a config against the advisory hyper-parameter bounds and return a
    warning string for each value outside them. Never raises.
    """
    if bounds is None:
        bounds = load_train_defaults().get("bounds", {})
    warnings = []
    for name, rule in bounds.items():
        value = getattr(config, name, None)
        if value is None:
            continue
        if "choices" in rule and value not in rule["choices"]:
            warnings.append(f"{name}={value} is outside the usual choices {rule['choices']}")
        if "min" in rule and value < rule["min"]:
            warnings.append(f"{name}={value} is below the usual minimum {rule['min']}")
        if "max" in rule and value > rule["max"]:
            warnings.append(f"{name}={value} is above the usual maximum {rule['max']}")
    return warnings


def load_task(name: Optional[str], tasks_file: str = TASKS_FILE) -> TaskDefinition:
    """Look up a task by name; unknown names suggest the closest known task."""
    tasks = load_yaml_config(tasks_file)
    if not name:
        raise ConfigurationError(f"no task given; a verbalizer is required (known tasks: {', '.join(sorted(tasks))})")
    key = name.strip().lower()
    if key not in tasks:
        suggestion = process.extractOne(key, list(tasks))
        hint = f"; did you mean '{suggestion[0]}'?" if suggestion and suggestion[1] >= 60 else ""
        raise ConfigurationError(f"unknown task '{name}'{hint}")
    entry = tasks[key]
    try:
        verbalizer = Verbalizer(
            label_words=[list(words) for words in entry["label_words"]],
            template=entry.get("template", "{{ text_a }}"),
        )
        labels = [str(label) for label in entry["labels"]]
    except (KeyError, TypeError) as e:
        raise ConfigurationError(f"task '{key}' is malformed in {tasks_file}: {e}")
    if len(labels) != verbalizer.num_classes:
        raise ConfigurationError(f"task '{key}' lists {len(labels)} labels but {verbalizer.num_classes} label-word groups")
    return TaskDefinition(
        name=key,
        labels=labels,
        verbalizer=verbalizer,
        metric=entry.get("metric", "accuracy"),
        pair=bool(entry.get("pair", False)),
    )


def load_planted_task(filepath: Optional[str] = None) -> PlantedTask:
    path = filepath or PLANTED_TASK_FILE
    logger.debug("Loading planted task from %s", path)
    return PlantedTask.from_dict(load_yaml_config(path))
