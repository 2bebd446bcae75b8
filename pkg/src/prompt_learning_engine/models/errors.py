# models/errors.py

"""
Exception hierarchy shared by every layer of the engine. The command line maps
each family onto a stable exit code (see models.constants.ExitCode).
"""


class PromptLearningError(Exception):
    """Base class for all errors raised by prompt_learning_engine."""


class InvalidInputError(PromptLearningError, ValueError):
    """A value, vector or shape handed to an operation is not acceptable."""


class ConfigurationError(PromptLearningError):
    """Configuration is missing, malformed or filters everything out."""


class InvalidDatasetError(PromptLearningError):
    """A dataset cannot be parsed or sampled."""


class InvalidSpecError(PromptLearningError):
    """A planted-task description is malformed."""


class BudgetExceededError(PromptLearningError):
    """The API-call ledger cannot cover the requested calls."""

    def __init__(self, message: str, checkpoint=None):
        super().__init__(message)
        # Set by the trainer once a checkpoint has been written.
        self.checkpoint = checkpoint


class OracleUnavailableError(PromptLearningError):
    """The scoring service failed after retries or rejected the request."""

    def __init__(self, message: str, checkpoint=None, billed: bool = False):
        super().__init__(message)
        self.checkpoint = checkpoint
        # Set when the service answered 200 but the body was unusable; that call still counts.
        self.billed = billed


class CheckpointError(PromptLearningError):
    """A checkpoint file is corrupt or has an unsupported version."""
