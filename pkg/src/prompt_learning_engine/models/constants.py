# models/constants.py

"""
This file defines constants and enum-like structures for prompt placements,
loss functions, optimizers, evaluation metrics, billing units and CLI exit codes.

These constants are used throughout the prompt_learning_engine project so that
configuration files, checkpoints and the command line all speak the same names.
"""

# --- Numerical constants ---
# Lower clamp applied to p_{i,j_i} before taking 1/p in the score function.
PROB_FLOOR = 1e-6
# Probability clamp used by the cross-entropy loss.
LOSS_PROB_CLAMP = 1e-12
# Tolerance for ProbVector invariants (entries sum to one).
SIMPLEX_TOLERANCE = 1e-9

# Bisection stopping rules for the simplex threshold solver.
BISECTION_RESIDUAL_TOL = 1e-10
BISECTION_WIDTH_TOL = 1e-12
BISECTION_MAX_ITER = 200


# --- Prompt placement (where prompt tokens go relative to the input) ---
class Placement:
    """Represents the supported prompt placements."""
    PREFIX = "prefix"
    INFIX = "infix"  # inserted at the midpoint token boundary of the input
    SUFFIX = "suffix"

PLACEMENTS = {Placement.PREFIX, Placement.INFIX, Placement.SUFFIX}


# --- Loss functions ---
class LossKind:
    """Represents the supported training objectives."""
    CROSS_ENTROPY = "cross_entropy"
    HINGE = "hinge"

LOSS_KINDS = {LossKind.CROSS_ENTROPY, LossKind.HINGE}

# Short names accepted on the command line.
LOSS_ALIASES = {"ce": LossKind.CROSS_ENTROPY, "hinge": LossKind.HINGE}


# --- Optimizers applied to the distribution rows before projection ---
class OptimizerKind:
    """Represents the supported row update rules."""
    PROJECTED_SGD = "projected_sgd"
    ADAPTIVE_MOMENT_PROJECTED = "adaptive_moment_projected"

OPTIMIZER_KINDS = {OptimizerKind.PROJECTED_SGD, OptimizerKind.ADAPTIVE_MOMENT_PROJECTED}

OPTIMIZER_ALIASES = {
    "sgd": OptimizerKind.PROJECTED_SGD,
    "adam": OptimizerKind.ADAPTIVE_MOMENT_PROJECTED,
}


# --- Evaluation metrics ---
class Metric:
    """Represents the supported evaluation metrics."""
    ACCURACY = "accuracy"
    MACRO_F1 = "macro_f1"
    BINARY_F1 = "binary_f1"  # positive class is index 1
    MCC = "mcc"

METRICS = {Metric.ACCURACY, Metric.MACRO_F1, Metric.BINARY_F1, Metric.MCC}


# --- Oracle billing ---
class BillingUnit:
    """How many ledger units a single scoring request costs."""
    BATCH = "batch"  # one unit per request, regardless of its size
    EXAMPLE = "example"  # one unit per query inside the request

BILLING_UNITS = {BillingUnit.BATCH, BillingUnit.EXAMPLE}


# --- Training status recorded in checkpoints ---
class TrainStatus:
    """Terminal state of a training run."""
    COMPLETED = "completed"
    BUDGET_EXHAUSTED = "budget_exhausted"
    ORACLE_UNAVAILABLE = "oracle_unavailable"


# --- CLI exit codes ---
class ExitCode:
    """Stable process exit codes of the command line."""
    SUCCESS = 0
    IO_ERROR = 1
    CONFIG_ERROR = 2
    BUDGET_EXCEEDED = 3
    ORACLE_UNAVAILABLE = 4
    CHECKPOINT_ERROR = 5


# --- File formats ---
CHECKPOINT_VERSION = 1
VOCAB_FILE_HEADER = "# prompt-vocab v1"

# Environment variables read by the remote oracle client.
ENV_ORACLE_ENDPOINT = "ORACLE_ENDPOINT"
ENV_ORACLE_AUTH_TOKEN = "ORACLE_AUTH_TOKEN"
