# File: prompt_learning_engine/main.py

"""
Command line for black-box prompt learning.

    build-vocab  PMI n-gram vocabulary from a corpus
    train        learn a prompt distribution against an oracle
    eval         score a checkpoint's argmax prompt (or no prompt) on a dataset
    transfer     score a source checkpoint's prompt on another task

Exit codes: 0 success, 1 I/O error, 2 configuration/dataset error,
3 budget exhausted, 4 oracle unavailable, 5 bad checkpoint.
"""

import argparse
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Tuple

from prompt_learning_engine.config.loader import (
    TaskDefinition, check_bounds, load_train_defaults, load_planted_task, load_task, load_train_config,
)
from prompt_learning_engine.models.constants import (
    BILLING_UNITS, LOSS_ALIASES, METRICS, OPTIMIZER_ALIASES, PLACEMENTS, ExitCode,
)
from prompt_learning_engine.models.errors import (
    BudgetExceededError, CheckpointError, ConfigurationError, InvalidDatasetError, InvalidInputError,
    InvalidSpecError, OracleUnavailableError,
)
from prompt_learning_engine.models.example import Example
from prompt_learning_engine.models.train_config import TrainConfig
from prompt_learning_engine.models.vocabulary import CandidateVocabulary, PmiConfig
from prompt_learning_engine.oracle.base import Oracle
from prompt_learning_engine.oracle.budget import BudgetLedger
from prompt_learning_engine.oracle.remote import RemoteOracle
from prompt_learning_engine.oracle.synthetic import (
    PlantedTask, SyntheticPlantedOracle, make_planted_examples, planted_vocabulary,
)
from prompt_learning_engine.parsers.dataset_parser import DatasetParser, read_corpus
from prompt_learning_engine.parsers.vocab_file import read_vocab, write_vocab
from prompt_learning_engine.processing.pmi_vocab import build_vocab_from_lines
from prompt_learning_engine.training.checkpoint import read_checkpoint
from prompt_learning_engine.training.few_shot import make_few_shot_split
from prompt_learning_engine.training.manifest import RunManifest
from prompt_learning_engine.training.trainer import Trainer, evaluate_checkpoint

logger = logging.getLogger(__name__)

DEFAULT_CHECKPOINT = os.path.join("checkpoints", "prompt.json")
# Held-out examples per class generated for --synthetic runs without a dataset.
SYNTHETIC_TEST_PER_CLASS = 16

# CLI flag -> TrainConfig field
TRAIN_FLAGS = {
    "prompt_length": "prompt_length",
    "vocab_size": "vocab_size",
    "lr": "learning_rate",
    "epochs": "epochs",
    "sample_size": "sample_count",
    "batch_size": "batch_size",
    "eval_batch_size": "eval_batch_size",
    "loss": "loss_kind",
    "optimizer": "optimizer_kind",
    "weight_decay": "weight_decay",
    "grad_clip": "grad_clip",
    "placement": "placement",
    "budget": "budget_limit",
    "billing": "billing_unit",
    "metric": "metric",
    "k_shot": "k_shot",
    "seed": "seed",
}


def print_banner(command: str):
    """Print tool banner"""
    print("=" * 70)
    print(f"Black-Box Prompt Learning :: {command}")
    print("=" * 70)


def manifest_path(anchor: str, command: str) -> str:
    stem, _ = os.path.splitext(anchor)
    return f"{stem}.{command}.manifest.json"


def exit_code_for(error: BaseException) -> int:
    if isinstance(error, BudgetExceededError):
        return ExitCode.BUDGET_EXCEEDED
    if isinstance(error, OracleUnavailableError):
        return ExitCode.ORACLE_UNAVAILABLE
    if isinstance(error, CheckpointError):
        return ExitCode.CHECKPOINT_ERROR
    if isinstance(error, (ConfigurationError, InvalidDatasetError, InvalidSpecError, InvalidInputError)):
        return ExitCode.CONFIG_ERROR
    return ExitCode.IO_ERROR


# --- shared setup -----------------------------------------------------------

def resolve_config(args: argparse.Namespace, task: Optional[TaskDefinition] = None) -> TrainConfig:
    overrides = {field: getattr(args, flag, None) for flag, field in TRAIN_FLAGS.items()}
    if overrides["metric"] is None and task is not None:
        overrides["metric"] = task.metric
    config = load_train_config(getattr(args, "config", None), overrides)
    for warning in check_bounds(config):
        logger.warning("%s (proceeding anyway)", warning)
    return config


def resolve_task(args: argparse.Namespace) -> TaskDefinition:
    name = args.task or ("planted" if args.synthetic else None)
    return load_task(name)


def build_oracle(args: argparse.Namespace, ledger: BudgetLedger, billing_unit: str) -> Tuple[Oracle, Optional[PlantedTask]]:
    if args.synthetic:
        planted = load_planted_task(args.planted_task_file)
        logger.info("Using the in-process planted oracle")
        return SyntheticPlantedOracle(planted, ledger, billing_unit), planted
    transport = load_train_defaults().get("oracle", {})
    oracle = RemoteOracle.from_env(
        ledger,
        billing_unit=billing_unit,
        timeout=float(transport.get("timeout_seconds", 30)),
        max_attempts=int(transport.get("max_attempts", 3)),
        backoff_seconds=float(transport.get("backoff_seconds", 0.5)),
        max_in_flight=int(transport.get("max_in_flight", 4)),
    )
    logger.info("Using remote oracle at %s", oracle.url)
    return oracle, None


def load_examples(args: argparse.Namespace, task: TaskDefinition, planted: Optional[PlantedTask],
                  per_class: int, seed: int) -> List[Example]:
    if args.data:
        parser = DatasetParser(task.label_index, pair=task.pair)
        return parser.load(args.data)
    if planted is not None:
        examples = make_planted_examples(planted, per_class=per_class, seed=seed)
        print(f"Generated {len(examples)} planted examples (seed {seed})")
        return examples
    raise ConfigurationError("--data is required unless --synthetic is given")


def resolve_vocab(args: argparse.Namespace, config: TrainConfig, planted: Optional[PlantedTask]) -> CandidateVocabulary:
    if args.vocab:
        vocab = read_vocab(args.vocab)
    elif planted is not None:
        vocab = planted_vocabulary(planted, config.vocab_size)
    else:
        raise ConfigurationError("--vocab is required; build one with the build-vocab command")
    if len(vocab) > config.vocab_size:
        vocab = vocab.truncate(config.vocab_size)
    elif len(vocab) < config.vocab_size:
        logger.warning("Vocabulary has %d entries, fewer than the requested N=%d; using %d",
                       len(vocab), config.vocab_size, len(vocab))
        config.vocab_size = len(vocab)
    return vocab


# --- commands ---------------------------------------------------------------

def cmd_build_vocab(args: argparse.Namespace) -> int:
    print_banner("build-vocab")
    defaults = load_train_defaults().get("vocab", {})
    config = PmiConfig(
        sigma=args.sigma if args.sigma is not None else float(defaults.get("sigma", 0.0)),
        min_freq=args.min_freq if args.min_freq is not None else int(defaults.get("min_freq", 2)),
        max_vocab=args.max_vocab if args.max_vocab is not None else int(defaults.get("max_vocab", 100)),
        max_ngram_len=args.max_ngram_len if args.max_ngram_len is not None else int(defaults.get("max_ngram_len", 3)),
    )
    print(f"\nStep 1: Reading corpus {args.corpus}...")
    lines = read_corpus(args.corpus)
    print(f"Loaded {len(lines)} lines")

    print(f"Step 2: Segmenting with PMI (sigma={config.sigma}, f={config.min_freq})...")
    vocab = build_vocab_from_lines(lines, config)
    if len(vocab) < config.max_vocab:
        logger.warning("Only %d n-grams survived, fewer than max_vocab=%d", len(vocab), config.max_vocab)

    write_vocab(vocab, args.out)
    print(f"Vocabulary saved to: {args.out}")
    print(f"Entries: {len(vocab)}  frequency range: {min(vocab.frequencies)}..{max(vocab.frequencies)}")
    return ExitCode.SUCCESS


def cmd_train(args: argparse.Namespace) -> int:
    print_banner("train")
    task = resolve_task(args)

    if args.resume:
        checkpoint = read_checkpoint(args.resume)
        base = checkpoint.config.to_dict()
        base.update({field: getattr(args, flag) for flag, field in TRAIN_FLAGS.items()
                     if getattr(args, flag, None) is not None})
        config = TrainConfig.from_dict(base)
        ledger = BudgetLedger(config.budget_limit, checkpoint.billed_calls)
    else:
        checkpoint = None
        config = resolve_config(args, task)
        ledger = BudgetLedger(config.budget_limit)
    oracle, planted = build_oracle(args, ledger, config.billing_unit)
    vocab = checkpoint.vocab if checkpoint else resolve_vocab(args, config, planted)

    examples = load_examples(args, task, planted, per_class=2 * config.k_shot + SYNTHETIC_TEST_PER_CLASS,
                             seed=config.seed)
    split = make_few_shot_split(examples, config.k_shot, config.seed, num_classes=task.verbalizer.num_classes)

    print(f"\nTask: {task.name}  n={config.prompt_length}  N={len(vocab)}  I={config.sample_count}  "
          f"lr={config.learning_rate}  epochs={config.epochs}  budget={config.budget_limit}")
    print(f"Split: {len(split.train)} train / {len(split.dev)} dev / {len(split.test)} test")

    def report(entry: Dict[str, Any]):
        dev = f"{entry['dev_metric']:.4f}" if "dev_metric" in entry else "n/a"
        print(f"  epoch {entry['epoch']:>3}: train loss {entry['train_loss']:.4f}  "
              f"dev {config.metric} {dev}  billed {entry['billed_calls']}")

    if checkpoint:
        trainer = Trainer.from_checkpoint(checkpoint, oracle, task.verbalizer, config=config, on_epoch_end=report)
    else:
        trainer = Trainer(config, vocab, oracle, task.verbalizer, on_epoch_end=report)

    manifest = RunManifest.start("train", config.to_dict(), [args.data, args.vocab, args.config, args.planted_task_file])
    path = args.manifest or manifest_path(args.checkpoint, "train")
    try:
        result = trainer.train(split, args.checkpoint)
    except (BudgetExceededError, OracleUnavailableError) as e:
        manifest.finish(ledger.used, exit_code_for(e), {"status": trainer.status, "best_dev": trainer.best_dev})
        manifest.write(path)
        print(f"\nTraining halted: {e}")
        print(f"Checkpoint saved to: {args.checkpoint} (epochs completed: {trainer.epochs_completed})")
        raise

    metrics = {"status": result.status, "best_dev": result.best_dev}
    print("\n" + "=" * 70)
    print("SUCCESS: training completed")
    print("=" * 70)
    print(f"Best dev {config.metric}: {result.best_dev if result.best_dev is not None else 'n/a'}")
    print(f"Prompt: {' '.join(result.prompt_tokens())}")
    print(f"Billed calls: {ledger.used}/{ledger.limit}")
    print(f"Checkpoint saved to: {args.checkpoint}")
    manifest.finish(ledger.used, ExitCode.SUCCESS, metrics).write(path)
    return ExitCode.SUCCESS


def _evaluate_command(args: argparse.Namespace, command: str, baseline: bool) -> int:
    task = resolve_task(args)
    checkpoint = None if args.no_prompt else read_checkpoint(args.checkpoint)
    config = checkpoint.config if checkpoint else resolve_config(args, task)
    metric = args.metric or task.metric
    placement = args.placement or config.placement
    budget = args.budget if args.budget is not None else config.budget_limit
    ledger = BudgetLedger(budget)
    oracle, planted = build_oracle(args, ledger, args.billing or config.billing_unit)
    examples = load_examples(args, task, planted, per_class=SYNTHETIC_TEST_PER_CLASS, seed=config.seed + 1)
    tokens = checkpoint.prompt_tokens() if checkpoint else []
    batch_size = args.eval_batch_size or config.eval_batch_size

    print(f"\nPrompt: {' '.join(tokens) if tokens else '(none)'}")
    manifest = RunManifest.start(command, config.to_dict(), [args.checkpoint, args.data, args.planted_task_file])
    path = args.manifest or manifest_path(args.checkpoint or args.data or command, command)
    metrics: Dict[str, Any] = {}
    try:
        result = evaluate_checkpoint(checkpoint, examples, oracle, task.verbalizer, metric, placement, batch_size)
        metrics[metric] = result.value
        print(f"{task.name} {metric}: {result.value:.4f}  (loss {result.loss:.4f}, {len(examples)} examples)")
        if baseline and tokens:
            base = evaluate_checkpoint(None, examples, oracle, task.verbalizer, metric, placement, batch_size)
            metrics[f"baseline_{metric}"] = base.value
            print(f"no-prompt baseline {metric}: {base.value:.4f}  (improvement {result.value - base.value:+.4f})")
    except (BudgetExceededError, OracleUnavailableError) as e:
        manifest.finish(ledger.used, exit_code_for(e), metrics).write(path)
        raise
    print(f"Billed calls: {ledger.used}/{ledger.limit}")
    manifest.finish(ledger.used, ExitCode.SUCCESS, metrics).write(path)
    return ExitCode.SUCCESS


def cmd_eval(args: argparse.Namespace) -> int:
    print_banner("eval")
    if not args.no_prompt and not args.checkpoint:
        raise ConfigurationError("eval needs --checkpoint or --no-prompt")
    return _evaluate_command(args, "eval", baseline=False)


def cmd_transfer(args: argparse.Namespace) -> int:
    print_banner("transfer")
    if not args.task and not args.synthetic:
        raise ConfigurationError("transfer needs --task naming the target verbalizer")
    return _evaluate_command(args, "transfer", baseline=True)


# --- argument parsing -------------------------------------------------------

def _add_oracle_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--task", help="task name from config/tasks.yml (selects the verbalizer)")
    parser.add_argument("--data", help="labelled TSV dataset")
    parser.add_argument("--synthetic", action="store_true", help="use the in-process planted oracle")
    parser.add_argument("--planted-task", dest="planted_task_file", help="planted task YAML (default: packaged planted_task.yml)")
    parser.add_argument("--budget", type=int, help="API call limit (default 8000)")
    parser.add_argument("--billing", choices=sorted(BILLING_UNITS))
    parser.add_argument("--metric", choices=sorted(METRICS))
    parser.add_argument("--placement", choices=sorted(PLACEMENTS))
    parser.add_argument("--eval-batch-size", type=int)
    parser.add_argument("--manifest", help="where to write the run manifest")
    parser.add_argument("--config", help="user YAML overriding config/defaults.yml")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prompt-learning", description="Black-box discrete prompt learning")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    vocab = sub.add_parser("build-vocab", help="extract a PMI n-gram vocabulary")
    vocab.add_argument("--corpus", required=True, help="one example per line, optional label<TAB> prefix")
    vocab.add_argument("--out", required=True)
    vocab.add_argument("--sigma", type=float)
    vocab.add_argument("--min-freq", type=int)
    vocab.add_argument("--max-vocab", type=int)
    vocab.add_argument("--max-ngram-len", type=int)
    vocab.set_defaults(handler=cmd_build_vocab)

    train = sub.add_parser("train", help="learn a prompt distribution")
    _add_oracle_flags(train)
    train.add_argument("--vocab", help="vocabulary file from build-vocab")
    train.add_argument("--checkpoint", default=DEFAULT_CHECKPOINT, help="output checkpoint path")
    train.add_argument("--resume", help="continue from an earlier checkpoint")
    train.add_argument("--prompt-length", type=int)
    train.add_argument("--vocab-size", type=int)
    train.add_argument("--lr", type=float)
    train.add_argument("--epochs", type=int)
    train.add_argument("--sample-size", type=int, help="I, prompt samples per step")
    train.add_argument("--batch-size", type=int)
    train.add_argument("--loss", choices=sorted(LOSS_ALIASES))
    train.add_argument("--optimizer", choices=sorted(OPTIMIZER_ALIASES))
    train.add_argument("--weight-decay", type=float)
    train.add_argument("--grad-clip", type=float)
    train.add_argument("--k-shot", type=int)
    train.add_argument("--seed", type=int)
    train.set_defaults(handler=cmd_train)

    for name, handler, helptext in (("eval", cmd_eval, "evaluate a checkpoint's prompt"),
                                    ("transfer", cmd_transfer, "evaluate a source prompt on a target task")):
        cmd = sub.add_parser(name, help=helptext)
        _add_oracle_flags(cmd)
        cmd.add_argument("--checkpoint", help="source checkpoint")
        cmd.add_argument("--no-prompt", action="store_true", help="evaluate with an empty prompt")
        cmd.set_defaults(handler=handler)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.handler(args)
    except KeyboardInterrupt:
        print("\n\nProcess interrupted by user")
        return ExitCode.IO_ERROR
    except (BudgetExceededError, OracleUnavailableError) as e:
        print(f"Error: {e}")
        return exit_code_for(e)
    except (CheckpointError, ConfigurationError, InvalidDatasetError, InvalidSpecError, InvalidInputError) as e:
        print(f"Error: {e}")
        return exit_code_for(e)
    except OSError as e:
        print(f"Error: {e}")
        return ExitCode.IO_ERROR


if __name__ == "__main__":
    sys.exit(main())
