# training/manifest.py

import hashlib
import json
import logging
import os
import subprocess
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, Optional, Sequence

logger = logging.getLogger(__name__)


def file_digest(path: str) -> str:
    sha = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            sha.update(chunk)
    return sha.hexdigest()


def source_revision() -> str:
    """`git rev-parse HEAD` of the source tree, or "unknown" outside a checkout."""
    try:
        result = subprocess.run(
            ["git", "rev-parse", "HEAD"],
            cwd=os.path.dirname(os.path.abspath(__file__)),
            capture_output=True, text=True, timeout=5, check=True,
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return result.stdout.strip() or "unknown"


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    """Provenance record written next to the outputs of every oracle-touching command."""
    command: str
    config: Dict[str, Any]
    inputs: Dict[str, str] = field(default_factory=dict)  # path -> sha256
    revision: str = "unknown"
    started_at: str = ""
    finished_at: str = ""
    metrics: Dict[str, Any] = field(default_factory=dict)
    billed_calls: int = 0
    exit_code: Optional[int] = None

    @classmethod
    def start(cls, command: str, config: Dict[str, Any], input_paths: Sequence[Optional[str]] = ()) -> "RunManifest":
        inputs = {path: file_digest(path) for path in input_paths if path and os.path.isfile(path)}
        return cls(command=command, config=config, inputs=inputs, revision=source_revision(), started_at=utc_now())

    def finish(self, billed_calls: int, exit_code: int, metrics: Optional[Dict[str, Any]] = None) -> "RunManifest":
        self.billed_calls = int(billed_calls)
        self.exit_code = exit_code
        self.metrics.update(metrics or {})
        self.finished_at = utc_now()
        return self

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(asdict(self), f, sort_keys=True, indent=2)
            f.write("\n")
        logger.info("Run manifest written to %s", path)
