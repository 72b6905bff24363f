"""Run manifests: config echo, results index and verdicts, written last and atomically."""

import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Union

from .. import __version__
from ..errors import SmecticError
from .tables import format_json

MANIFEST_NAME = "manifest.json"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    command: str
    config: Dict[str, Any]
    version: str = __version__
    started: str = field(default_factory=_now)
    finished: str = ""
    results: Dict[str, Any] = field(default_factory=dict)
    artifacts: List[str] = field(default_factory=list)
    acceptance: Dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.acceptance.values())

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["passed"] = self.passed
        return data

    def write(self, directory: Union[str, Path]) -> Path:
        """Check the listed artifacts, then write manifest.json through a rename."""
        directory = Path(directory)
        missing = [name for name in self.artifacts if not (directory / name).is_file()]
        if missing:
            raise SmecticError(f"Manifest lists artifacts that are not on disk: {missing}")
        self.finished = _now()
        target = directory / MANIFEST_NAME
        staging = directory / (MANIFEST_NAME + ".new")
        with open(staging, "w", encoding="utf-8") as handle:
            handle.write(format_json(self.to_dict()) + "\n")
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(staging, target)
        return target
