"""CSV and JSON writers; every file of a run goes through one ResultWriter."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


class ResultWriter:
    """Writes tables and JSON documents below one output directory and remembers them."""

    def __init__(self, directory: Union[str, Path]):
        self.directory = Path(directory)
        self.written: List[str] = []

    def _target(self, name: str) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        return self.directory / name

    def _record(self, path: Path) -> Path:
        relative = path.relative_to(self.directory).as_posix()
        if relative not in self.written:
            self.written.append(relative)
        logger.info("Wrote %s", path)
        return path

    def write_csv(self, frame: pd.DataFrame, name: str) -> Path:
        """Full double precision, no index column."""
        path = self._target(name)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return self._record(path)

    def write_json(self, data: Dict, name: str) -> Path:
        path = self._target(name)
        path.write_text(format_json(data) + "\n", encoding="utf-8")
        return self._record(path)

    def adopt(self, path: Union[str, Path]) -> Path:
        """Register a file written elsewhere (e.g. a field snapshot) inside the directory."""
        return self._record(Path(path))


def _to_builtin(value: Any) -> Any:
    """numpy scalars and arrays become plain Python values."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def format_json(data: Dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True, default=_to_builtin)
