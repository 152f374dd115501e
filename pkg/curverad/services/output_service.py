"""Service for emitting run results as JSON or CSV."""
import csv
import io
import json
import logging
import math
import sys
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence

from curverad import __version__
from curverad.config import OUTPUT_CONFIG

logger = logging.getLogger(__name__)


@dataclass
class RunManifest:
    """Everything needed to reproduce one emitted file."""

    command: str
    curve_spec: Optional[Any] = None
    config: Dict[str, Any] = field(default_factory=dict)
    version: str = __version__
    wall_time: float = 0.0
    result: Any = None
    started: float = field(default_factory=time.perf_counter, repr=False)

    def finish(self, result: Any) -> "RunManifest":
        self.result = result
        self.wall_time = time.perf_counter() - self.started
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "curve_spec": self.curve_spec,
            "config": self.config,
            "version": self.version,
            "wall_time": self.wall_time,
            "result": self.result,
        }


class OutputService:
    @staticmethod
    def format_float(value: float) -> str:
        """Fixed 15-significant-digit text, independent of locale."""
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.{OUTPUT_CONFIG['significant_digits']}g}"

    @staticmethod
    def normalize(value: Any) -> Any:
        """JSON-ready copy with floats rounded to the output precision and NaN/inf as null."""
        if isinstance(value, Enum):
            return value.value
        if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
            return value
        if isinstance(value, float):
            if not math.isfinite(value):
                return None
            return float(OutputService.format_float(value))
        if isinstance(value, dict):
            return {str(k): OutputService.normalize(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [OutputService.normalize(v) for v in value]
        if hasattr(value, "tolist"):
            return OutputService.normalize(value.tolist())
        return str(value)

    @staticmethod
    def to_json(manifest: RunManifest) -> str:
        return json.dumps(OutputService.normalize(manifest.to_dict()), indent=2, ensure_ascii=False) + "\n"

    @staticmethod
    def to_csv(manifest: RunManifest, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
        """CSV with the manifest as a leading ``# {...}`` comment line."""
        buffer = io.StringIO()
        header = json.dumps(OutputService.normalize(manifest.to_dict()), ensure_ascii=False)
        buffer.write(f"# {header}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([OutputService.format_cell(cell) for cell in row])
        return buffer.getvalue()

    @staticmethod
    def format_cell(cell: Any) -> str:
        if isinstance(cell, bool):
            return str(cell).lower()
        if isinstance(cell, float):
            return OutputService.format_float(cell)
        if isinstance(cell, Enum):
            return str(cell.value)
        return str(cell)

    @staticmethod
    def csv_body(text: str) -> List[str]:
        """Header and data lines of an emitted CSV, without the manifest line."""
        return [line for line in text.splitlines() if not line.startswith("#")]

    @staticmethod
    def emit(text: str, output: Optional[str] = None) -> None:
        """Write to ``output`` or stdout."""
        if output:
            with open(output, "w", encoding="utf-8", newline="") as f:
                f.write(text)
            logger.info(f"wrote {len(text)} bytes to {output}")
        else:
            sys.stdout.write(text)
            sys.stdout.flush()
