"""CSV artifacts and run manifests."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .const import FLOAT_SIGNIFICANT_DIGITS, NAME, VERSION

_LOGGER = logging.getLogger(__name__)

__all__ = [
    "RunManifest",
    "comment_block",
    "csv_text",
    "format_float",
    "format_value",
    "sha256_text",
    "write_artifact",
]


def format_float(value: float, digits: int = FLOAT_SIGNIFICANT_DIGITS) -> str:
    """Locale-independent rendering at ``digits`` significant digits."""
    return format(float(value), f".{digits}g")


def format_value(value: Any) -> str:
    """Render one CSV cell: ints verbatim, floats at 17 significant digits."""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return str(value)


def comment_block(comments: Mapping[str, Any] | None) -> str:
    """Sorted '# key=value' lines."""
    return "".join(f"# {key}={format_value(value)}\n" for key, value in sorted((comments or {}).items()))


def csv_text(
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    comments: Mapping[str, Any] | None = None,
) -> str:
    """Build CSV text with '\\n' line endings and optional '# key=value' lines on top."""
    buffer = io.StringIO()
    buffer.write(comment_block(comments))
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(value) for value in row])
    return buffer.getvalue()


def sha256_text(text: str) -> str:
    """Hex SHA-256 of the UTF-8 text."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def write_artifact(path: Path, text: str) -> str:
    """Write ``text`` to ``path`` byte-for-byte and return its checksum."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    _LOGGER.info("Wrote %s (%s bytes)", path, len(text.encode("utf-8")))
    return sha256_text(text)


@dataclass(frozen=True)
class RunManifest:
    """What was run, with which parameters, and what it produced."""

    subcommand: str
    parameters: Mapping[str, Any]
    version: str = VERSION
    program: str = NAME
    wall_time: float = 0.0
    checksums: Mapping[str, str] = field(default_factory=dict)

    def to_json(self) -> str:
        """Full manifest as indented JSON."""
        payload = asdict(self)
        payload["parameters"] = dict(self.parameters)
        payload["checksums"] = dict(self.checksums)
        return json.dumps(payload, sort_keys=True, indent=2, default=str) + "\n"

    def deterministic_json(self) -> str:
        """Manifest without the wall time, safe to embed in outputs."""
        payload = json.loads(self.to_json())
        payload.pop("wall_time")
        payload.pop("checksums")
        return json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)

    def write(self, path: Path) -> None:
        """Write the manifest JSON to ``path``."""
        write_artifact(path, self.to_json())
