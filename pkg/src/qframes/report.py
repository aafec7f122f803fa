"""Versioned report envelope shared by the CLI and the test harness."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__

SCHEMA_VERSION = 1
STATUSES = ("ok", "verdict-failure", "warning")


def plain(obj):
    """Convert results into JSON-native values with a deterministic layout."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if not math.isfinite(x):
            return repr(x)
        return x
    if isinstance(obj, (np.complexfloating, complex)):
        z = complex(obj)
        return {"re": z.real, "im": z.imag}
    if hasattr(obj, "to_dict"):
        return plain(obj.to_dict())
    if hasattr(obj, "render"):
        return obj.render()
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


@dataclass
class ReportEnvelope:
    task: str
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    status: str = "ok"
    tool_version: str = __version__
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    def to_dict(self) -> dict:
        return plain(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReportEnvelope":
        d = json.loads(text)
        return cls(**d)
