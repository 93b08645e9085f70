"""Structured experiment records with deterministic serialization.

Reals serialize with explicit exponent notation at 17 significant digits
so every CSV cell round-trips; integers print exactly; JSON keys are
sorted.  No timestamps or environment data enter any artifact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


def fmt_real(x: float) -> str:
    return "%.16e" % float(x)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if hasattr(v, "item"):  # numpy scalars
        return v.item()
    if hasattr(v, "tolist"):
        return _jsonable(v.tolist())
    return v


@dataclass
class ExperimentReport:
    """Inputs, computed statistics, reference values, and verdicts."""

    title: str
    inputs: dict = field(default_factory=dict)
    computed: dict = field(default_factory=dict)
    references: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def as_dict(self, config: dict | None = None) -> dict:
        out = {
            "title": self.title,
            "inputs": _jsonable(self.inputs),
            "computed": _jsonable(self.computed),
            "references": _jsonable(self.references),
            "verdicts": _jsonable(self.verdicts),
            "passed": self.passed,
        }
        if config is not None:
            out["config"] = _jsonable(config)
        return out

    def to_json(self, config: dict | None = None) -> str:
        return json.dumps(self.as_dict(config), sort_keys=True, indent=2)


def csv_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int,)):
        return str(v)
    if isinstance(v, float):
        return fmt_real(v)
    return str(v)


def csv_lines(header: list[str], rows, config: dict | None = None) -> list[str]:
    lines = []
    if config is not None:
        lines.append("# corrlab " + json.dumps(_jsonable(config), sort_keys=True))
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(csv_cell(v) for v in row))
    return lines
