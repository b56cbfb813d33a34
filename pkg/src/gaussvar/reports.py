"""Report records and deterministic text tables."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Sequence


def fmt(v: Any) -> str:
    """Stable text form of a table cell."""
    if isinstance(v, bool):
        return "pass" if v else "fail"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.10g}"
    return str(v)


def format_table(rows: Sequence[Sequence[Any]], columns: Sequence[str]) -> str:
    lines = ["\t".join(columns)]
    lines += ["\t".join(fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def relative_change(a: float, b: float) -> float:
    if not (math.isfinite(a) and math.isfinite(b)):
        return math.inf
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def stable(a: float, b: float, threshold: float = 0.1) -> bool:
    return relative_change(a, b) < threshold


@dataclass
class ConditionReport:
    """Fitted constant of an exponent condition with its sampling-stability verdict.

    ``fitted_constant`` comes from the densest sample and ``half_constant``
    from the half-density one; ``verdict`` is True when both are finite and
    differ by less than ``threshold`` (relative).
    """

    condition: str
    fitted_constant: float
    half_constant: float
    verdict: bool
    threshold: float = 0.1
    witnesses: list = field(default_factory=list)
    skipped: int = 0
    notes: dict = field(default_factory=dict)

    @property
    def stability_delta(self) -> float:
        return relative_change(self.fitted_constant, self.half_constant)

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["stability_delta"] = self.stability_delta
        return json.loads(json.dumps(rec, default=_jsonable))

    def row(self) -> list:
        return [self.condition, self.fitted_constant, self.stability_delta, self.verdict]

    ROW_COLUMNS = ("condition", "constant", "stability_delta", "verdict")


@dataclass
class CheckReport:
    """Outcome of a numerical inequality or bound verification."""

    name: str
    sample: str
    fitted_constant: float
    stability_delta: float
    passed: bool
    violations: int = 0
    details: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return json.loads(json.dumps(asdict(self), default=_jsonable))

    def row(self) -> list:
        return [self.name, self.sample, self.fitted_constant, self.stability_delta, self.violations, self.passed]

    ROW_COLUMNS = ("check", "sample", "constant", "stability_delta", "violations", "pass")


def _jsonable(o):
    try:
        import numpy as np

        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, np.generic):
            return o.item()
    except ImportError:  # pragma: no cover
        pass
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    return str(o)


def reports_table(reports: Iterable) -> str:
    reports = list(reports)
    if not reports:
        return ""
    return format_table([r.row() for r in reports], type(reports[0]).ROW_COLUMNS)
