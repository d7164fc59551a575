"""Prompt granularity classification.

A prompt is quantitative iff it binds at least one numeric magnitude to
a unit or parameter (degrees, speed, seconds, position_*, joint target
value); otherwise it is qualitative and downstream safety defaults apply.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import List, Tuple

_NUM = r"[-+]?\d+(?:\.\d+)?"

# (kind, unit, compiled pattern); order matters where patterns overlap
_QUANTITY_PATTERNS: List[Tuple[str, str, re.Pattern]] = [
    ("speed", "deg/s", re.compile(rf"({_NUM})\s*degrees?\s+per\s+second", re.I)),
    ("angle", "deg", re.compile(rf"({_NUM})\s*degrees?\b", re.I)),
    ("speed", "m/s", re.compile(rf"speed\s+of\s+({_NUM})", re.I)),
    ("duration", "s", re.compile(rf"for\s+({_NUM})\s*seconds?\b", re.I)),
    ("coordinate", "m", re.compile(rf"pos(?:i)?tion_[xyz]\s*=\s*({_NUM})", re.I)),
    ("joint_value", "rad", re.compile(rf"joints?\s+to\s+({_NUM})", re.I)),
    ("joint_value", "rad", re.compile(rf"right_j[0-6]\s+to\s+({_NUM})", re.I)),
]


@dataclass(frozen=True)
class Quantity:
    kind: str       # angle | speed | duration | coordinate | joint_value
    value: float
    unit: str

    def to_json(self):
        return {"kind": self.kind, "value": self.value, "unit": self.unit}


@dataclass(frozen=True)
class GranularityLabel:
    label: str      # qualitative | quantitative
    quantities: Tuple[Quantity, ...] = field(default_factory=tuple)

    @property
    def qualitative(self) -> bool:
        return self.label == "qualitative"

    def to_json(self):
        return {"label": self.label, "quantities": [q.to_json() for q in self.quantities]}


def classify_granularity(prompt: str) -> GranularityLabel:
    if not prompt or not prompt.strip():
        raise ValueError("prompt must be non-empty")
    found: List[Tuple[int, Quantity]] = []
    claimed: List[Tuple[int, int]] = []
    for kind, unit, pattern in _QUANTITY_PATTERNS:
        for match in pattern.finditer(prompt):
            span = match.span(1)
            if any(span[0] < hi and span[1] > lo for lo, hi in claimed):
                continue  # number already consumed by an earlier, more specific rule
            claimed.append(span)
            found.append((span[0], Quantity(kind=kind, value=float(match.group(1)), unit=unit)))
    found.sort(key=lambda item: item[0])  # report quantities in text order
    label = "quantitative" if found else "qualitative"
    return GranularityLabel(label=label, quantities=tuple(q for _, q in found))
