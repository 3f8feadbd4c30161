"""Findings reported by validation, generation and bounds checking.

Codes form a closed, documented set (see ``CODES``). Tests and tooling compare
``(code, layer, subject)``; the message is for humans only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum


class Severity(IntEnum):
    INFO = 0
    WARNING = 1
    ERROR = 2

    def __str__(self) -> str:
        return self.name


CODES = {
    # model structure
    "EMPTY_LAYER": Severity.ERROR,
    "NO_PROJECTION": Severity.ERROR,
    "UNTYPED_CONCRETE": Severity.WARNING,
    "NO_UPWARD_IMAGE": Severity.INFO,
    # requirements
    "NO_TOP_LEVEL_REQUIREMENT": Severity.ERROR,
    "UNKNOWN_CLASS": Severity.ERROR,
    "UNKNOWN_COMPONENT": Severity.ERROR,
    "BAD_REQ_LAYER": Severity.ERROR,
    # modelling lint
    "PHANTOM_RISK": Severity.INFO,
    # strategy
    "CRITERION1_VIOLATION": Severity.ERROR,
    "CRITERION2_VIOLATION": Severity.ERROR,
    "NO_PROJECTION_FOR_TEMPLATE": Severity.ERROR,
    "PATH_TRUNCATED": Severity.WARNING,
    # bounds
    "BOUND_EXCEEDED": Severity.WARNING,
}

CRITERION_CODES = frozenset({"CRITERION1_VIOLATION", "CRITERION2_VIOLATION"})


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    layer: int | None
    subject: str
    message: str = field(default="", compare=False)

    @classmethod
    def of(cls, code: str, layer: int | None, subject: str, message: str = "") -> "Diagnostic":
        return cls(CODES[code], code, layer, subject, message)

    @property
    def key(self) -> tuple:
        return (self.code, self.layer, self.subject)

    def line(self) -> str:
        layer = "-" if self.layer is None else self.layer
        text = f"{self.severity} {self.code} layer={layer} {self.subject}"
        return f"{text} {self.message}" if self.message else text

    def to_dict(self) -> dict:
        return {
            "severity": str(self.severity),
            "code": self.code,
            "layer": self.layer,
            "subject": self.subject,
            "message": self.message,
        }


def worst(diagnostics) -> Severity | None:
    return max((d.severity for d in diagnostics), default=None)
