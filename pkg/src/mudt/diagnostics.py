"""Diagnostics shared by the schema and validator checks."""

from __future__ import annotations

from dataclasses import dataclass

ERROR = "error"
WARNING = "warning"
NOTE = "note"
SEVERITIES = (ERROR, WARNING, NOTE)

# Stable public check codes.
CHECK_CODES = {
    "P1": "no isolated nodes",
    "P2": "single root",
    "P3": "single head",
    "P4": "non-crossing arcs",
    "P5": "directed arcs",
    "P6": "main predicate as root",
    "P7": "whole-word arcs",
    "P8": "complex predicate headedness",
    "P9": "semantics-driven annotation",
    "C1": "zero copula",
    "C2": "coordination chain",
    "C3": "punctuation attachment",
    "C4": "case agreement",
    "C5": "postposition headedness",
    "C6": "fixed expression direction",
    "E_POS_UNKNOWN": "POS tag outside the tagset",
    "E_POS_SUB": "noun subcategory on a non-noun",
    "E_DEPREL_UNKNOWN": "relation outside the inventory",
    "E_LABEL_ALIAS": "relation written in a non-canonical spelling",
    "E_FEAT_KEY": "feature key outside the vocabulary",
    "E_FEAT_VALUE": "feature value outside the vocabulary",
    "E_DISCOURSE_HEAD": "discourse element not attached to the root",
}


@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: str
    token_ids: tuple[int, ...]
    message: str

    def __post_init__(self):
        if self.code not in CHECK_CODES:
            raise ValueError(f"unregistered check code {self.code!r}")
        if self.severity not in SEVERITIES:
            raise ValueError(f"bad severity {self.severity!r}")
        object.__setattr__(self, "token_ids", tuple(self.token_ids))

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "severity": self.severity,
            "token_ids": list(self.token_ids),
            "message": self.message,
        }


def error(code, ids, message) -> Diagnostic:
    return Diagnostic(code, ERROR, tuple(ids), message)


def warning(code, ids, message) -> Diagnostic:
    return Diagnostic(code, WARNING, tuple(ids), message)


def note(code, ids, message) -> Diagnostic:
    return Diagnostic(code, NOTE, tuple(ids), message)
