"""Diagnostics with stable codes and source spans."""

from __future__ import annotations

from dataclasses import dataclass, field

from .sexpr import Span

ERROR, WARNING, INFO = "error", "warning", "info"


@dataclass
class Diagnostic:
    severity: str
    code: str
    message: str
    span: Span
    counterexample: dict | None = field(default=None)

    def format(self) -> str:
        text = f"{self.span}: {self.severity}[{self.code}]: {self.message}"
        if self.counterexample:
            shown = ", ".join(f"{k} = {v}" for k, v in self.counterexample.items())
            text += f" (counterexample: {shown})"
        return text

    def to_json(self) -> dict:
        s = self.span
        out = {
            "severity": self.severity,
            "code": self.code,
            "message": self.message,
            "file": s.file,
            "start": [s.start_line, s.start_col],
            "end": [s.end_line, s.end_col],
        }
        if self.counterexample:
            out["counterexample"] = dict(self.counterexample)
        return out


def error(code: str, message: str, span: Span, cex: dict | None = None) -> Diagnostic:
    return Diagnostic(ERROR, code, message, span, cex)


def warning(code: str, message: str, span: Span) -> Diagnostic:
    return Diagnostic(WARNING, code, message, span)
