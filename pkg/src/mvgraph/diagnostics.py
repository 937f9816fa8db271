"""Diagnostics and the exception hierarchy shared by every stage."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class View(str, enum.Enum):
    AST = "AST"
    CFG = "CFG"
    DFG = "DFG"

    @classmethod
    def parse(cls, text: str) -> "View":
        try:
            return cls(text.strip().upper())
        except ValueError:
            raise ValueError(f"unknown view {text!r}; expected one of ast, cfg, dfg") from None


class Category(str, enum.Enum):
    # The first five mirror the known failure classes of source-level analysis.
    GotoUnsupportedPattern = "GotoUnsupportedPattern"
    Multithreading = "Multithreading"
    PointerArithmetic = "PointerArithmetic"
    OperatorOverloading = "OperatorOverloading"
    StaticVariables = "StaticVariables"
    UnsupportedMacro = "UnsupportedMacro"
    SyntaxError = "SyntaxError"
    DroppedConditionalBranch = "DroppedConditionalBranch"
    UnresolvedPointerCall = "UnresolvedPointerCall"
    PathExplosion = "PathExplosion"
    Other = "Other"


ALL_VIEWS = frozenset(View)


@dataclass(frozen=True, order=True)
class Diagnostic:
    category: Category
    file: str
    line: int
    message: str
    fatal_for: frozenset = field(default_factory=frozenset)

    @property
    def fatal(self) -> bool:
        return bool(self.fatal_for)

    def __str__(self) -> str:
        where = f"{self.file}:{self.line}" if self.file else "<unit>"
        tag = "" if not self.fatal_for else " [fatal: " + ",".join(sorted(v.value for v in self.fatal_for)) + "]"
        return f"{where}: {self.category.value}: {self.message}{tag}"


class AnalysisError(Exception):
    """Base class for errors that abort a stage."""


class EmptyProject(AnalysisError):
    pass


class CyclicInclude(AnalysisError):
    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("include cycle: " + " -> ".join(cycle))


class UnterminatedComment(AnalysisError):
    def __init__(self, line: int, file: str = ""):
        self.line = line
        self.file = file
        where = f"{file}:{line}" if file else f"line {line}"
        super().__init__(f"unterminated /* comment starting at {where}")


class SourceSyntaxError(AnalysisError):
    def __init__(self, file: str, line: int, message: str = "unrecoverable syntax error"):
        self.file = file
        self.line = line
        super().__init__(f"{file}:{line}: {message}")


class DanglingGoto(AnalysisError):
    def __init__(self, label: str, function: str, line: int = 0):
        self.label = label
        self.function = function
        self.line = line
        super().__init__(f"goto {label!r} in {function} has no matching label")


class UnknownVariable(AnalysisError):
    pass


class ViewNotBuilt(AnalysisError):
    pass


class RendererMissing(AnalysisError):
    pass


class RenderFailed(AnalysisError):
    pass


class BadArguments(AnalysisError):
    pass
