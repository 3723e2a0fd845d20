"""Exception hierarchy and the verdict value shared by every checker."""

from dataclasses import dataclass
from typing import Optional


class WorkbenchError(Exception):
    """Base class of every error raised by the workbench."""


class TagError(WorkbenchError):
    """Malformed extended outer tag."""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message if index is None else f"{message} (token {index})")
        self.index = index


class IllegalPosition(WorkbenchError):
    """A position violates membership or one of Alt/Jus/EI/Dum."""

    def __init__(self, axiom: str, index: Optional[int] = None, detail: str = ""):
        where = "" if index is None else f" at occurrence {index + 1}"
        super().__init__(f"{axiom} violated{where}{': ' + detail if detail else ''}")
        self.axiom = axiom
        self.index = index


class StrategyError(WorkbenchError):
    """A strategy answered outside its game or a decomposition does not match."""


class PcfSyntaxError(WorkbenchError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class PcfTypeError(WorkbenchError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class Diverged(WorkbenchError):
    """A step or occurrence budget ran out."""


class MachineError(WorkbenchError):
    """Realization bug: stuck run, bad stack, discipline violation."""


class Unsupported(MachineError):
    """Description node the compiler has no realization for."""


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str = ""
    index: Optional[int] = None

    def __bool__(self) -> bool:
        return self.ok

    @classmethod
    def accept(cls) -> "Verdict":
        return cls(True)

    @classmethod
    def reject(cls, reason: str, index: Optional[int] = None) -> "Verdict":
        return cls(False, reason, index)
