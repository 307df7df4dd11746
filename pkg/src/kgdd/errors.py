"""Exception types shared across the package.

Every error carries a stable machine-readable ``code`` so the HTTP layer
and the CLI can map failures without string matching.
"""

from __future__ import annotations


class KgddError(Exception):
    """Base class for all library errors."""

    code = "Error"

    def __init__(self, message: str, *, param: str | None = None):
        super().__init__(message)
        self.param = param


# --- graph store ---

class UnknownNamespace(KgddError):
    code = "UnknownNamespace"


class UnknownEntity(KgddError):
    code = "UnknownEntity"


class UnknownRelation(KgddError):
    code = "UnknownRelation"


class UnknownElement(KgddError):
    """Raised by context lookups when the id is neither entity nor relation."""

    code = "UnknownElement"


class DuplicateLabelInNamespace(KgddError):
    code = "DuplicateLabelInNamespace"


# --- ingest ---

class ParseError(KgddError):
    code = "ParseError"

    def __init__(self, message: str, *, line: int | None = None, path: str | None = None):
        where = ""
        if path:
            where += f"{path}"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}" if where else message)
        self.line = line
        self.path = path


class CycleDetected(KgddError):
    code = "CycleDetected"

    def __init__(self, message: str, cycle: list | None = None):
        super().__init__(message)
        self.cycle = cycle or []


class UnresolvedParent(KgddError):
    code = "UnresolvedParent"


class MissingTerminology(KgddError):
    code = "MissingTerminology"


# --- decision diagrams ---

class ArityMismatch(KgddError):
    code = "ArityMismatch"


class NotLayered(KgddError):
    code = "NotLayered"


class OrderMismatch(KgddError):
    code = "OrderMismatch"


class EmptyLayerDomain(KgddError):
    code = "EmptyLayerDomain"


class AnchorNotInLayer(KgddError):
    code = "AnchorNotInLayer"


class NotADag(KgddError):
    code = "NotADag"

    def __init__(self, message: str, cycle: list | None = None):
        super().__init__(message)
        self.cycle = cycle or []


class OrderIncomplete(KgddError):
    code = "OrderIncomplete"


class ValueOutOfDomain(KgddError):
    code = "ValueOutOfDomain"


class UnknownEntityInConflictEdge(KgddError):
    code = "UnknownEntityInConflictEdge"


# --- service ---

class SnapshotFormatError(KgddError):
    code = "SnapshotFormatError"
