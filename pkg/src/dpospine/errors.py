"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class DPOError(Exception):
    """Base class for every error raised by this package."""


class HostMismatchError(DPOError, ValueError):
    pass


class DomainMismatchError(DPOError, ValueError):
    pass


class InvalidMatchError(DPOError, ValueError):
    pass


class GluingError(DPOError):
    """A match violates the dangling or the identification condition."""

    def __init__(self, condition: str, items: list[str], step: int | None = None):
        self.condition = condition
        self.items = items
        self.step = step
        where = "" if step is None else f" at step {step}"
        super().__init__(f"{condition} condition violated{where}: {', '.join(items)}")


class UnknownRuleError(DPOError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class NoMatchError(DPOError):
    pass


class ScriptError(DPOError):
    """Wraps any failure of a scripted derivation with the offending step index."""

    def __init__(self, index: int, cause: Exception):
        self.index = index
        self.cause = cause
        super().__init__(f"script step {index}: {cause}")


class IndependenceError(DPOError):
    """Raised when a conflux/interchange square cannot be formed."""

    def __init__(self, message: str, cell: tuple[int, int] | None = None):
        self.cell = cell
        super().__init__(message if cell is None else f"grid cell {cell}: {message}")


class IdentifierClashError(DPOError):
    pass


class FactorizationError(DPOError):
    def __init__(self, missing_vertices, missing_edges):
        self.missing_vertices = sorted(missing_vertices)
        self.missing_edges = sorted(missing_edges)
        super().__init__(
            "accessed part does not factor through the given subgraph; missing "
            f"vertices {self.missing_vertices}, edges {self.missing_edges}"
        )


class IsoSearchUndecided(DPOError):
    """The isomorphism candidate cap was hit before a decision was reached."""


class FormatError(DPOError, ValueError):
    """An artifact file is malformed or fails validation; ``where`` locates the field."""

    def __init__(self, where: str, problems: list[str] | str):
        self.where = where
        self.problems = [problems] if isinstance(problems, str) else list(problems)
        super().__init__(f"{where}: " + "; ".join(self.problems))
