"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: InvalidInputError (and subclasses) -> 1,
IOStageError -> 2.  Everything else is a bug and propagates.
"""


class SigtabError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(SigtabError):
    """Input data or configuration violates a documented precondition."""


class SchemaError(InvalidInputError):
    """A delimited input file does not conform to its schema.

    ``lines`` holds (line_number, message) pairs; line numbers are 1-based
    positions in the physical file (header and provenance lines included).
    """

    def __init__(self, path, lines):
        self.path = str(path)
        self.lines = list(lines)
        preview = "; ".join(f"line {n}: {m}" for n, m in self.lines[:5])
        more = "" if len(self.lines) <= 5 else f" (+{len(self.lines) - 5} more)"
        super().__init__(f"{self.path}: {preview}{more}")


class ConfigurationError(InvalidInputError):
    """A pipeline configuration violates its invariants."""


class IOStageError(SigtabError):
    """A required file is missing or unreadable at a pipeline stage."""
