"""Domain errors raised by the workbench. The HTTP and CLI layers map them to status/exit codes."""


class WorkbenchError(Exception):
    """Root of every error the workbench raises on purpose."""


class SourceError(WorkbenchError):
    """Error tied to a position in some source text."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"{message}{where}")


class ExpressionSyntaxError(SourceError):
    """Malformed unary regular expression."""


class DslSyntaxError(SourceError):
    """Malformed or semantically invalid system / machine source."""


class StrictPolicyViolation(WorkbenchError):
    def __init__(self, neuron: int, candidates: list[int], time: int | None = None):
        self.neuron = neuron
        self.candidates = list(candidates)
        self.time = time
        super().__init__(
            f"neuron {neuron} has {len(candidates)} applicable rules {candidates} at t={time}"
        )


class InsufficientOutput(WorkbenchError):
    """Trace does not contain enough output events for the requested convention."""


class UnsupportedMode(WorkbenchError):
    """Operation is not defined for the system's mode."""


class CmStuck(WorkbenchError):
    """No transition entry matches the current counter machine configuration."""


class CmCounterUnderflow(WorkbenchError):
    """A DEC entry was applied to a zero counter."""


class StateSpaceExceeded(WorkbenchError):
    """Lazy state materialization went past the configured cap."""


class MissingTransition(WorkbenchError):
    """Turing machine has no transition for the current (state, symbol)."""


class EncodingError(WorkbenchError):
    """Number is not a valid configuration / tape encoding."""


class ConventionViolation(WorkbenchError):
    """Machine breaks a convention required by a construction."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
