"""Exception hierarchy shared across the engine."""


class VqcmonError(Exception):
    """Base class for all engine errors."""


class ConfigurationError(VqcmonError):
    """Invalid launch-time configuration (qubit count, dataset size, ...)."""


class CircuitError(VqcmonError):
    """Invalid gate or wire usage against a concrete state/circuit."""


class InputError(VqcmonError):
    """Invalid runtime input (feature vector length, empty batch, ...)."""


class CircuitParseError(VqcmonError):
    """Malformed circuit file; carries the offending 1-based line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class FitError(VqcmonError):
    """Decay fit impossible (fewer than 3 usable rows)."""
