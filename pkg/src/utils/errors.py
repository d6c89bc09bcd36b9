class NMSpdcError(Exception):
    """Base exception for the simulator."""


class DomainError(NMSpdcError, ValueError):
    """Argument outside the domain of an operation (odd N, k out of range, ...)."""


class PreconditionError(DomainError):
    """Input state violates an operation's precondition."""


class NumericError(NMSpdcError, ArithmeticError):
    """A numeric procedure failed to meet its accuracy budget."""


class TruncationError(NumericError):
    """Fock-space truncation lost more norm than allowed."""

    def __init__(self, message: str, deficit: float) -> None:
        super().__init__(f"{message} (norm deficit {deficit:.3e})")
        self.deficit = deficit


class DivergenceError(NumericError):
    """Three-term recurrence blew up or failed its closing equation."""


class ConfigError(NMSpdcError):
    """Environment configuration is invalid."""


class UsageError(NMSpdcError):
    """Command-line arguments are invalid."""
