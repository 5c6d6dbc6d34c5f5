# pbc_compress/exceptions.py


class PBCError(Exception):
    """Base exception for the pbc_compress project."""
    pass


class DimensionError(PBCError):
    """
    Exception raised when operators of different qubit counts are combined.

    Attributes:
        message (str): The primary error message.
        expected (int | None): Qubit count required by the operation.
        actual (int | None): Qubit count that was supplied.
    """
    def __init__(self, message: str, expected: int | None = None, actual: int | None = None):
        super().__init__(message)
        self.expected = expected
        self.actual = actual

    def __str__(self):
        if self.expected is not None and self.actual is not None:
            return f"{super().__str__()} (expected {self.expected} qubits, got {self.actual})"
        return super().__str__()


class ContractError(PBCError):
    """
    Exception raised when an operation's precondition does not hold:
    non-Clifford gates handed to Clifford-only code, dependent or
    non-commuting generator sets, adaptive input to a static path, and so on.

    Attributes:
        message (str): The primary error message.
        indices (tuple[int, ...]): Offending positions (generator indices, step
                                   indices, ...), empty when not applicable.
    """
    def __init__(self, message: str, indices: tuple[int, ...] | list[int] = ()):
        """
        Initializes the ContractError.

        Args:
            message: The primary error message.
            indices: Offending positions, reported back to the caller.
        """
        super().__init__(message)
        self.indices = tuple(indices)

    def __str__(self):
        if self.indices:
            return f"{super().__str__()} [indices {', '.join(map(str, self.indices))}]"
        return super().__str__()


class CircuitParseError(PBCError):
    """
    Exception raised for malformed circuit or program text.

    Attributes:
        message (str): The primary error message.
        line_no (int | None): 1-based source line, if known.
    """
    def __init__(self, message: str, line_no: int | None = None):
        super().__init__(message)
        self.line_no = line_no

    def __str__(self):
        if self.line_no is not None:
            return f"line {self.line_no}: {super().__str__()}"
        return super().__str__()


class ProbabilityZeroError(PBCError):
    """
    Distinguished signal: the circuit's postselection requirement has probability zero.

    Attributes:
        message (str): The primary error message.
        record_id (str | None): The postselected record that can never succeed.
    """
    def __init__(self, message: str, record_id: str | None = None):
        super().__init__(message)
        self.record_id = record_id


class PostselectionMissError(PBCError):
    """
    Raised when a single run fails a postselection that other runs may satisfy.
    The caller may retry.

    Attributes:
        record_id (str | None): Record whose postselection failed.
        expected (int | None): Required outcome (+1 or -1).
        observed (int | None): Outcome that actually occurred.
    """
    def __init__(
        self,
        message: str,
        record_id: str | None = None,
        expected: int | None = None,
        observed: int | None = None,
    ):
        super().__init__(message)
        self.record_id = record_id
        self.expected = expected
        self.observed = observed


class BudgetExceededError(PBCError):
    """
    Exception raised when a dense computation would exceed its configured budget.

    Attributes:
        limit (int | None): The configured limit.
        requested (int | None): The size that was asked for.
    """
    def __init__(self, message: str, limit: int | None = None, requested: int | None = None):
        super().__init__(message)
        self.limit = limit
        self.requested = requested

    def __str__(self):
        if self.limit is not None and self.requested is not None:
            return f"{super().__str__()} (limit {self.limit}, requested {self.requested})"
        return super().__str__()


class ConfigurationError(PBCError):
    """Exception raised for missing or invalid configuration or command parameters."""
    pass
