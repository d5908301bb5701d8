"""Exception hierarchy shared by every module."""


class DeptwError(Exception):
    """Base class for all library errors."""


class QdimacsError(DeptwError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class PosetError(DeptwError):
    def __init__(self, message, line=None, pair=None):
        self.line = line
        self.pair = pair
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GraphError(DeptwError):
    pass


class OrderingError(DeptwError):
    """An elimination ordering does not fit the graph or the poset."""


class DecompositionError(DeptwError):
    pass


class StrategyError(DeptwError):
    pass


class SolverError(DeptwError):
    pass


class ProofFormatError(DeptwError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BoundExceeded(DeptwError):
    """Refusal raised by brute-force routines guarded by a size cap."""


class InvariantError(DeptwError):
    """An internal consistency check failed; indicates a bug."""
