"""Exception types shared across the engine."""


class FaultscopeError(Exception):
    """Base class for all engine errors."""


class CircuitError(FaultscopeError):
    """Problem with a circuit description."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CircuitSyntaxError(CircuitError):
    pass


class UndeclaredVariableError(CircuitError):
    def __init__(self, name, line=None):
        self.name = name
        super().__init__(f"undeclared variable {name!r}", line=line)


class DuplicateGateError(CircuitError):
    def __init__(self, gate_id, line=None):
        self.gate_id = gate_id
        super().__init__(f"duplicate gate id {gate_id!r}", line=line)


class CycleDetectedError(CircuitError):
    def __init__(self, wires):
        self.wires = tuple(wires)
        super().__init__(f"combinational cycle through {', '.join(self.wires)}")


class DpiError(FaultscopeError):
    """Invalid diagnosis problem instance."""


class PriorOutOfRangeError(DpiError):
    def __init__(self, comp, value):
        self.comp = comp
        self.value = value
        super().__init__(f"prior for {comp!r} must lie in (0,1), got {value}")


class UnknownComponentError(DpiError):
    def __init__(self, comp):
        self.comp = comp
        super().__init__(f"ok-literal names unknown component {comp!r}")


class SchemaError(DpiError):
    """DPI JSON does not match the documented schema."""


class TooLargeError(FaultscopeError):
    """Brute-force guard tripped (too many components to enumerate)."""


class InconsistentBaseError(FaultscopeError):
    """Entailment was queried against an already-unsatisfiable theory."""


class NoDiscriminatingQueryError(FaultscopeError):
    """No measurement point separates the current leading diagnoses."""


class UndefinedWireError(FaultscopeError):
    def __init__(self, wire):
        self.wire = wire
        super().__init__(f"no such wire {wire!r} in the simulated system")


class StaleQueryTokenError(FaultscopeError):
    """An answer was posted for a query that is no longer current."""
