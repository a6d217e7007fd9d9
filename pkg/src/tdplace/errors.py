"""Exception hierarchy shared across the package."""


class TDPlaceError(Exception):
    """Base class for all package errors."""


class ParseError(TDPlaceError):
    """Design file is not valid JSON or does not follow the schema."""


class ValidationError(TDPlaceError):
    """Design file parses but violates a netlist invariant."""


class CycleError(ValidationError):
    """The timing graph contains a combinational loop."""

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__(f"combinational loop through pins {self.cycle}")


class GraphError(TDPlaceError):
    """Timing routine called on a graph without a levelization."""


class EndpointError(TDPlaceError):
    """Requested pin is not a timing endpoint."""


class NonFiniteError(TDPlaceError):
    """Objective value or gradient became NaN/inf."""

    def __init__(self, message, iteration=None):
        self.iteration = iteration
        if iteration is not None:
            message = f"iteration {iteration}: {message}"
        super().__init__(message)


class GenerationError(TDPlaceError):
    """Synthetic design spec cannot be satisfied."""


class MismatchError(TDPlaceError):
    """Placement or path data does not belong to the given design."""
