"""Exception hierarchy shared across the toolkit.

Two broad classes matter to callers (and to the CLI exit-code contract):
model errors (bad morphology files or definitions) and analysis errors
(bad inputs to an otherwise healthy computation).
"""


class WheellegError(Exception):
    """Base class for all toolkit errors."""


class ModelError(WheellegError):
    """Problem with a robot model definition."""


class ModelFormatError(ModelError):
    """Model file could not be parsed; message carries section/line context."""


class ModelValidationError(ModelError):
    """Model parsed but violates structural invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class AnalysisError(WheellegError):
    """Invalid input to an analysis operation."""


class DimensionError(AnalysisError):
    """Vector or matrix shape does not match the chain."""


class EmptyMatchError(AnalysisError):
    """No workspace points matched within the given radius."""


class DegenerateGeometryError(AnalysisError):
    """Point set is too degenerate for the requested estimator."""


class TrajectoryLogError(AnalysisError):
    """Malformed trajectory log (timestamps, dimensions, row count)."""


class StreamAlignmentError(AnalysisError):
    """Reference streams are missing or not time-aligned with the log."""


class PlanError(AnalysisError):
    """Transformation plan request is infeasible (duration, limits)."""


class TransitionRejected(AnalysisError):
    """Mode state machine rejected an event; message carries the reason."""


class SimulationError(AnalysisError):
    """Turning-simulator parameters outside the stable envelope."""
