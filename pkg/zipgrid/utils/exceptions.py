"""Exceptions and warnings specific to zipgrid."""
__all__ = ['ZipGridError',
           'NetworkError', 'DisconnectedGraph', 'SelfLoop', 'NonPositiveParameter',
           'NetworkNotScalar',
           'NonPositiveVoltage', 'RankDeficientTransform',
           'SolverError', 'NewtonDivergence',
           'SimulationError', 'DomainExit', 'NonFiniteState',
           'InsufficientSamples',
           'ScenarioError', 'ParseError', 'SchemaViolation', 'InvariantViolation',
           'IoError',
           'ZipGridWarning', 'AssumptionWarning', 'EquilibriumBranchWarning',
           'AuditWarning']


# ----------
# Exceptions
# ----------

class ZipGridError(Exception):
    """
    Base class of zipgrid custom errors.

    All custom exceptions raised by zipgrid should inherit from this
    class and be defined in this module.
    """
    pass


class NetworkError(ZipGridError, ValueError):
    """
    The base exception for an invalid network description.
    """
    pass


class DisconnectedGraph(NetworkError):
    """
    An exception for an edge list whose graph is not connected.
    """
    pass


class SelfLoop(NetworkError):
    """
    An exception for a line whose two endpoints are the same node.
    """
    pass


class NonPositiveParameter(NetworkError):
    """
    An exception for a physical parameter outside of its admissible
    range, e.g. a non-positive inductance or a negative load power.
    """
    pass


class NetworkNotScalar(NetworkError):
    """
    An exception for operations that need a single node with no lines.
    """
    pass


class NonPositiveVoltage(ZipGridError, ValueError):
    """
    An exception for node voltages at or below the positive-voltage
    threshold `~zipgrid.classes.V_MIN`.

    Parameters
    ----------
    message : str
        The error message.

    node : int, optional
        Index of the first offending node.
    """
    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class RankDeficientTransform(ZipGridError, ValueError):
    """
    An exception for a Brayton-Moser pair whose transformation matrix
    is numerically singular.
    """
    def __init__(self, message, min_singular_value=None):
        super().__init__(message)
        self.min_singular_value = min_singular_value


class SolverError(ZipGridError, RuntimeError):
    """The base exception for iterative solvers that fail."""
    pass


class NewtonDivergence(SolverError):
    """
    An exception for a Newton iteration that does not converge within
    its iteration budget.
    """
    pass


class SimulationError(ZipGridError, RuntimeError):
    """The base exception for integrations that cannot continue."""
    pass


class DomainExit(SimulationError):
    """
    Raised when a simulated voltage leaves the positive-voltage domain.

    This is an expected outcome for unstable closed loops and is used
    as an instability witness.

    Parameters
    ----------
    message : str
        The error message.

    time : float
        Time (s) of the step at which the domain was left.

    node : int
        Index of the offending node.

    trajectory : `~zipgrid.simulation.Trajectory`, optional
        The trajectory recorded up to ``time``.
    """
    def __init__(self, message, time, node=None, trajectory=None):
        super().__init__(message)
        self.time = time
        self.node = node
        self.trajectory = trajectory


class NonFiniteState(SimulationError):
    """
    Raised when an integration step produces NaN or infinite values.
    """
    def __init__(self, message, time=None, trajectory=None):
        super().__init__(message)
        self.time = time
        self.trajectory = trajectory


class InsufficientSamples(ZipGridError, ValueError):
    """
    An exception for time series too short to be differentiated.
    """
    pass


class ScenarioError(ZipGridError):
    """The base exception for unusable scenario files."""
    pass


class ParseError(ScenarioError, ValueError):
    """An exception for scenario files that are not valid JSON."""
    pass


class SchemaViolation(ScenarioError, ValueError):
    """
    An exception for scenario content with a missing, unknown, or
    mistyped field.

    Parameters
    ----------
    path : str
        Dotted path to the offending field, e.g. ``network.nodes[2].R_s``.

    message : str
        What is wrong with the field.
    """
    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class InvariantViolation(ScenarioError, ValueError):
    """
    An exception for scenario content that is well formed but describes
    an invalid system, e.g. an event after the end of the simulation.
    """
    pass


class IoError(ZipGridError, OSError):
    """An exception for output files that cannot be read or written."""
    pass


# ----------
# Warnings:
# ----------

class ZipGridWarning(UserWarning):
    """
    Base class of zipgrid custom warnings.

    All zipgrid custom warnings should inherit from this class and be
    defined in this module.

    Warnings should be issued using `~warnings.warn`, which will not break
    execution if unhandled.
    """
    pass


class AssumptionWarning(ZipGridWarning):
    """
    A warning for configurations outside the assumptions under which the
    closed loop is guaranteed to be passive, e.g. a power bound that does
    not dominate the load powers.
    """
    pass


class EquilibriumBranchWarning(ZipGridWarning):
    """
    A warning for a steady state found on the low-voltage branch.
    """
    pass


class AuditWarning(ZipGridWarning):
    """
    A warning for dissipation samples that could not be audited.
    """
    pass
