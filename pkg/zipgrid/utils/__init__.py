"""
Package of functions and classes used to develop clean, readable, and informative
code.
"""
__all__ = ['AssumptionWarning', 'AuditWarning', 'DisconnectedGraph', 'DomainExit',
           'EquilibriumBranchWarning', 'InsufficientSamples', 'InvariantViolation',
           'IoError', 'NetworkError', 'NetworkNotScalar', 'NewtonDivergence',
           'NonFiniteState', 'NonPositiveParameter', 'NonPositiveVoltage',
           'ParseError', 'RankDeficientTransform', 'ScenarioError', 'SchemaViolation',
           'SelfLoop', 'SimulationError', 'SolverError',
           'ZipGridError', 'ZipGridWarning']

from zipgrid.utils.exceptions import (
    AssumptionWarning,
    AuditWarning,
    DisconnectedGraph,
    DomainExit,
    EquilibriumBranchWarning,
    InsufficientSamples,
    InvariantViolation,
    IoError,
    NetworkError,
    NetworkNotScalar,
    NewtonDivergence,
    NonFiniteState,
    NonPositiveParameter,
    NonPositiveVoltage,
    ParseError,
    RankDeficientTransform,
    ScenarioError,
    SchemaViolation,
    SelfLoop,
    SimulationError,
    SolverError,
    ZipGridError,
    ZipGridWarning,
)
