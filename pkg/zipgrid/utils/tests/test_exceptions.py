import pytest
import warnings

from zipgrid.utils import exceptions
from zipgrid.utils.exceptions import (AssumptionWarning,
                                      AuditWarning,
                                      DomainExit,
                                      EquilibriumBranchWarning,
                                      IoError,
                                      NonPositiveVoltage,
                                      RankDeficientTransform,
                                      SchemaViolation,
                                      ZipGridError,
                                      ZipGridWarning)


@pytest.mark.parametrize('name', [name for name in exceptions.__all__
                                  if not name.endswith('Warning')])
def test_errors_are_rooted(name):
    assert issubclass(getattr(exceptions, name), ZipGridError)


@pytest.mark.parametrize('warning', [AssumptionWarning, AuditWarning, EquilibriumBranchWarning])
def test_warnings_are_rooted(warning):
    assert issubclass(warning, ZipGridWarning)
    assert issubclass(warning, UserWarning)
    with pytest.warns(warning):
        warnings.warn("issued", warning)


@pytest.mark.parametrize('error, builtin', [
    (exceptions.NetworkError, ValueError),
    (exceptions.NonPositiveVoltage, ValueError),
    (exceptions.SolverError, RuntimeError),
    (exceptions.SimulationError, RuntimeError),
    (exceptions.ParseError, ValueError),
    (IoError, OSError),
])
def test_builtin_bases(error, builtin):
    assert issubclass(error, builtin)


def test_error_payloads():
    assert NonPositiveVoltage("low", node=3).node == 3
    assert RankDeficientTransform("singular", 1e-20).min_singular_value == 1e-20

    exc = DomainExit("left", time=0.25, node=0)
    assert (exc.time, exc.node, exc.trajectory) == (0.25, 0, None)

    exc = SchemaViolation('network.nodes[2].R_s', 'required field is missing')
    assert exc.path == 'network.nodes[2].R_s'
    assert str(exc) == 'network.nodes[2].R_s: required field is missing'
