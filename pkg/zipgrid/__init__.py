"""
zipgrid: DC networks with ZIP loads
===================================

Simulation, Brayton-Moser passivity analysis and robust decentralized
voltage control of DC networks whose nodes feed constant-impedance,
constant-current and constant-power loads.

Subpackages
-----------
Each of these subpackages (except for `classes` and `formulary`) requires
an explicit import, for example, via ``import zipgrid.simulation``.

::

 classes                           --- Network and state value objects
 formulary                         --- Load laws, dynamics, BM forms, equilibria
 control                           --- Decentralized controllers and differentiators
 simulation                        --- Time integration with load events
 diagnostics                       --- Storage functions and dissipation audits
 io                                --- Scenario files, result files and the CLI
 utils                             --- Exceptions, validation and test helpers

Utility tools
-------------
::

 __version__       --- zipgrid version string
"""
# Licensed under a 3-clause BSD style license - see LICENSE.md
import sys

if sys.version_info < (3, 7):
    raise Exception("zipgrid does not support Python < 3.7")

from .version import version as __version__

from . import classes
from . import formulary

del sys
