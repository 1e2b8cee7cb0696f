"""
Scenario files, result files, figures and the ``zipgrid`` command.

`zipgrid.io.plotting` needs matplotlib and is not imported here.
"""
from .scenario import *
from .output import *
