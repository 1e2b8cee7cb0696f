"""
A module to contain various decorators and checks used to validate the
physical inputs of zipgrid functions.
"""
__all__ = ['check_values',
           'to_si',
           'validate_quantities',
           'ValidateQuantities']

from zipgrid.utils.decorators.checks import check_values
from zipgrid.utils.decorators.validators import (to_si,
                                                 validate_quantities,
                                                 ValidateQuantities)
