"""
Conversion of unit-aware inputs to plain SI numbers.

zipgrid works in SI floats internally.  Public entry points accept either
`~astropy.units.Quantity` objects, which are converted to the expected SI
unit, or bare numbers, which are taken to be SI already.
"""
__all__ = ['to_si', 'validate_quantities', 'ValidateQuantities']

import functools
import inspect
import numpy as np

from astropy import units as u
from typing import Any, Dict

from zipgrid.utils.decorators.checks import check_values, CHECK_DEFAULTS
from zipgrid.utils.exceptions import NonPositiveParameter


def to_si(value, unit: u.UnitBase, name: str = 'value'):
    """
    Strip the units from ``value`` after converting it to ``unit``.

    Parameters
    ----------
    value : `~astropy.units.Quantity`, float, or array_like
        The value to convert.  Bare numbers are assumed to already be
        expressed in ``unit``.

    unit : `~astropy.units.UnitBase`
        The SI unit the returned numbers are expressed in.

    name : str, optional
        Name used in the error message.

    Returns
    -------
    float or `~numpy.ndarray`
        A Python float for scalar input, otherwise a float array.

    Raises
    ------
    `~astropy.units.UnitTypeError`
        If ``value`` carries units that are not convertible to ``unit``.

    Examples
    --------
    >>> from astropy import units as u
    >>> to_si(1.8 * u.mH, u.H)
    0.0018
    >>> to_si([10, 20], u.ohm)
    array([10., 20.])
    """
    if isinstance(value, u.Quantity):
        try:
            value = value.to_value(unit)
        except u.UnitConversionError as ex:
            raise u.UnitTypeError(
                f"The argument '{name}' should be an astropy Quantity with units "
                f"equivalent to {unit}, got {value.unit}."
            ) from ex

    arr = np.array(value, dtype=float)
    if arr.ndim == 0:
        return float(arr)
    return arr


class ValidateQuantities:
    """
    A decorator class to convert and check the physical arguments of a
    function.

    Parameters
    ----------
    **validations : Dict[str, Any]
        One entry per checked argument.  Each entry is a dictionary with
        the key ``'units'`` (the SI unit the argument is converted to),
        optionally ``'none_shall_pass'`` and ``'error'`` (the exception
        raised on a failed value check), and any of the value checks of
        `~zipgrid.utils.decorators.checks.CHECK_DEFAULTS`.

    Examples
    --------
    .. code-block:: python

        from astropy import units as u
        from zipgrid.utils.decorators import validate_quantities

        @validate_quantities(R={'units': u.ohm, 'can_be_negative': False})
        def voltage_drop(R, current):
            return R * current

        voltage_drop(10 * u.mohm, 2.0)  # -> 0.02
    """
    def __init__(self, **validations: Dict[str, Any]):
        for arg_name, spec in validations.items():
            if 'units' not in spec:
                raise TypeError(f"Validation of argument '{arg_name}' needs 'units'.")
        self.validations = validations

    def __call__(self, f):
        self.f = f
        wrapped_sign = inspect.signature(f)

        @functools.wraps(f)
        def wrapper(*args, **kwargs):
            bound_args = wrapped_sign.bind(*args, **kwargs)
            bound_args.apply_defaults()

            for arg_name, spec in self.validations.items():
                if arg_name not in bound_args.arguments:
                    raise TypeError(
                        f"Argument '{arg_name}' is not a parameter of {f.__name__}()."
                    )
                bound_args.arguments[arg_name] = self._validate(
                    bound_args.arguments[arg_name], arg_name, spec)

            return f(*bound_args.args, **bound_args.kwargs)

        return wrapper

    def _validate(self, arg, arg_name: str, spec: Dict[str, Any]):
        if arg is None:
            if spec.get('none_shall_pass', False):
                return None
            raise TypeError(
                f"The argument '{arg_name}' to function {self.f.__name__}() "
                f"can not be None."
            )

        value = to_si(arg, spec['units'], arg_name)
        checks = {key: spec[key] for key in CHECK_DEFAULTS if key in spec}
        check_values(value, arg_name,
                     error=spec.get('error', NonPositiveParameter),
                     where=f"function {self.f.__name__}()",
                     **checks)
        return value


def validate_quantities(**validations: Dict[str, Any]):
    """
    Function form of `ValidateQuantities`.

    Examples
    --------
    >>> from astropy import units as u
    >>> @validate_quantities(R={'units': u.ohm, 'can_be_negative': False})
    ... def voltage_drop(R, current):
    ...     return R * current
    >>> voltage_drop(10 * u.mohm, 2.0)
    0.02
    """
    return ValidateQuantities(**validations)
