"""
Value checks for physical parameters, usable directly or through
`~zipgrid.utils.decorators.validate_quantities`.
"""
__all__ = ['check_values', 'CHECK_DEFAULTS']

import numpy as np

from zipgrid.utils.exceptions import NonPositiveParameter

#: Default values for the possible 'check' keys.
# To add a new check:
#   1. add a key & default value to `CHECK_DEFAULTS`
#   2. add the corresponding test to `check_values`
CHECK_DEFAULTS = {
    'can_be_negative': True,
    'can_be_zero': True,
    'can_be_inf': True,
    'can_be_nan': True,
}


def check_values(value, name: str, *, error=NonPositiveParameter, where: str = '',
                 **checks):
    """
    Check that ``value`` satisfies the requested value ``checks``.

    Parameters
    ----------
    value : float or array_like
        The value to be checked, already converted to plain numbers.

    name : str
        Name of the checked quantity, used in the error message.

    error : type, optional
        Exception class raised when a check fails.  Defaults to
        `~zipgrid.utils.exceptions.NonPositiveParameter`.

    where : str, optional
        Context appended to the error message, e.g. the function name.

    **checks : bool
        Any of the keys of `CHECK_DEFAULTS`.  Omitted keys take the
        default value.

    Returns
    -------
    value
        ``value`` unchanged, to allow chaining.

    Raises
    ------
    `~zipgrid.utils.exceptions.NonPositiveParameter`
        (or ``error``) if a check fails.

    Examples
    --------
    >>> check_values(0.5, 'R_s', can_be_negative=False, can_be_zero=False)
    0.5
    >>> check_values(0.0, 'R_s', can_be_zero=False)
    Traceback (most recent call last):
      ...
    zipgrid.utils.exceptions.NonPositiveParameter: The argument 'R_s' can not contain zeros.
    """
    unknown = set(checks) - set(CHECK_DEFAULTS)
    if unknown:
        raise TypeError(f"Unknown value checks {sorted(unknown)}.")

    arg_checks = {**CHECK_DEFAULTS, **checks}
    msg = f"The argument '{name}' "
    if where:
        msg += f"to {where} "
    msg += "can not contain"

    arr = np.asarray(value, dtype=float)
    if not arg_checks['can_be_nan'] and np.any(np.isnan(arr)):
        raise error(f"{msg} NaNs.")
    if not arg_checks['can_be_inf'] and np.any(np.isinf(arr)):
        raise error(f"{msg} infs.")

    # NaNs are let through the sign checks
    with np.errstate(invalid='ignore'):
        if not arg_checks['can_be_negative'] and np.any(arr < 0):
            raise error(f"{msg} negative numbers.")
        if not arg_checks['can_be_zero'] and np.any(arr == 0):
            raise error(f"{msg} zeros.")

    return value
