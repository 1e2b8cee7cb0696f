"""Colored fragments for the failure messages of the test helpers."""
__all__ = ["call_string", "mismatch_string"]

import colorama
import numpy as np

from typing import Callable

_bold = colorama.Style.BRIGHT
_cyan = colorama.Fore.CYAN
_blue = colorama.Fore.BLUE
_red = colorama.Fore.RED
_reset = colorama.Style.RESET_ALL

_func_color = f"{_cyan}{_bold}"
_result_color = f"{_blue}{_bold}"
_message_color = f"{_red}{_bold}"


def call_string(f: Callable, label: str = "", color: bool = True) -> str:
    """Return ``f.__name__`` (or ``label``) highlighted for a failure message."""
    name = label or getattr(f, '__name__', repr(f))
    if not color:
        return name
    return f"{_func_color}{name}{_message_color}"


def mismatch_string(what: str, actual, expected, error: float, rtol: float,
                    color: bool = True) -> str:
    """
    Return a failure message comparing an analytic and a numerical result.
    """
    actual = np.array2string(np.asarray(actual), precision=10)
    expected = np.array2string(np.asarray(expected), precision=10)
    if color:
        actual = f"{_result_color}{actual}{_message_color}"
        expected = f"{_result_color}{expected}{_message_color}"
        prefix, suffix = _message_color, _reset
    else:
        prefix = suffix = ""
    return (f"{prefix}{what} returned {actual}, which differs from the "
            f"reference {expected} by a relative error of {error:.3e} "
            f"(allowed: {rtol:.1e}).{suffix}")
