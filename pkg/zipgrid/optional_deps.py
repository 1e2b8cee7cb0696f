"""Errors raised when an optional dependency of zipgrid is missing."""
__all__ = ['mpl_import_error']


def missing_dependency_error(library: str, extra: str, url: str) -> ImportError:
    """
    The `ImportError` raised in place of a missing optional package.

    Parameters
    ----------
    library : str
        Import name of the package.

    extra : str
        The zipgrid extra that installs it.

    url : str
        Install instructions of the package.
    """
    return ImportError(
        f"{library} is needed for this part of zipgrid but could not be imported.  "
        f"Install it with 'pip install zipgrid[{extra}]' or see {url}")


mpl_import_error = missing_dependency_error(
    'matplotlib', 'plotting', "https://matplotlib.org/stable/users/installing/index.html")
