"""Adds custom functionality to pytest."""
collect_ignore = []

# Force MPL to use non-gui backends for testing.
try:
    import matplotlib
except ImportError:
    collect_ignore.append('io/plotting.py')
else:
    matplotlib.use('Agg')


# coverage : ignore
def pytest_configure(config):
    """Adds @pytest.mark.slow for scenario-length simulations."""
    config.addinivalue_line(
        "markers",
        ("slow: mark test as slow to run. Used for tests that integrate whole scenarios. "
         "Tests marked slow may be skipped with 'pytest -m \"not slow\"' or exclusively "
         "executed with 'pytest -m slow'.")
    )
