"""Exception types shared across the package.

The CLI maps these onto process exit codes: usage errors exit 1,
`DataError` exits 2, `ConvergenceError` exits 3.
"""


class DataError(Exception):
    """Malformed or inconsistent input data (curve database, caches)."""


class ConvergenceError(Exception):
    """A numerical routine could not reach its accuracy target within budget."""


class PoleError(ValueError):
    """Evaluation requested at (or too close to) a pole of a special function."""
