"""Exception types shared across the package."""


class DegenerateGeometryError(ValueError):
    """A receiver sits (numerically) on top of a pinching antenna."""


class ScenarioError(ValueError):
    """Invalid scenario data. ``path`` names the offending field."""

    def __init__(self, message, path=None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class SolverError(RuntimeError):
    """Numerical breakdown inside a solver (distinct from infeasibility)."""
