"""Exception hierarchy shared by all modules.

Input problems (bad documents, invalid declarations) and numerical
failures (singular solves, pole windows, non-convergence) are kept
separate so the command line can map them to distinct exit codes.
"""


class QgspecError(Exception):
    """Base class for all library errors."""


class InputError(QgspecError):
    """Invalid user input: documents, declarations, flag values."""


class GraphFormatError(InputError):
    """Malformed graph description document."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(InputError):
    """Structurally valid input violating a model invariant."""


class NumericalError(QgspecError):
    """Numerical failure: singular solve, non-convergence, lost invariant."""


class PoleWindowError(NumericalError):
    """Spectral parameter too close to the decoupled Dirichlet spectrum."""

    def __init__(self, z, edge_ids):
        self.z = z
        self.edge_ids = tuple(edge_ids)
        ids = ", ".join(str(e) for e in self.edge_ids)
        super().__init__(
            f"z = {z} lies in the pole window of edge(s) {ids}; "
            "treat as exceptional candidate"
        )


class NotAnEigenvalueError(NumericalError):
    """Requested eigenspace is empty at the working tolerance."""
