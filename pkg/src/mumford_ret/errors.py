"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes, so each class corresponds to one
failure category rather than one call site.
"""


class MumfordRetError(Exception):
    """Base class for all package errors."""


class ValidationError(MumfordRetError, ValueError):
    """Malformed input: bad permutation, missing element, wrong arity."""


class InadmissibleError(ValidationError):
    """An edge contraction that is not admissible."""


class PreconditionError(ValidationError):
    """Input is well formed but violates an operation's precondition."""


class InconsistencyError(MumfordRetError, ValueError):
    """Numerical data that cannot describe an actual cover."""


class StructuralError(MumfordRetError, ValueError):
    """A rewriting step found a configuration none of its cases handle."""


class ResourceError(MumfordRetError, RuntimeError):
    """A configured search or enumeration cap was exceeded."""
