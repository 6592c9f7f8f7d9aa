"""Exception types shared across the package."""


class ColorCSError(Exception):
    """Base class for package errors."""


class PoleError(ColorCSError, ZeroDivisionError):
    """Evaluation point lies on the vanishing locus of a denominator."""


class ContextMismatchError(ColorCSError, ValueError):
    """Operands were built over different field or grading contexts."""


class MixedParityError(ColorCSError, ValueError):
    """A graded bracket needs homogeneous operands; these mix parities."""


class CapExceededError(ColorCSError, RuntimeError):
    """An intermediate object grew past the configured term budget."""


class UnknownNameError(ColorCSError, KeyError):
    """No builder or case is registered under the requested name."""
