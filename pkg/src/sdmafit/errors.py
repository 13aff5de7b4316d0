"""Exception types raised across the package.

Everything derives from ``SdmaFitError`` so callers can catch the package's
failures with a single except clause. Input problems (bad files, shape
mismatches) and numerical failures (singular solves, overflow) are separate
branches; the CLI maps them to distinct exit codes.
"""


class SdmaFitError(Exception):
    """Base class for all errors raised by sdmafit."""


class InputError(SdmaFitError):
    """A caller-supplied file, array, or argument is invalid."""


class NumericalError(SdmaFitError):
    """A computation failed for numerical reasons."""


class MalformedRow(InputError):
    """A CSV row is non-numeric, non-finite, or has the wrong arity."""


class NonPositiveValue(InputError):
    """A value that must be strictly positive (linear-space input) is not."""


class EmptyFile(InputError):
    """The CSV contains no data rows."""


class NonFiniteSample(InputError):
    """A sampled function returned a non-finite value."""


class DimensionMismatch(InputError):
    """Array shapes are inconsistent with the model or dataset."""


class NameArityMismatch(InputError):
    """The number of variable names does not match the model dimension."""


class DegenerateData(InputError):
    """The dataset cannot support a fit (no points)."""


class MalformedModelFile(InputError):
    """A model or constraint file is missing fields or fails validation."""


class NonFiniteResidual(NumericalError):
    """The residual vector is non-finite at the solver's starting point."""


class NonFiniteGradient(NumericalError):
    """An analytic gradient came out non-finite; indicates an overflow bug."""


class LinearSolveFailure(NumericalError):
    """The damped normal equations stayed singular past the damping ceiling."""


class CoefficientOverflow(NumericalError):
    """A posynomial coefficient exp(alpha*b) left the representable range."""
