"""Exception hierarchy shared across the engine.

Three broad classes matter to callers (and map onto the CLI exit codes):
configuration problems (bad expressions, bad schemas), mathematical domain
violations (degree caps, non-invertible elements, zero traces), and internal
consistency failures (two independent code paths disagreeing, which always
indicates a bug rather than bad input).
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(EngineError):
    """Operands live over different ground sets / tuple lengths."""


class MathDomainError(EngineError):
    """Input is outside the mathematical domain of the operation."""


class DegreeCapExceeded(MathDomainError):
    """A requested degree exceeds the configured cap."""


class NonInvertible(MathDomainError):
    """Convolution inverse requested for an element with first entry 0."""


class ZeroTrace(MathDomainError):
    """Compression requested with alpha0 = 0."""


class NotEven(MathDomainError):
    """An even-only operation was applied to a non-even variable."""


class CrossingPartition(MathDomainError):
    """An interleaved union of partitions has a crossing."""


class OddLength(MathDomainError):
    """An even-length-only operation received an odd length."""


class PreconditionError(MathDomainError):
    """A documented structural precondition does not hold."""


class ConfigError(EngineError):
    """A configuration file is missing, malformed, or inconsistent."""


class InternalConsistencyError(EngineError):
    """Two independently computed results disagree; indicates a bug."""
