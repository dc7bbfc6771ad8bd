"""Exception taxonomy shared across the package."""


class LfunclabError(Exception):
    """Base class for package errors."""


class ResourceBudgetError(LfunclabError):
    """A requested computation exceeds the configured memory or size budget."""


class PrecisionError(LfunclabError):
    """A numerical routine could not meet its accuracy target."""


class NumericLossError(PrecisionError):
    """Loss of significance, e.g. evaluation height beyond the supported range."""


class ForcedZeroError(LfunclabError):
    """The functional-equation sign forces the requested central value to vanish."""


class ConditioningError(LfunclabError):
    """Eigenvalue separation too poor to certify a diagonalization."""


class CoverageError(LfunclabError):
    """Input data (coefficients, primes, zeros) does not cover the requested range."""


class RescanError(LfunclabError):
    """A zero scan kept missing sign changes after grid refinement."""


class NegativeLValueError(LfunclabError):
    """A real-axis L-value was non-positive where a logarithm was required."""


class CacheCorruptionError(LfunclabError):
    """A cache record failed revalidation."""


class ConfigError(LfunclabError):
    """Invalid experiment configuration."""
