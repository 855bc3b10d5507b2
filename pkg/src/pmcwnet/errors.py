"""Exception types raised by the library.

Each condition a caller may want to handle separately gets its own class, so
the CLI can map failures to distinct exit codes and tests can assert on the
exact failure mode instead of matching message strings.
"""


class PmcwError(Exception):
    """Base class for all library errors."""


class OddLengthError(PmcwError):
    """Sequence length must be even for this operation."""


class IndivisibleCodeError(PmcwError):
    """Code length is not divisible by twice the number of radars."""


class SearchTooLargeError(PmcwError):
    """Exhaustive sequence search requested beyond the supported length."""


class BadDurationError(PmcwError):
    """Phase-noise synthesis duration must be positive."""


class BadBandError(PmcwError):
    """Phase-noise synthesis band does not contain a single spectral line."""


class TooFewSamplesError(PmcwError):
    """Not enough samples for the requested spectral estimate."""


class ZeroRangeError(PmcwError):
    """Link-budget ranges must be strictly positive."""


class PnDurationTooShortError(PmcwError):
    """A phase-noise process does not cover the frame being synthesized."""


class LengthMismatchError(PmcwError):
    """Array lengths are inconsistent with the frame or matrix geometry."""


class WindowedMapError(PmcwError):
    """Inverse Doppler transform requested on a windowed map."""


class OverExcludedError(PmcwError):
    """Noise-floor exclusions removed too many cells for a robust estimate."""


class BadBinError(PmcwError):
    """Range or Doppler bin index outside the matrix."""


class EmptySectionError(PmcwError):
    """A range-bin section contains no bins."""


class LOSNotFoundError(PmcwError):
    """No line-of-sight peak detected in the expected section."""


class ConfigError(PmcwError):
    """Experiment configuration file is malformed or inconsistent."""


class IoError(PmcwError):
    """A file could not be read or written in the expected format."""
