# Codes By Visionnn

"""
burstscale Error Types
Every failure the CLI can report maps to one of these classes; the class
decides the process exit code.

  0  success
  2  configuration (bad keys, bad values, bad split cuts, unknown mode)
  3  trace file
  4  predictor files
  5  simulation
  6  exact oracle
"""

from typing import Optional


class BurstscaleError(Exception):
    """Base class for all burstscale errors."""

    exit_code = 1


class ConfigError(BurstscaleError):
    exit_code = 2


class UnknownModeError(ConfigError):
    """Mode name not in the mode table."""


class SplitSchemeError(BurstscaleError, ValueError):
    """Cut points do not partition the chain into contiguous sub-chains."""

    exit_code = 2


class TraceFormatError(BurstscaleError, ValueError):
    exit_code = 3

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class PredictorError(BurstscaleError):
    exit_code = 4


class PredictorMismatchError(PredictorError):
    """Predictor was trained for a different chain."""


class SimulationError(BurstscaleError):
    exit_code = 5


class UnknownServerError(SimulationError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class InfeasibleMappingError(BurstscaleError):
    """No bucket-to-core assignment satisfies the rate thresholds."""

    exit_code = 6


class OracleTooLargeError(BurstscaleError, ValueError):
    exit_code = 6
