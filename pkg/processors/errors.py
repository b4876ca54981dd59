"""
Typed failures raised by the processors.

Every error derives from WgmScatterError so the cli can map the whole
family onto exit codes in one place.
"""

from typing import Optional


class WgmScatterError(Exception):
    """Base class for all wgm-scatter failures"""

    exit_code = 3


class DegenerateDenominator(WgmScatterError):
    """The shared denominator of the closed forms vanished"""

    def __init__(self, delta: float, magnitude: float, index: int = 0):
        self.delta = delta
        self.magnitude = magnitude
        self.index = index
        super().__init__(
            f"Degenerate denominator at delta={delta!r} GHz (|denom|={magnitude:.3e})"
        )


class SingularSystem(WgmScatterError):
    """The 12x12 oracle system has no usable pivot"""

    def __init__(self, column: int, pivot: float):
        self.column = column
        self.pivot = pivot
        super().__init__(f"Singular oracle system: pivot {pivot:.3e} in column {column}")


class NonpositiveVelocity(WgmScatterError):
    exit_code = 2


class EmptySpectrum(WgmScatterError):
    exit_code = 2


class SweepPointError(WgmScatterError):
    """A grid point failed; carries the flat index of the point"""

    def __init__(self, index: int, value, cause: Exception):
        self.index = index
        self.value = value
        self.cause = cause
        super().__init__(f"Sweep failed at grid index {index} (value={value!r}): {cause}")


class ConfigError(WgmScatterError):
    exit_code = 2

    def __init__(self, message: str, key: Optional[str] = None):
        self.key = key
        super().__init__(message)


class CsvSchemaError(WgmScatterError):
    exit_code = 2
