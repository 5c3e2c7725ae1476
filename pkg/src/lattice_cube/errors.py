"""Exception types raised across the package."""


class LatticeCubeError(Exception):
    """Base class for all package errors."""


class LevelOutOfRangeError(LatticeCubeError, ValueError):
    pass


class LatticeExhaustedError(LatticeCubeError, IndexError):
    """Requested a node beyond ``b**max_level``."""


class VectorFormatError(LatticeCubeError, ValueError):
    """Generating-vector file could not be parsed or failed validation."""


class MalformedBufferError(LatticeCubeError, ValueError):
    pass


class MergeLevelError(LatticeCubeError, ValueError):
    pass


class PrematureCheckError(LatticeCubeError, ValueError):
    """Error bound requested below the first admissible level ``ell_star + r``."""


class CapacityError(LatticeCubeError, ValueError):
    """A computation was refused because its size exceeds a guard."""


class BoxTooSmallError(LatticeCubeError, RuntimeError):
    pass
