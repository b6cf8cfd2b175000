"""Exception hierarchy shared by every module."""


class LeafbenchError(Exception):
    """Base class for all errors raised by leafbench."""


class IoError(LeafbenchError, OSError):
    """A file could not be read or written."""


class DecodeError(LeafbenchError):
    """Image bytes are corrupt or in an unsupported format."""


class InvalidDimension(LeafbenchError, ValueError):
    pass


class WrongColorSpace(LeafbenchError, ValueError):
    pass


class KernelTooLarge(LeafbenchError, ValueError):
    pass


class InvalidSigma(LeafbenchError, ValueError):
    pass


class InvalidWindow(LeafbenchError, ValueError):
    pass


class InvalidStrength(LeafbenchError, ValueError):
    pass


class GridTooFine(LeafbenchError, ValueError):
    pass


class ShapeMismatch(LeafbenchError, ValueError):
    pass


class ImageTooSmall(LeafbenchError, ValueError):
    pass


class ZeroReference(LeafbenchError, ValueError):
    pass


class EmptyImageList(LeafbenchError, ValueError):
    pass


class IncompleteBlock(LeafbenchError, ValueError):
    pass


class ConfigError(LeafbenchError, ValueError):
    """Run configuration is missing a field or holds an invalid value."""


class StageError(LeafbenchError):
    """A pipeline stage failed; ``stage`` names which one."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")
