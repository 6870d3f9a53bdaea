"""Exception hierarchy shared across the package."""


class Pose6DError(Exception):
    """Base class for all pose6d errors."""


class InvalidRotation(Pose6DError):
    pass


class InvalidClass(Pose6DError):
    pass


class InvalidCost(Pose6DError):
    pass


class CardinalityMismatch(Pose6DError):
    pass


class EmptyPointSet(Pose6DError):
    pass


class NoValidPixels(Pose6DError):
    pass


class OutOfBounds(Pose6DError):
    pass


class NoDepth(Pose6DError):
    pass


class InvalidDepth(Pose6DError):
    pass


class TooSmall(Pose6DError):
    pass


class EmptyInput(Pose6DError):
    pass


class PlacementFailed(Pose6DError):
    pass


class ParseError(Pose6DError):
    """Malformed file content. Message carries line/field context."""


class DanglingReference(Pose6DError):
    """A file record references another file that does not exist."""


class ConfigError(Pose6DError):
    pass
