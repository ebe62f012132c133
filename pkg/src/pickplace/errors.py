"""Exception types raised across the package."""


class PickPlaceError(Exception):
    """Base class for all package errors."""


class ParseError(PickPlaceError):
    """Mesh file could not be parsed. Message cites line or byte offset."""


class DegenerateMesh(PickPlaceError):
    """Mesh has no usable (non zero-area) triangles."""


class NotWatertight(PickPlaceError):
    """Operation requires a watertight mesh."""


class NoGraspsFound(PickPlaceError):
    """Grasp sampling produced an empty set."""


class EmptyContact(PickPlaceError):
    """Object does not face the tactile sensor window; the grasp is invalid."""


class EmptyLibrary(PickPlaceError):
    """Grasp library has no descriptors for the requested modality."""


class DegenerateFusion(PickPlaceError):
    """Product of distributions sums to zero (contradictory observations)."""


class NoCandidates(PickPlaceError):
    """Scene depth image yields no collision-free grasp candidates."""


class UnknownGraspId(PickPlaceError):
    """Requested grasp id is not in the library."""


class CacheInvalid(PickPlaceError):
    """On-disk cache is corrupt or does not match the producing config."""
