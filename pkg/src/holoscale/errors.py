"""Exception types raised across the package."""


class HoloscaleError(Exception):
    """Base class for all package-specific errors."""


class InvalidGeometry(HoloscaleError):
    """A physical parameter is out of range (non-positive pitch, zero
    distance, focal point behind the hologram, bad grid size)."""


class DegeneratePlan(InvalidGeometry):
    """The band-limited kernel keeps fewer than one tap per side; the
    requested geometry cannot be propagated on this grid."""


class PlanMismatch(HoloscaleError):
    """A field's grid, pitch, or wavelength disagrees with the plan it is
    being propagated through."""


class ShapeMismatch(HoloscaleError):
    """Two arrays that must share a shape do not."""


class ImageTooSmall(HoloscaleError):
    """An image is smaller than the analysis window it must contain."""


class OracleTooLarge(HoloscaleError):
    """The direct-summation reference was asked to run on a grid large
    enough to take minutes; pass allow_large=True to force it."""


class IoFailure(HoloscaleError):
    """An underlying file operation failed."""


class BadMagic(IoFailure):
    """A field file does not start with the expected signature."""


class UnsupportedVersion(IoFailure):
    """A field file declares a format version this reader does not know."""


class TruncatedPayload(IoFailure):
    """A field file's payload does not match the size its header declares."""


class MissingSidecar(IoFailure):
    """A hologram image has no metadata record next to it."""


class UnsupportedFormat(IoFailure):
    """An input image uses a color mode or file type the loader does not
    accept."""


class ManifestError(IoFailure):
    """A golden manifest is malformed or references missing files."""
