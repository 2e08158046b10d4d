"""Exception types raised by the chromatiq pipeline."""


class ChromatiqError(Exception):
    """Base class for all chromatiq errors."""


# --- image decoding / representation ---

class UnsupportedFormatError(ChromatiqError):
    """Byte stream is not one of the supported raster formats (PNG, BMP, PPM)."""


class CorruptStreamError(ChromatiqError):
    """Byte stream was recognized but could not be fully decoded."""


class NonPositiveGammaError(ChromatiqError):
    """Gamma exponent must be > 0."""


class EmptyPlaneError(ChromatiqError):
    """Operation received an empty sample grid."""


# --- transforms ---

class TooManyScalesError(ChromatiqError):
    """Requested wavelet depth exceeds what the image size supports."""


class MalformedPyramidError(ChromatiqError):
    """Wavelet pyramid planes are inconsistent with each other."""


class DepthTooLargeError(ChromatiqError):
    """Requested pairing depth exceeds the plane extent along the pairing axis."""


# --- similarity / scoring ---

class UnknownChannelClassError(ChromatiqError):
    """Channel class must be 'achromatic' or 'chromatic'."""


class DimensionMismatchError(ChromatiqError):
    """Two grids that must be compared do not share dimensions."""


class KindMismatchError(ChromatiqError):
    """Feature maps of different kinds cannot be compared."""


class EmptyMapError(ChromatiqError):
    """Similarity map has no samples to pool."""


class ImageTooSmallError(ChromatiqError):
    """Input is below the minimum size the operation supports."""


class ZeroWeightMassError(ChromatiqError):
    """Weight map sums to zero; pooled score is undefined."""


class DegenerateMapError(ChromatiqError):
    """Map is constant; display normalization is undefined."""


# --- benchmark ---

class MissingColumnError(ChromatiqError):
    """Manifest CSV lacks a required column."""


class UnknownDistortionCodeError(ChromatiqError):
    """Distortion code has no category mapping for the given database."""


class LengthMismatchError(ChromatiqError):
    """Paired score vectors differ in length."""


class DegenerateInputError(ChromatiqError):
    """Rank correlation of an all-equal vector is undefined."""


class SampleTooSmallError(ChromatiqError):
    """Significance test needs at least 4 samples."""


class PerfectCorrelationError(ChromatiqError):
    """Fisher z-transform is undefined at |r| = 1."""


class EmptyCategoryError(ChromatiqError):
    """No category has enough records to correlate."""
