"""Planar image representation, codecs, color transforms and resampling.

Everything downstream works on stacks of 2-D float64 planes. Decoded RGB
samples live in [0, 1]; the opponent transform and YIQ transform operate on
those planes and tag the result with the new color space.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from PIL import Image as PILImage, UnidentifiedImageError

from .errors import (
    CorruptStreamError,
    EmptyPlaneError,
    NonPositiveGammaError,
    UnsupportedFormatError,
)

# Threshold under which a pixel is treated as black (achromatic) in the
# opponent transform, so I1/I2 never divide by ~0.
BLACK_EPS = 1e-12

# NTSC RGB -> YIQ matrix, as used by the classic feature-similarity metrics.
# Frozen in a golden test; do not retune.
YIQ_FROM_RGB = np.array([
    [0.299, 0.587, 0.114],
    [0.596, -0.274, -0.322],
    [0.211, -0.523, 0.312],
])

_SUPPORTED_DECODE = {"PNG", "BMP", "PPM"}


class ColorSpace(Enum):
    RGB_SRGB = "rgb-srgb"
    RGB_LINEAR = "rgb-linear"
    OPPONENT = "opponent"
    YIQ = "yiq"
    GRAY = "gray"


_PLANE_COUNT = {
    ColorSpace.RGB_SRGB: 3,
    ColorSpace.RGB_LINEAR: 3,
    ColorSpace.OPPONENT: 3,
    ColorSpace.YIQ: 3,
    ColorSpace.GRAY: 1,
}


@dataclass(frozen=True)
class PlanarImage:
    """Immutable stack of equally sized 2-D sample planes.

    ``downsample_factor`` records the decimation applied by
    :func:`downsample_for_metric` (1 when untouched).
    """

    planes: tuple[np.ndarray, ...]
    space: ColorSpace
    downsample_factor: int = field(default=1)

    def __post_init__(self):
        if len(self.planes) != _PLANE_COUNT[self.space]:
            raise ValueError(
                f"{self.space.value} image needs {_PLANE_COUNT[self.space]} "
                f"planes, got {len(self.planes)}"
            )
        frozen = []
        shape = self.planes[0].shape
        for p in self.planes:
            if p.ndim != 2 or p.shape != shape:
                raise ValueError("all planes must be 2-D and equally sized")
            arr = np.asarray(p, dtype=np.float64)
            if arr is p and arr.flags.writeable:
                arr = arr.copy()
            arr.flags.writeable = False
            frozen.append(arr)
        object.__setattr__(self, "planes", tuple(frozen))

    @property
    def height(self) -> int:
        return self.planes[0].shape[0]

    @property
    def width(self) -> int:
        return self.planes[0].shape[1]


def decode_image(data: bytes) -> PlanarImage:
    """Decode PNG/BMP/PPM bytes into an RGB-sRGB (or gray) image in [0, 1].

    Raises UnsupportedFormatError for unrecognized or unsupported formats and
    CorruptStreamError for recognized but unreadable streams.
    """
    try:
        pil = PILImage.open(io.BytesIO(data))
    except UnidentifiedImageError as exc:
        raise UnsupportedFormatError("unrecognized image container") from exc
    fmt = pil.format or ""
    if fmt not in _SUPPORTED_DECODE:
        raise UnsupportedFormatError(f"format {fmt or '<unknown>'} not supported")
    try:
        pil.load()
    except OSError as exc:
        raise CorruptStreamError(f"truncated or corrupt {fmt} stream") from exc

    if pil.mode in ("I;16", "I"):
        arr = np.asarray(pil, dtype=np.float64) / 65535.0
        return PlanarImage((arr,), ColorSpace.GRAY)
    if pil.mode == "L":
        arr = np.asarray(pil, dtype=np.float64) / 255.0
        return PlanarImage((arr,), ColorSpace.GRAY)
    if pil.mode != "RGB":
        pil = pil.convert("RGB")
    arr = np.asarray(pil, dtype=np.float64) / 255.0
    return PlanarImage(
        (arr[:, :, 0], arr[:, :, 1], arr[:, :, 2]), ColorSpace.RGB_SRGB
    )


def load_image(path) -> PlanarImage:
    with open(path, "rb") as fh:
        return decode_image(fh.read())


def encode_png(img: PlanarImage) -> bytes:
    """Encode to 8-bit PNG (gray or RGB), clipping samples into [0, 1]."""
    stack = np.stack(img.planes, axis=-1)
    u8 = np.clip(np.rint(stack * 255.0), 0, 255).astype(np.uint8)
    if u8.shape[-1] == 1:
        pil = PILImage.fromarray(u8[:, :, 0], mode="L")
    else:
        pil = PILImage.fromarray(u8, mode="RGB")
    buf = io.BytesIO()
    pil.save(buf, format="PNG")
    return buf.getvalue()


def save_png(img: PlanarImage, path) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_png(img))


def write_pgm(plane: np.ndarray, path, maxval: int = 65535) -> None:
    """Write one plane as binary PGM, max-normalized onto [0, maxval].

    Used for debug dumps of feature/weight/tau maps. A constant-zero plane
    writes as all zeros.
    """
    if plane.size == 0:
        raise EmptyPlaneError("cannot write an empty plane")
    top = float(np.max(plane))
    scaled = plane / top * maxval if top > 0 else np.zeros_like(plane)
    q = np.clip(np.rint(scaled), 0, maxval)
    data = (
        q.astype(">u2").tobytes() if maxval > 255 else q.astype(np.uint8).tobytes()
    )
    header = f"P5\n{plane.shape[1]} {plane.shape[0]}\n{maxval}\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header + data)


def apply_gamma(img: PlanarImage, gamma: float) -> PlanarImage:
    """Exponentiate every sample by ``gamma`` (display linearization)."""
    if not gamma > 0:
        raise NonPositiveGammaError(f"gamma must be positive, got {gamma}")
    planes = tuple(np.power(p, gamma) for p in img.planes)
    return PlanarImage(planes, ColorSpace.RGB_LINEAR, img.downsample_factor)


def to_opponent(img: PlanarImage) -> PlanarImage:
    """RGB -> opponent channels.

    I1 = (R-G)/(R+G+B), I2 = (R+G-2B)/(R+G+B), I3 = R+G+B. Pixels whose
    channel sum is below BLACK_EPS are treated as achromatic black
    (I1 = I2 = I3 = 0).
    """
    r, g, b = img.planes
    total = r + g + b
    dark = total < BLACK_EPS
    safe = np.where(dark, 1.0, total)
    i1 = np.where(dark, 0.0, (r - g) / safe)
    i2 = np.where(dark, 0.0, (r + g - 2.0 * b) / safe)
    i3 = np.where(dark, 0.0, total)
    return PlanarImage((i1, i2, i3), ColorSpace.OPPONENT, img.downsample_factor)


def opponent_to_rgb(img: PlanarImage) -> PlanarImage:
    """Invert :func:`to_opponent` (exact wherever I3 > 0)."""
    i1, i2, i3 = img.planes
    # R-G = I1*I3, R+G-2B = I2*I3, R+G+B = I3  =>  solve the linear system
    b = (i3 - i2 * i3) / 3.0
    rg_sum = i3 - b
    r = (rg_sum + i1 * i3) / 2.0
    g = rg_sum - r
    return PlanarImage((r, g, b), ColorSpace.RGB_LINEAR, img.downsample_factor)


def to_yiq(img: PlanarImage) -> PlanarImage:
    r, g, b = img.planes
    m = YIQ_FROM_RGB
    y = m[0, 0] * r + m[0, 1] * g + m[0, 2] * b
    i = m[1, 0] * r + m[1, 1] * g + m[1, 2] * b
    q = m[2, 0] * r + m[2, 1] * g + m[2, 2] * b
    return PlanarImage((y, i, q), ColorSpace.YIQ, img.downsample_factor)


def yiq_to_rgb(img: PlanarImage) -> PlanarImage:
    """Invert the NTSC transform (used to synthesize fixed-luma test pairs)."""
    inv = np.linalg.inv(YIQ_FROM_RGB)
    y, i, q = img.planes
    r = inv[0, 0] * y + inv[0, 1] * i + inv[0, 2] * q
    g = inv[1, 0] * y + inv[1, 1] * i + inv[1, 2] * q
    b = inv[2, 0] * y + inv[2, 1] * i + inv[2, 2] * q
    return PlanarImage((r, g, b), ColorSpace.RGB_SRGB, img.downsample_factor)


# --- bicubic resampling (Keys kernel, a = -0.5, half-pixel centers) ---

def _cubic_weights(t: np.ndarray) -> np.ndarray:
    """Keys cubic convolution kernel evaluated at |t| (a = -0.5)."""
    a = -0.5
    t = np.abs(t)
    w = np.zeros_like(t)
    near = t <= 1.0
    far = (t > 1.0) & (t < 2.0)
    tn = t[near]
    tf = t[far]
    w[near] = (a + 2.0) * tn**3 - (a + 3.0) * tn**2 + 1.0
    w[far] = a * tf**3 - 5.0 * a * tf**2 + 8.0 * a * tf - 4.0 * a
    return w


def _resize_axis0(plane: np.ndarray, out_len: int) -> np.ndarray:
    n = plane.shape[0]
    if out_len == n:
        return plane.copy()
    scale = n / out_len
    centers = (np.arange(out_len) + 0.5) * scale - 0.5
    base = np.floor(centers).astype(int)
    taps = base[:, None] + np.arange(-1, 3)[None, :]
    weights = _cubic_weights(centers[:, None] - taps)
    taps = np.clip(taps, 0, n - 1)
    gathered = plane[taps]  # (out_len, 4, width)
    return np.einsum("ot,otw->ow", weights, gathered)


def resize_bicubic(plane: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    """Separable bicubic resize with edge replication.

    Reproduces constants to rounding and is an exact identity when the size
    is unchanged.
    """
    if plane.size == 0:
        raise EmptyPlaneError("cannot resize an empty plane")
    if out_w < 1 or out_h < 1:
        raise EmptyPlaneError("output size must be at least 1x1")
    plane = np.asarray(plane, dtype=np.float64)
    out = _resize_axis0(plane, out_h)
    out = _resize_axis0(out.T, out_w).T
    return out


def _box2x2(plane: np.ndarray) -> np.ndarray:
    padded = np.pad(plane, ((0, 1), (0, 1)), mode="edge")
    return (
        padded[:-1, :-1] + padded[1:, :-1] + padded[:-1, 1:] + padded[1:, 1:]
    ) / 4.0


def metric_downsample_factor(height: int, width: int) -> int:
    # round() would bankers-round 2.5 -> 2; half-away-from-zero matches the
    # convention of the published metric implementations.
    return max(1, int(math.floor(min(height, width) / 256 + 0.5)))


def downsample_for_metric(img: PlanarImage) -> PlanarImage:
    """Box-filter (2x2) and decimate so the short side is near 256 px."""
    f = metric_downsample_factor(img.height, img.width)
    if f == 1:
        return img
    planes = tuple(_box2x2(p)[::f, ::f] for p in img.planes)
    return PlanarImage(planes, img.space, img.downsample_factor * f)
