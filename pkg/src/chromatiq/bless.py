"""Spatiochromatic grouping map (tau) and the BLeSS similarity score.

Per opponent channel the pipeline is: orientation wavelet decomposition,
pairing transform over each detail plane, center/surround contrast
normalization of each pairing detail, scale-dependent contrast-sensitivity
weighting, bicubic upsampling back to plane size, recombination over pairing
levels, pointwise reweighting of the wavelet details, and inverse wavelet
transform. The channel maps combine by Euclidean norm into tau; two tau maps
compare through the usual stabilized similarity ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter

from .errors import (
    DimensionMismatchError,
    EmptyMapError,
    UnknownChannelClassError,
)
from .image import PlanarImage, apply_gamma, resize_bicubic, to_opponent
from .pyramid import (
    ORIENTATIONS,
    WaveletLevel,
    WaveletPyramid,
    grouplet_forward,
    wavelet_forward,
    wavelet_inverse,
)

# Stabilizer for the tau similarity ratio (same value the spectral-residual
# similarity uses).
TAU_SIMILARITY_C1 = 0.4

# The scale-weighting curve never drops below this fraction of its floor
# gain, keeping every adjusted coefficient strictly positive.
CURVE_FLOOR = 1e-3


@dataclass(frozen=True)
class EcsfParams:
    """Gaussian-in-scale sensitivity curve for one channel class."""

    peak_scale: float
    spread: float
    gain: float
    floor_gain: float

    def __post_init__(self):
        if self.gain < 0:
            raise ValueError("gain must be >= 0")
        if self.floor_gain <= 0:
            raise ValueError("floor_gain must be > 0")
        if self.spread <= 0:
            raise ValueError("spread must be > 0")


@dataclass(frozen=True)
class EcsfConfig:
    """Sensitivity curves for the intensity and the two chromatic channels.

    The defaults are working approximations, not fitted psychophysical
    constants: the chromatic curve peaks one scale coarser than the
    achromatic one and both gains normalize to 1 at peak. Anyone holding
    fitted values can drop them in here.
    """

    achromatic: EcsfParams = EcsfParams(
        peak_scale=2.0, spread=2.0, gain=1.0, floor_gain=0.5
    )
    chromatic: EcsfParams = EcsfParams(
        peak_scale=3.0, spread=2.0, gain=1.0, floor_gain=0.5
    )

    def params(self, channel_class: str) -> EcsfParams:
        if channel_class == "achromatic":
            return self.achromatic
        if channel_class == "chromatic":
            return self.chromatic
        raise UnknownChannelClassError(
            f"channel class must be achromatic or chromatic, got {channel_class!r}"
        )


def surround_window_side(scale: int, factor: float = 3.0) -> int:
    return 2 * math.ceil(factor * 2 ** (scale - 1)) + 1


def windowed_rms(plane: np.ndarray, scale: int, factor: float = 3.0) -> np.ndarray:
    """RMS over a scale-proportional square window, excluding the center."""
    side = surround_window_side(scale, factor)
    sq = plane * plane
    total = uniform_filter(sq, size=side, mode="reflect") * float(side * side)
    surround = np.maximum(total - sq, 0.0) / float(side * side - 1)
    return np.sqrt(surround)


def center_surround_ratio(center: np.ndarray, surround: np.ndarray) -> np.ndarray:
    """z = c^2 / (c^2 + u^2), with 0/0 resolved to 0 (no contrast, no response)."""
    c2 = center * center
    denom = c2 + surround * surround
    return np.divide(c2, denom, out=np.zeros_like(c2), where=denom > 0)


def surround_contrast(
    detail: np.ndarray, scale: int, window_factor: float = 3.0
) -> np.ndarray:
    """Divisive normalization of each coefficient against its surround."""
    detail = np.asarray(detail, dtype=np.float64)
    return center_surround_ratio(detail, windowed_rms(detail, scale, window_factor))


def ecsf_adjust(
    z: np.ndarray, scale: int, channel_class: str, cfg: EcsfConfig
) -> np.ndarray:
    """Affine scale weighting of normalized contrast: z*g(s) + k(s), k > 0."""
    p = cfg.params(channel_class)
    shape = math.exp(-((scale - p.peak_scale) ** 2) / (2.0 * p.spread**2))
    gain = p.gain * shape
    floor = p.floor_gain * max(shape, CURVE_FLOOR)
    return z * gain + floor


def default_scales(height: int, width: int) -> int:
    """Largest dyadic depth with 2**S <= min(H, W)/8, clamped to [3, 7]."""
    s = int(math.floor(math.log2(max(min(height, width) / 8.0, 1.0))))
    return min(max(s, 3), 7)


def default_grouplet_depth(rows: int) -> int:
    """Largest depth with 2**J <= pairing-axis extent, clamped to [1, 5]."""
    j = int(math.floor(math.log2(max(rows, 2))))
    return min(max(j, 1), 5)


def compute_tau(img: PlanarImage, config=None) -> np.ndarray:
    """Build the combined spatiochromatic grouping map of an RGB image.

    Returns a non-negative float64 grid at the image's resolution. Identical
    inputs and configuration produce bit-identical maps.
    """
    from .config import PipelineConfig

    cfg = config or PipelineConfig()
    opponent = to_opponent(apply_gamma(img, cfg.gamma))
    height, width = opponent.planes[0].shape
    scales = cfg.scales or default_scales(height, width)
    depth = cfg.grouplet_depth or default_grouplet_depth(height)

    tau_sq = np.zeros((height, width))
    for index, channel in enumerate(opponent.planes):
        channel_class = "achromatic" if index == 2 else "chromatic"
        pyr = wavelet_forward(channel, scales)
        weighted = []
        for s, level in enumerate(pyr.levels, start=1):
            planes = {}
            for o in ORIENTATIONS:
                wavelet_plane = level.plane(o)
                stack = grouplet_forward(wavelet_plane, depth)
                alpha = np.zeros((height, width))
                for glevel in stack.levels:
                    z = surround_contrast(glevel.detail, s, cfg.surround_window_factor)
                    adjusted = ecsf_adjust(z, s, channel_class, cfg.ecsf)
                    alpha += resize_bicubic(adjusted, width, height)
                if cfg.grouplet_combine == "mean":
                    alpha /= depth
                planes[o] = wavelet_plane * alpha
            weighted.append(WaveletLevel(**planes))
        # residual passes unweighted: induction modulates detail, not DC
        tau_i = wavelet_inverse(WaveletPyramid(tuple(weighted), pyr.residual))
        tau_sq += tau_i * tau_i
    return np.sqrt(tau_sq)


def bless_map(
    tau_ref: np.ndarray, tau_dist: np.ndarray, c1: float = TAU_SIMILARITY_C1
) -> np.ndarray:
    """Per-pixel similarity of two tau maps, in (0, 1]."""
    if tau_ref.shape != tau_dist.shape:
        raise DimensionMismatchError(
            f"tau maps differ in shape: {tau_ref.shape} vs {tau_dist.shape}"
        )
    if not c1 > 0:
        raise ValueError("stabilizer c1 must be positive")
    return (2.0 * tau_ref * tau_dist + c1) / (tau_ref**2 + tau_dist**2 + c1)


def bless_score(similarity: np.ndarray) -> float:
    """Mean-pool a similarity map into a scalar score."""
    if similarity.size == 0:
        raise EmptyMapError("cannot pool an empty map")
    return float(np.mean(similarity))
