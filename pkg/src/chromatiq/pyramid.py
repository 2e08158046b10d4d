"""Undecimated orientation-selective wavelet pyramid and pairing transform.

The forward decomposition splits each scale into horizontal / vertical /
diagonal detail planes plus a residual approximation, all at full image
resolution, using a dilated B3-spline smoothing kernel with symmetric border
extension. The split is constructed so that the residual plus all detail
planes sum back to the input, which makes the inverse transform exact to
floating-point rounding.

The pairing transform (grouplet) runs a Haar-like recursion down the first
axis of a plane: consecutive rows are averaged into the next approximation
while their normalized difference becomes the detail at that level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DepthTooLargeError, MalformedPyramidError, TooManyScalesError

# B3-spline taps; all exactly representable in binary, so smoothing a
# constant plane reproduces it bit-for-bit.
_TAPS = (1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0)

ORIENTATIONS = ("h", "v", "d")


@dataclass(frozen=True)
class WaveletLevel:
    """Detail planes of one scale: h responds to variation along x
    (vertical edges), v to variation along y, d to both."""

    h: np.ndarray
    v: np.ndarray
    d: np.ndarray

    def plane(self, orientation: str) -> np.ndarray:
        return getattr(self, orientation)


@dataclass(frozen=True)
class WaveletPyramid:
    levels: tuple[WaveletLevel, ...]
    residual: np.ndarray

    @property
    def scales(self) -> int:
        return len(self.levels)

    @property
    def shape(self):
        return self.residual.shape


def _smooth_axis0(plane: np.ndarray, step: int) -> np.ndarray:
    n = plane.shape[0]
    pad = np.pad(plane, ((2 * step, 2 * step), (0, 0)), mode="symmetric")
    return (
        _TAPS[0] * pad[0:n]
        + _TAPS[1] * pad[step : step + n]
        + _TAPS[2] * pad[2 * step : 2 * step + n]
        + _TAPS[3] * pad[3 * step : 3 * step + n]
        + _TAPS[4] * pad[4 * step : 4 * step + n]
    )


def _smooth_axis1(plane: np.ndarray, step: int) -> np.ndarray:
    return _smooth_axis0(plane.T, step).T


def wavelet_forward(plane: np.ndarray, scales: int) -> WaveletPyramid:
    """Decompose a plane into h/v/d detail planes per scale plus a residual.

    Raises TooManyScalesError when the image cannot support ``scales``
    dyadic dilation steps (min dimension < 2**scales).
    """
    plane = np.asarray(plane, dtype=np.float64)
    if scales < 1:
        raise TooManyScalesError("need at least one scale")
    if min(plane.shape) < 2**scales:
        raise TooManyScalesError(
            f"{scales} scales need a min dimension of {2**scales}, "
            f"plane is {plane.shape[0]}x{plane.shape[1]}"
        )
    levels = []
    approx = plane
    for s in range(1, scales + 1):
        step = 2 ** (s - 1)
        sx = _smooth_axis1(approx, step)
        sy = _smooth_axis0(approx, step)
        sxy = _smooth_axis0(sx, step)
        levels.append(
            WaveletLevel(h=sy - sxy, v=sx - sxy, d=approx - sx - sy + sxy)
        )
        approx = sxy
    return WaveletPyramid(tuple(levels), approx)


def wavelet_inverse(pyr: WaveletPyramid) -> np.ndarray:
    """Sum residual and detail planes back into the source plane."""
    shape = pyr.residual.shape
    out = pyr.residual.copy()
    if not pyr.levels:
        raise MalformedPyramidError("pyramid has no detail levels")
    for level in pyr.levels:
        for o in ORIENTATIONS:
            detail = level.plane(o)
            if detail.shape != shape:
                raise MalformedPyramidError(
                    f"detail plane {detail.shape} does not match residual {shape}"
                )
            out += detail
    return out


@dataclass(frozen=True)
class GroupletLevel:
    """One pairing step: ``approx`` halves the previous extent along axis 0,
    ``detail`` holds the paired difference scaled by 1/2**level."""

    approx: np.ndarray
    detail: np.ndarray


@dataclass(frozen=True)
class GroupletStack:
    initial: np.ndarray
    levels: tuple[GroupletLevel, ...]

    @property
    def depth(self) -> int:
        return len(self.levels)


def _pair_once(approx: np.ndarray, level: int) -> GroupletLevel:
    n = approx.shape[0]
    if n % 2:
        # odd extent: the trailing row pairs with its own mirror image
        approx = np.concatenate([approx, approx[-1:]], axis=0)
    even = approx[0::2]
    odd = approx[1::2]
    return GroupletLevel(
        approx=(even + odd) / 2.0, detail=(odd - even) / float(2**level)
    )


def grouplet_forward(plane: np.ndarray, depth: int) -> GroupletStack:
    """Run ``depth`` pairing steps down axis 0 of a plane.

    Level j (1-based) averages 2**j consecutive source rows into each
    approximation row; its detail divides the paired difference by 2**j.
    """
    plane = np.asarray(plane, dtype=np.float64)
    if depth < 1:
        raise DepthTooLargeError("depth must be at least 1")
    if plane.shape[0] < 2**depth:
        raise DepthTooLargeError(
            f"depth {depth} needs {2**depth} rows, plane has {plane.shape[0]}"
        )
    levels = []
    approx = plane
    for j in range(1, depth + 1):
        level = _pair_once(approx, j)
        levels.append(level)
        approx = level.approx
    return GroupletStack(plane, tuple(levels))
