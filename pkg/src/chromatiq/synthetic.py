"""Deterministic synthetic scenes and distortion generators.

The scenes stand in for natural photographs in the self-contained test and
benchmark fixtures: each mixes smooth regions, strong edges, fine texture
and saturated color, and every call is reproducible bit-for-bit.
"""

from __future__ import annotations

import numpy as np
from scipy.fft import dctn, idctn
from scipy.ndimage import gaussian_filter

from .image import ColorSpace, PlanarImage, to_yiq, yiq_to_rgb

SCENE_NAMES = ("meadow", "harbor", "orchard", "dunes", "market")


def _texture(rng, shape, sigma, amplitude):
    noise = gaussian_filter(rng.standard_normal(shape), sigma, mode="reflect")
    peak = np.max(np.abs(noise))
    return noise / peak * amplitude if peak > 0 else noise


def _disk(shape, cy, cx, radius):
    yy, xx = np.mgrid[0 : shape[0], 0 : shape[1]]
    return ((yy - cy) ** 2 + (xx - cx) ** 2) <= radius**2


def _finish(r, g, b):
    planes = tuple(np.clip(p, 0.02, 0.98) for p in (r, g, b))
    return PlanarImage(planes, ColorSpace.RGB_SRGB)


def _meadow(h, w):
    rng = np.random.default_rng(101)
    yy = np.linspace(0.0, 1.0, h)[:, None] * np.ones((1, w))
    sky = np.clip(1.2 - 1.6 * yy, 0.0, 1.0)
    grass = _texture(rng, (h, w), 1.0, 0.18) * (yy > 0.45)
    r = 0.35 * sky + 0.25 + 0.6 * grass * 0.3
    g = 0.45 * sky + 0.35 + 0.6 * grass
    b = 0.75 * sky + 0.15 + 0.2 * grass * 0.2
    for _ in range(6):
        cy = int(rng.uniform(0.55, 0.92) * h)
        cx = int(rng.uniform(0.05, 0.95) * w)
        mask = _disk((h, w), cy, cx, int(rng.uniform(2, 5)))
        r = np.where(mask, 0.9, r)
        g = np.where(mask, 0.25, g)
        b = np.where(mask, 0.3, b)
    return _finish(r, g, b)


def _harbor(h, w):
    rng = np.random.default_rng(202)
    yy = np.linspace(0.0, 1.0, h)[:, None] * np.ones((1, w))
    r = 0.55 + 0.25 * (1 - yy)
    g = 0.6 + 0.2 * (1 - yy)
    b = 0.75 + 0.15 * (1 - yy)
    for k in range(5):
        x0 = int((0.05 + 0.18 * k) * w)
        x1 = x0 + int(0.12 * w)
        top = int(rng.uniform(0.25, 0.45) * h)
        tint = rng.uniform(0.2, 0.8, size=3)
        r[top : int(0.65 * h), x0:x1] = tint[0]
        g[top : int(0.65 * h), x0:x1] = tint[1] * 0.6
        b[top : int(0.65 * h), x0:x1] = tint[2] * 0.6
    water = yy > 0.65
    ripple = 0.08 * np.sin(np.arange(h)[:, None] * 1.3 + np.arange(w)[None, :] * 0.15)
    r = np.where(water, 0.15 + ripple, r)
    g = np.where(water, 0.3 + ripple, g)
    b = np.where(water, 0.55 + ripple, b)
    return _finish(r, g, b)


def _orchard(h, w):
    rng = np.random.default_rng(303)
    base = _texture(rng, (h, w), 1.5, 0.15)
    r = 0.25 + base * 0.6
    g = 0.5 + base
    b = 0.2 + base * 0.4
    for _ in range(10):
        cy = int(rng.uniform(0.1, 0.9) * h)
        cx = int(rng.uniform(0.1, 0.9) * w)
        mask = _disk((h, w), cy, cx, int(rng.uniform(4, 9)))
        warm = rng.uniform(0.7, 0.95)
        r = np.where(mask, warm, r)
        g = np.where(mask, 0.35 * warm, g)
        b = np.where(mask, 0.15, b)
    return _finish(r, g, b)


def _dunes(h, w):
    rng = np.random.default_rng(404)
    yy, xx = np.mgrid[0:h, 0:w]
    waves = 0.5 + 0.35 * np.sin(0.09 * xx + 0.16 * yy) * np.cos(0.03 * xx)
    speckle = _texture(rng, (h, w), 0.6, 0.06)
    r = 0.55 + 0.35 * waves + speckle
    g = 0.45 + 0.28 * waves + speckle
    b = 0.3 + 0.15 * waves + speckle * 0.5
    sky = yy < 0.18 * h
    r = np.where(sky, 0.25, r)
    g = np.where(sky, 0.4, g)
    b = np.where(sky, 0.8, b)
    return _finish(r, g, b)


def _market(h, w):
    rng = np.random.default_rng(505)
    r = np.full((h, w), 0.4)
    g = np.full((h, w), 0.4)
    b = np.full((h, w), 0.4)
    cell_h, cell_w = max(h // 6, 4), max(w // 8, 4)
    for by in range(0, h, cell_h):
        for bx in range(0, w, cell_w):
            tint = rng.uniform(0.15, 0.9, size=3)
            r[by : by + cell_h, bx : bx + cell_w] = tint[0]
            g[by : by + cell_h, bx : bx + cell_w] = tint[1]
            b[by : by + cell_h, bx : bx + cell_w] = tint[2]
    stripes = (np.arange(w)[None, :] // 5) % 2 == 0
    band = slice(0, max(h // 8, 3))
    r[band] = np.where(stripes[:, :], 0.85, 0.2)[band.start : band.stop if band.stop else None]
    g[band] = 0.25
    b[band] = np.where(stripes, 0.2, 0.8)[band]
    grain = _texture(rng, (h, w), 0.8, 0.05)
    return _finish(r + grain, g + grain, b + grain)


_SCENES = {
    "meadow": _meadow,
    "harbor": _harbor,
    "orchard": _orchard,
    "dunes": _dunes,
    "market": _market,
}


def make_scene(name: str, height: int = 120, width: int = 160) -> PlanarImage:
    try:
        builder = _SCENES[name]
    except KeyError:
        raise KeyError(f"unknown scene {name!r}; choose from {SCENE_NAMES}") from None
    return builder(height, width)


# --- distortions ---

def gaussian_blur(img: PlanarImage, radius: float) -> PlanarImage:
    if radius <= 0:
        return img
    planes = tuple(
        gaussian_filter(p, sigma=radius, mode="reflect") for p in img.planes
    )
    return PlanarImage(planes, img.space, img.downsample_factor)


def _quantize_plane(plane: np.ndarray, step_table: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    ph, pw = (-h) % 8, (-w) % 8
    padded = np.pad(plane, ((0, ph), (0, pw)), mode="edge")
    blocks = padded.reshape(padded.shape[0] // 8, 8, padded.shape[1] // 8, 8)
    coeffs = dctn(blocks, axes=(1, 3), norm="ortho")
    coeffs = np.round(coeffs / step_table[None, :, None, :]) * step_table[None, :, None, :]
    out = idctn(coeffs, axes=(1, 3), norm="ortho")
    return out.reshape(padded.shape)[:h, :w]


def quantize_blocks(img: PlanarImage, strength: float) -> PlanarImage:
    """JPEG-style degradation: blockwise DCT coefficient quantization.

    ``strength`` scales the quantization step; higher is worse. The step
    grows with spatial frequency the way compression tables do.
    """
    freq = np.arange(8)
    table = 0.02 * strength * (1.0 + (freq[:, None] + freq[None, :]) / 4.0)
    planes = tuple(
        np.clip(_quantize_plane(p, table), 0.0, 1.0) for p in img.planes
    )
    return PlanarImage(planes, img.space, img.downsample_factor)


def additive_noise(img: PlanarImage, sigma: float, seed: int = 0) -> PlanarImage:
    rng = np.random.default_rng(seed)
    planes = tuple(
        np.clip(p + rng.normal(0.0, sigma, p.shape), 0.0, 1.0) for p in img.planes
    )
    return PlanarImage(planes, img.space, img.downsample_factor)


def hue_rotate(img: PlanarImage, degrees: float) -> PlanarImage:
    """Rotate the chroma plane pair, keeping luma untouched.

    No gamut clipping is applied, so the luma plane of the result matches the
    input to rounding; callers wanting fixed-luma pairs pick angles that keep
    RGB inside [0, 1].
    """
    yiq = to_yiq(img)
    y, i, q = yiq.planes
    theta = np.deg2rad(degrees)
    i2 = i * np.cos(theta) - q * np.sin(theta)
    q2 = i * np.sin(theta) + q * np.cos(theta)
    rotated = PlanarImage((y, i2, q2), ColorSpace.YIQ, img.downsample_factor)
    return yiq_to_rgb(rotated)


def saturation_scale(img: PlanarImage, factor: float) -> PlanarImage:
    """Scale chroma away from or toward gray, keeping luma untouched."""
    yiq = to_yiq(img)
    y, i, q = yiq.planes
    scaled = PlanarImage((y, i * factor, q * factor), ColorSpace.YIQ, img.downsample_factor)
    return yiq_to_rgb(scaled)


def intensity_shift(img: PlanarImage, delta: float) -> PlanarImage:
    planes = tuple(np.clip(p + delta, 0.0, 1.0) for p in img.planes)
    return PlanarImage(planes, img.space, img.downsample_factor)


def contrast_change(img: PlanarImage, factor: float) -> PlanarImage:
    planes = tuple(
        np.clip((p - 0.5) * factor + 0.5, 0.0, 1.0) for p in img.planes
    )
    return PlanarImage(planes, img.space, img.downsample_factor)
