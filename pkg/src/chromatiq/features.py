"""Feature maps behind the baseline estimators and their similarity maps.

Gradient magnitude, phase congruency and spectral-residual saliency all
operate on a single luma plane scaled to [0, 255], matching the conventions
the published metric code calibrated its stabilizing constants against
(frozen in :class:`SimilarityConstants`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import fft2, ifft2
from scipy.ndimage import convolve, gaussian_filter, uniform_filter

from .config import PipelineConfig
from .errors import (
    DimensionMismatchError,
    ImageTooSmallError,
    KindMismatchError,
)
from .image import ColorSpace, PlanarImage, apply_gamma, resize_bicubic, to_opponent, to_yiq


@dataclass(frozen=True)
class SimilarityConstants:
    """Stabilizers of the similarity ratio, one per feature pairing.

    gm_fsim/gm_srsim/pc/sr/tau are the published pairings; chroma is the
    constant the reference feature-similarity code uses for the I/Q planes
    (it is reference-code provenance, not part of the published table).
    """

    gm_fsim: float = 160.0
    gm_srsim: float = 225.0
    pc: float = 0.85
    sr: float = 0.4
    tau: float = 0.4
    chroma: float = 200.0


CONSTANTS = SimilarityConstants()


@dataclass(frozen=True)
class FeatureMap:
    kind: str  # gm | pc | sr | tau | i_chroma | q_chroma
    grid: np.ndarray


# 3x3 derivative taps, frozen by golden tests. Scharr (/16) is the
# feature-similarity convention; Sobel (/8) the spectral-residual one.
SCHARR_X = np.array([[3.0, 0.0, -3.0], [10.0, 0.0, -10.0], [3.0, 0.0, -3.0]]) / 16.0
SOBEL_X = np.array([[1.0, 0.0, -1.0], [2.0, 0.0, -2.0], [1.0, 0.0, -1.0]]) / 8.0

_OPERATORS = {"scharr": SCHARR_X, "sobel": SOBEL_X}

PC_MIN_DIM = 32
_EPS = 1e-12


def metric_luma(img: PlanarImage, cfg: PipelineConfig | None = None) -> np.ndarray:
    """Luma plane in [0, 255] for the gradient/phase/spectral features."""
    cfg = cfg or PipelineConfig()
    if img.space is ColorSpace.GRAY:
        return img.planes[0] * 255.0
    if cfg.luma_source == "yiq":
        return to_yiq(img).planes[0] * 255.0
    intensity = to_opponent(apply_gamma(img, cfg.gamma)).planes[2]
    return intensity / 3.0 * 255.0


def gradient_magnitude(luma: np.ndarray, operator: str = "scharr") -> FeatureMap:
    """Per-pixel gradient length from a 3x3 derivative operator."""
    kx = _OPERATORS[operator]
    gx = convolve(luma, kx, mode="reflect")
    gy = convolve(luma, kx.T, mode="reflect")
    return FeatureMap("gm", np.sqrt(gx * gx + gy * gy))


def phase_congruency(luma: np.ndarray, cfg: PipelineConfig | None = None) -> FeatureMap:
    """Phase congruency over a log-Gabor bank, pooled across orientations.

    Follows the classic moment-free formulation: per orientation, local
    energy is measured against the summed filter amplitude, denoised with a
    Rayleigh-statistics threshold, and weighted by the frequency spread
    sigmoid; orientations pool by summing energy and amplitude separately,
    which keeps the output inside [0, 1].
    """
    cfg = cfg or PipelineConfig()
    rows, cols = luma.shape
    if min(rows, cols) < PC_MIN_DIM:
        raise ImageTooSmallError(
            f"phase congruency needs a min dimension of {PC_MIN_DIM}, "
            f"got {rows}x{cols}"
        )
    nscale = cfg.pc_scales
    norient = cfg.pc_orientations
    epsilon = 1e-4
    spectrum = fft2(luma)

    x = np.fft.fftfreq(cols)[None, :] * np.ones((rows, 1))
    y = np.fft.fftfreq(rows)[:, None] * np.ones((1, cols))
    radius = np.sqrt(x * x + y * y)
    radius[0, 0] = 1.0
    theta = np.arctan2(-y, x)
    sintheta = np.sin(theta)
    costheta = np.cos(theta)

    # radial band-pass bank with a high-order low-pass to kill wraparound
    lowpass = 1.0 / (1.0 + (radius / 0.45) ** 30)
    log_gabors = []
    for s in range(nscale):
        f0 = 1.0 / (cfg.pc_min_wavelength * cfg.pc_mult**s)
        lg = np.exp(
            -(np.log(radius / f0) ** 2) / (2.0 * np.log(cfg.pc_sigma_onf) ** 2)
        )
        lg *= lowpass
        lg[0, 0] = 0.0
        log_gabors.append(lg)

    theta_sigma = np.pi / norient / 1.2
    total_energy = np.zeros((rows, cols))
    total_amplitude = np.zeros((rows, cols))

    for o in range(norient):
        angle = o * np.pi / norient
        ds = sintheta * np.cos(angle) - costheta * np.sin(angle)
        dc = costheta * np.cos(angle) + sintheta * np.sin(angle)
        dtheta = np.abs(np.arctan2(ds, dc))
        spread = np.exp(-(dtheta**2) / (2.0 * theta_sigma**2))

        responses = []
        sum_even = np.zeros((rows, cols))
        sum_odd = np.zeros((rows, cols))
        sum_amplitude = np.zeros((rows, cols))
        max_amplitude = None
        tau = 0.0
        for s in range(nscale):
            response = ifft2(spectrum * (log_gabors[s] * spread))
            amplitude = np.abs(response)
            responses.append(response)
            sum_amplitude += amplitude
            sum_even += response.real
            sum_odd += response.imag
            if s == 0:
                tau = float(np.median(amplitude)) / np.sqrt(np.log(4.0))
                max_amplitude = amplitude
            else:
                max_amplitude = np.maximum(max_amplitude, amplitude)

        norm = np.sqrt(sum_even**2 + sum_odd**2) + epsilon
        mean_even = sum_even / norm
        mean_odd = sum_odd / norm
        energy = np.zeros((rows, cols))
        for response in responses:
            even = response.real
            odd = response.imag
            energy += even * mean_even + odd * mean_odd
            energy -= np.abs(even * mean_odd - odd * mean_even)

        # Rayleigh-model noise threshold from the finest-scale amplitude
        total_tau = tau * (1.0 - (1.0 / cfg.pc_mult) ** nscale) / (1.0 - 1.0 / cfg.pc_mult)
        noise_mean = total_tau * np.sqrt(np.pi / 2.0)
        noise_sigma = total_tau * np.sqrt((4.0 - np.pi) / 2.0)
        energy = np.maximum(energy - (noise_mean + cfg.pc_k * noise_sigma), 0.0)

        width = (sum_amplitude / (max_amplitude + epsilon) - 1.0) / (nscale - 1)
        weight = 1.0 / (1.0 + np.exp((0.5 - width) * 10.0))

        total_energy += weight * energy
        total_amplitude += sum_amplitude

    pc = total_energy / (total_amplitude + epsilon)
    return FeatureMap("pc", np.clip(pc, 0.0, 1.0))


def spectral_residual(luma: np.ndarray, cfg: PipelineConfig | None = None) -> FeatureMap:
    """Spectral-residual saliency, min/max normalized onto [0, 1].

    The log-amplitude residual reuses the original spectrum's phase by
    rescaling it in place, so bins with no signal stay silent; a structure-
    free (constant) input therefore normalizes to an all-zero map.
    """
    cfg = cfg or PipelineConfig()
    h, w = luma.shape
    size = cfg.sr_analysis_size
    small = resize_bicubic(luma, size, size)
    spectrum = fft2(small)
    magnitude = np.abs(spectrum)
    log_amplitude = np.log(magnitude + _EPS)
    # the DC bin only encodes the mean; replace its log amplitude with the
    # average of its periodic neighbors so a luma offset cannot leak into
    # the residual anywhere
    ring = [(0, 1), (0, -1), (1, 0), (-1, 0), (1, 1), (1, -1), (-1, 1), (-1, -1)]
    log_amplitude[0, 0] = np.mean([log_amplitude[dy, dx] for dy, dx in ring])
    residual = log_amplitude - uniform_filter(log_amplitude, cfg.sr_box_size, mode="wrap")
    rescaled = spectrum * (np.exp(residual) / (magnitude + _EPS))
    saliency = np.abs(ifft2(rescaled)) ** 2
    saliency = gaussian_filter(saliency, cfg.sr_output_sigma, mode="reflect")
    saliency = np.maximum(resize_bicubic(saliency, w, h), 0.0)
    spread = float(saliency.max() - saliency.min())
    if spread < _EPS:
        return FeatureMap("sr", np.zeros((h, w)))
    return FeatureMap("sr", (saliency - saliency.min()) / spread)


def similarity_map(f_ref: FeatureMap, f_dist: FeatureMap, c: float) -> np.ndarray:
    """Stabilized per-pixel similarity of two feature maps, in (0, 1]."""
    if f_ref.kind != f_dist.kind:
        raise KindMismatchError(f"cannot compare {f_ref.kind} with {f_dist.kind}")
    if f_ref.grid.shape != f_dist.grid.shape:
        raise DimensionMismatchError(
            f"feature maps differ in shape: {f_ref.grid.shape} vs {f_dist.grid.shape}"
        )
    if not c > 0:
        raise ValueError("stabilizer must be positive")
    a = f_ref.grid
    b = f_dist.grid
    return (2.0 * a * b + c) / (a * a + b * b + c)
