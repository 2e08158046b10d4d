"""Score assembly: baseline FSIM / FSIMc / SR-SIM, their tau-assisted
variants, weighted pooling, and display normalization of quality maps."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from .bless import bless_map, compute_tau
from .config import PipelineConfig
from .errors import DegenerateMapError, DimensionMismatchError, ZeroWeightMassError
from .features import (
    CONSTANTS,
    FeatureMap,
    gradient_magnitude,
    metric_luma,
    phase_congruency,
    similarity_map,
    spectral_residual,
)
from .image import ColorSpace, PlanarImage, downsample_for_metric, to_yiq


class Estimator(Enum):
    FSIM = "fsim"
    FSIMC = "fsimc"
    SRSIM = "srsim"
    BLESS_FSIM = "bless-fsim"
    BLESS_FSIMC = "bless-fsimc"
    BLESS_SRSIM = "bless-srsim"
    BLESS = "bless"


ESTIMATOR_ORDER = tuple(Estimator)

BASELINE_OF = {
    Estimator.BLESS_FSIM: Estimator.FSIM,
    Estimator.BLESS_FSIMC: Estimator.FSIMC,
    Estimator.BLESS_SRSIM: Estimator.SRSIM,
}


@dataclass(frozen=True)
class FusionConstants:
    """Exponents weighting the color terms inside the fused feature maps."""

    chroma_exponent: float = 0.03  # on the I*Q chroma similarity (FSIMc)
    bless_exponent: float = 0.3  # on the tau similarity inside assisted FSIMc
    srsim_exponent: float = 0.5  # on the gradient term of SR-SIM


FUSION = FusionConstants()


@dataclass(frozen=True)
class QualityResult:
    estimator: Estimator
    score: float
    feature_map: np.ndarray
    weight_map: np.ndarray


def weighted_pool(feature: np.ndarray, weight: np.ndarray) -> float:
    """Weight-averaged pooling of a feature map into one score."""
    if feature.shape != weight.shape:
        raise DimensionMismatchError(
            f"feature {feature.shape} vs weight {weight.shape}"
        )
    mass = float(np.sum(weight))
    if mass <= 0.0:
        raise ZeroWeightMassError("weight map sums to zero")
    return float(np.sum(feature * weight) / mass)


def _ensure_rgb(img: PlanarImage) -> PlanarImage:
    if img.space is not ColorSpace.GRAY:
        return img
    plane = img.planes[0]
    return PlanarImage((plane, plane, plane), ColorSpace.RGB_SRGB, img.downsample_factor)


class PairFeatures:
    """Shared, lazily computed feature maps for one (reference, distorted)
    pair after metric preprocessing. Safe to evaluate several estimators
    against without recomputing anything."""

    def __init__(self, ref: PlanarImage, dist: PlanarImage, config: PipelineConfig | None = None):
        self.config = config or PipelineConfig()
        ref = _ensure_rgb(ref)
        dist = _ensure_rgb(dist)
        if (ref.height, ref.width) != (dist.height, dist.width):
            raise DimensionMismatchError(
                f"reference is {ref.height}x{ref.width}, "
                f"distorted is {dist.height}x{dist.width}"
            )
        if self.config.downsample:
            ref = downsample_for_metric(ref)
            dist = downsample_for_metric(dist)
        self.ref = ref
        self.dist = dist

    @cached_property
    def luma(self):
        return (metric_luma(self.ref, self.config), metric_luma(self.dist, self.config))

    @cached_property
    def chroma(self):
        out = []
        for img in (self.ref, self.dist):
            _, i, q = to_yiq(img).planes
            out.append((i * 255.0, q * 255.0))
        return tuple(out)

    @cached_property
    def pc(self):
        return tuple(phase_congruency(l, self.config) for l in self.luma)

    @cached_property
    def gm_scharr(self):
        return tuple(gradient_magnitude(l, "scharr") for l in self.luma)

    @cached_property
    def gm_sobel(self):
        return tuple(gradient_magnitude(l, "sobel") for l in self.luma)

    @cached_property
    def sr(self):
        return tuple(spectral_residual(l, self.config) for l in self.luma)

    @cached_property
    def tau(self):
        return tuple(compute_tau(img, self.config) for img in (self.ref, self.dist))

    @cached_property
    def s_pc(self):
        return similarity_map(*self.pc, CONSTANTS.pc)

    @cached_property
    def s_gm_fsim(self):
        return similarity_map(*self.gm_scharr, CONSTANTS.gm_fsim)

    @cached_property
    def s_gm_srsim(self):
        return similarity_map(*self.gm_sobel, CONSTANTS.gm_srsim)

    @cached_property
    def s_sr(self):
        return similarity_map(*self.sr, CONSTANTS.sr)

    @cached_property
    def s_chroma(self):
        (i_ref, q_ref), (i_dist, q_dist) = self.chroma
        s_i = similarity_map(
            FeatureMap("i_chroma", i_ref), FeatureMap("i_chroma", i_dist), CONSTANTS.chroma
        )
        s_q = similarity_map(
            FeatureMap("q_chroma", q_ref), FeatureMap("q_chroma", q_dist), CONSTANTS.chroma
        )
        return s_i * s_q

    @cached_property
    def s_bless(self):
        return bless_map(*self.tau, CONSTANTS.tau)

    # --- weight maps ---

    def pc_weight(self) -> np.ndarray:
        return np.maximum(self.pc[0].grid, self.pc[1].grid)

    def pc_tau_weight(self) -> np.ndarray:
        return np.maximum(self.pc[0].grid * self.tau[0], self.pc[1].grid * self.tau[1])

    def sr_weight(self) -> np.ndarray:
        return np.maximum(self.sr[0].grid, self.sr[1].grid)

    def sr_tau_weight(self) -> np.ndarray:
        return np.maximum(self.sr[0].grid * self.tau[0], self.sr[1].grid * self.tau[1])


def _result(estimator, feature, weight) -> QualityResult:
    return QualityResult(estimator, weighted_pool(feature, weight), feature, weight)


def fsim(ref, dist, assisted: bool = False, config=None, features: PairFeatures | None = None) -> QualityResult:
    pf = features or PairFeatures(ref, dist, config)
    feature = pf.s_gm_fsim * pf.s_pc
    if assisted:
        return _result(Estimator.BLESS_FSIM, feature * pf.s_bless, pf.pc_tau_weight())
    return _result(Estimator.FSIM, feature, pf.pc_weight())


def fsimc(ref, dist, assisted: bool = False, config=None, features: PairFeatures | None = None) -> QualityResult:
    pf = features or PairFeatures(ref, dist, config)
    # chroma planes are signed, so their similarity ratio can dip below zero
    # where strong chroma flips sign; the fractional power is then complex
    # and only its real part enters the feature map
    chroma = np.real(np.power(pf.s_chroma.astype(complex), FUSION.chroma_exponent))
    feature = pf.s_gm_fsim * pf.s_pc * chroma
    if assisted:
        feature = feature * np.power(pf.s_bless, FUSION.bless_exponent)
        return _result(Estimator.BLESS_FSIMC, feature, pf.pc_tau_weight())
    return _result(Estimator.FSIMC, feature, pf.pc_weight())


def srsim(ref, dist, assisted: bool = False, config=None, features: PairFeatures | None = None) -> QualityResult:
    pf = features or PairFeatures(ref, dist, config)
    if assisted:
        fused = np.power(pf.s_gm_srsim * pf.s_bless, FUSION.srsim_exponent)
        return _result(Estimator.BLESS_SRSIM, pf.s_sr * fused, pf.sr_tau_weight())
    fused = np.power(pf.s_gm_srsim, FUSION.srsim_exponent)
    return _result(Estimator.SRSIM, pf.s_sr * fused, pf.sr_weight())


def bless(ref, dist, config=None, features: PairFeatures | None = None) -> QualityResult:
    pf = features or PairFeatures(ref, dist, config)
    feature = pf.s_bless
    return _result(Estimator.BLESS, feature, np.ones_like(feature))


def score_pair(ref, dist, estimators=None, config=None) -> dict[Estimator, QualityResult]:
    """Evaluate the requested estimators on one pair, sharing feature maps.

    Returns results keyed by estimator, in canonical order.
    """
    wanted = tuple(estimators) if estimators else ESTIMATOR_ORDER
    pf = PairFeatures(ref, dist, config)
    dispatch = {
        Estimator.FSIM: lambda: fsim(None, None, False, features=pf),
        Estimator.FSIMC: lambda: fsimc(None, None, False, features=pf),
        Estimator.SRSIM: lambda: srsim(None, None, False, features=pf),
        Estimator.BLESS_FSIM: lambda: fsim(None, None, True, features=pf),
        Estimator.BLESS_FSIMC: lambda: fsimc(None, None, True, features=pf),
        Estimator.BLESS_SRSIM: lambda: srsim(None, None, True, features=pf),
        Estimator.BLESS: lambda: bless(None, None, features=pf),
    }
    return {est: dispatch[est]() for est in ESTIMATOR_ORDER if est in wanted}


def visualize_map(feature: np.ndarray) -> np.ndarray:
    """Display normalization: center on the mean, divide by the new maximum,
    raise to the fifth power, then map affinely onto [0, 1]."""
    if feature.size == 0:
        raise DegenerateMapError("empty map")
    centered = feature - float(np.mean(feature))
    top = float(np.max(centered))
    if top <= 0.0:
        raise DegenerateMapError("map is constant; nothing to display")
    v = (centered / top) ** 5
    return (v - v.min()) / (v.max() - v.min())
