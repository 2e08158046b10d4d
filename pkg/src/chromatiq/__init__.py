"""chromatiq: spatiochromatic full-reference image quality assessment.

Scores image pairs with FSIM, FSIMc and SR-SIM, with variants assisted by a
bio-inspired low-level spatiochromatic similarity map (BLeSS), and
benchmarks estimators against mean-opinion-score databases via Spearman
rank correlation with significance testing.
"""

from .benchmark import (
    BenchmarkRecord,
    Category,
    CorrelationReport,
    Database,
    DatasetManifest,
    category_report,
    load_manifest,
    significance,
    spearman,
    verify_manifest,
)
from .bless import (
    EcsfConfig,
    EcsfParams,
    bless_map,
    bless_score,
    compute_tau,
    ecsf_adjust,
    surround_contrast,
)
from .config import PipelineConfig, load_config
from .errors import ChromatiqError
from .estimators import (
    Estimator,
    PairFeatures,
    QualityResult,
    bless,
    fsim,
    fsimc,
    score_pair,
    srsim,
    visualize_map,
    weighted_pool,
)
from .features import (
    FeatureMap,
    SimilarityConstants,
    gradient_magnitude,
    phase_congruency,
    similarity_map,
    spectral_residual,
)
from .image import (
    ColorSpace,
    PlanarImage,
    apply_gamma,
    decode_image,
    downsample_for_metric,
    encode_png,
    load_image,
    resize_bicubic,
    to_opponent,
    to_yiq,
)
from .pyramid import (
    GroupletStack,
    WaveletPyramid,
    grouplet_forward,
    wavelet_forward,
    wavelet_inverse,
)

__version__ = "0.1.0"
