"""Pipeline configuration and the key/value config file format.

Config files are plain text, one ``key = value`` per line, ``#`` comments.
Unknown keys are rejected so typos fail loudly. Example::

    # deeper decomposition, no metric downsampling
    scales = 5
    grouplet_depth = 4
    gamma = 2.2
    downsample = false
    ecsf_chromatic_peak = 4.0
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .bless import EcsfConfig, EcsfParams


@dataclass(frozen=True)
class PipelineConfig:
    # color / preprocessing
    gamma: float = 2.2
    downsample: bool = True
    # decomposition (None = derive from image size)
    scales: int | None = None
    grouplet_depth: int | None = None
    grouplet_combine: str = "sum"  # or "mean"
    surround_window_factor: float = 3.0
    ecsf: EcsfConfig = field(default_factory=EcsfConfig)
    # luma fed to the gradient/phase/spectral features: NTSC Y ("yiq") or
    # the opponent intensity channel scaled to the same range ("intensity")
    luma_source: str = "yiq"
    # phase congruency bank (frozen by golden tests)
    pc_scales: int = 4
    pc_orientations: int = 4
    pc_min_wavelength: float = 6.0
    pc_mult: float = 2.0
    pc_sigma_onf: float = 0.55
    pc_k: float = 2.0
    # spectral residual
    sr_analysis_size: int = 64
    sr_box_size: int = 3
    sr_output_sigma: float = 2.5
    # benchmark significance recipe
    significance_z: float = 1.96

    def __post_init__(self):
        if self.grouplet_combine not in ("sum", "mean"):
            raise ValueError("grouplet_combine must be 'sum' or 'mean'")
        if self.luma_source not in ("yiq", "intensity"):
            raise ValueError("luma_source must be 'yiq' or 'intensity'")


_INT_KEYS = {
    "scales",
    "grouplet_depth",
    "pc_scales",
    "pc_orientations",
    "sr_analysis_size",
    "sr_box_size",
}
_FLOAT_KEYS = {
    "gamma",
    "surround_window_factor",
    "pc_min_wavelength",
    "pc_mult",
    "pc_sigma_onf",
    "pc_k",
    "sr_output_sigma",
    "significance_z",
}
_BOOL_KEYS = {"downsample"}
_STR_KEYS = {"grouplet_combine", "luma_source"}
_ECSF_FIELDS = {"peak": "peak_scale", "spread": "spread", "gain": "gain", "floor": "floor_gain"}


def _parse_bool(raw: str) -> bool:
    low = raw.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def parse_config_text(text: str) -> PipelineConfig:
    values = {}
    ecsf_over = {"achromatic": {}, "chromatic": {}}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key in _INT_KEYS:
            values[key] = int(raw)
        elif key in _FLOAT_KEYS:
            values[key] = float(raw)
        elif key in _BOOL_KEYS:
            values[key] = _parse_bool(raw)
        elif key in _STR_KEYS:
            values[key] = raw
        elif key.startswith("ecsf_"):
            try:
                _, channel, name = key.split("_", 2)
                ecsf_over[channel][_ECSF_FIELDS[name]] = float(raw)
            except (KeyError, ValueError) as exc:
                raise ValueError(f"config line {lineno}: unknown key {key!r}") from exc
        else:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")

    cfg = PipelineConfig(**values)
    if ecsf_over["achromatic"] or ecsf_over["chromatic"]:
        base = cfg.ecsf
        ecsf = EcsfConfig(
            achromatic=replace(base.achromatic, **ecsf_over["achromatic"]),
            chromatic=replace(base.chromatic, **ecsf_over["chromatic"]),
        )
        cfg = replace(cfg, ecsf=ecsf)
    return cfg


def load_config(path) -> PipelineConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())
