"""MOS-database benchmarking: manifests, rank correlation, significance,
and the assisted-vs-baseline percentage-change reports.

Databases are never bundled; a manifest CSV (``ref,dist,mos,distortion``)
points at local copies. Distortion codes map onto seven categories through
per-database tables; a handful of codes legitimately belong to two
categories (e.g. compressed noisy images count as both compression and
noise), which is required for the published per-category image counts to
add up.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DegenerateInputError,
    EmptyCategoryError,
    LengthMismatchError,
    MissingColumnError,
    PerfectCorrelationError,
    SampleTooSmallError,
    UnknownDistortionCodeError,
)


class Database(Enum):
    LIVE = "live"
    MULTI = "multi"
    TID13 = "tid13"
    CUSTOM = "custom"


class Category(Enum):
    COMPRESSION = "compression"
    NOISE = "noise"
    COMMUNICATION = "communication"
    BLUR = "blur"
    COLOR = "color"
    GLOBAL = "global"
    LOCAL = "local"


# TID2013 distortion type numbers -> categories.
_TID13_BY_NUMBER = {
    1: (Category.NOISE,),
    2: (Category.NOISE,),
    3: (Category.NOISE,),
    4: (Category.NOISE,),
    5: (Category.NOISE,),
    6: (Category.NOISE,),
    7: (Category.NOISE,),
    8: (Category.BLUR,),
    9: (Category.NOISE,),
    10: (Category.COMPRESSION,),
    11: (Category.COMPRESSION,),
    12: (Category.COMMUNICATION,),
    13: (Category.COMMUNICATION,),
    14: (Category.LOCAL,),
    15: (Category.LOCAL,),
    16: (Category.GLOBAL,),
    17: (Category.GLOBAL,),
    18: (Category.COLOR,),
    19: (Category.NOISE,),
    20: (Category.NOISE,),
    21: (Category.COMPRESSION, Category.NOISE),
    22: (Category.COLOR,),
    23: (Category.COLOR,),
    24: (Category.BLUR,),
}

_TID13_ALIASES = {
    "additive_gaussian_noise": 1,
    "chroma_noise": 2,
    "spatially_correlated_noise": 3,
    "masked_noise": 4,
    "high_frequency_noise": 5,
    "impulse_noise": 6,
    "quantization_noise": 7,
    "gaussian_blur": 8,
    "image_denoising": 9,
    "jpeg": 10,
    "jp2k": 11,
    "jpeg_transmission_errors": 12,
    "jp2k_transmission_errors": 13,
    "non_eccentricity_pattern": 14,
    "local_blockwise_distortion": 15,
    "intensity_shift": 16,
    "contrast_change": 17,
    "color_saturation_change": 18,
    "multiplicative_gaussian_noise": 19,
    "comfort_noise": 20,
    "noisy_image_compression": 21,
    "color_quantization_dither": 22,
    "chromatic_aberrations": 23,
    "sparse_sampling": 24,
}

_LIVE_CODES = {
    "jp2k": (Category.COMPRESSION,),
    "jpeg": (Category.COMPRESSION,),
    "wn": (Category.NOISE,),
    "gblur": (Category.BLUR,),
    "fastfading": (Category.COMMUNICATION,),
    "white_noise": (Category.NOISE,),
    "gaussian_blur": (Category.BLUR,),
    "fast_fading": (Category.COMMUNICATION,),
}

_MULTI_CODES = {
    "blurjpeg": (Category.BLUR, Category.COMPRESSION),
    "blurnoise": (Category.BLUR, Category.NOISE),
}

# Published per-category distorted-image counts, used by manifest
# verification against full local database copies.
EXPECTED_CATEGORY_COUNTS = {
    Database.LIVE: {
        Category.COMPRESSION: 460,
        Category.NOISE: 174,
        Category.COMMUNICATION: 174,
        Category.BLUR: 174,
    },
    Database.MULTI: {
        Category.COMPRESSION: 225,
        Category.NOISE: 225,
        Category.BLUR: 450,
    },
    Database.TID13: {
        Category.COMPRESSION: 375,
        Category.NOISE: 1375,
        Category.COMMUNICATION: 250,
        Category.BLUR: 250,
        Category.COLOR: 375,
        Category.GLOBAL: 250,
        Category.LOCAL: 250,
    },
}

EXPECTED_TOTALS = {Database.LIVE: 982, Database.MULTI: 450, Database.TID13: 3000}


def categories_for(database: Database, code: str) -> tuple[Category, ...]:
    """Resolve a manifest distortion code to its category memberships."""
    token = code.strip().lower()
    if database is Database.TID13:
        number = _TID13_ALIASES.get(token)
        if number is None:
            try:
                number = int(token)
            except ValueError:
                number = None
        if number in _TID13_BY_NUMBER:
            return _TID13_BY_NUMBER[number]
    elif database is Database.LIVE:
        if token in _LIVE_CODES:
            return _LIVE_CODES[token]
    elif database is Database.MULTI:
        if token in _MULTI_CODES:
            return _MULTI_CODES[token]
    else:  # CUSTOM: codes name their category directly
        for cat in Category:
            if token == cat.value:
                return (cat,)
    raise UnknownDistortionCodeError(
        f"distortion code {code!r} unknown for database {database.value}"
    )


@dataclass(frozen=True)
class ManifestRow:
    ref: str
    dist: str
    mos: float
    code: str
    categories: tuple[Category, ...]


@dataclass(frozen=True)
class DatasetManifest:
    database: Database
    rows: tuple[ManifestRow, ...]

    def category_counts(self) -> dict[Category, int]:
        counts: dict[Category, int] = {}
        for row in self.rows:
            for cat in row.categories:
                counts[cat] = counts.get(cat, 0) + 1
        return counts


REQUIRED_COLUMNS = ("ref", "dist", "mos", "distortion")


def load_manifest(path, database: Database = Database.CUSTOM) -> DatasetManifest:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [col for col in REQUIRED_COLUMNS if col not in header]
        if missing:
            raise MissingColumnError(f"manifest lacks column(s): {', '.join(missing)}")
        rows = []
        for lineno, record in enumerate(reader, start=2):
            code = (record["distortion"] or "").strip()
            rows.append(
                ManifestRow(
                    ref=record["ref"].strip(),
                    dist=record["dist"].strip(),
                    mos=float(record["mos"]),
                    code=code,
                    categories=categories_for(database, code),
                )
            )
    return DatasetManifest(database, tuple(rows))


@dataclass(frozen=True)
class ManifestCheck:
    total: int
    counts: dict
    expected_counts: dict | None
    expected_total: int | None

    @property
    def ok(self) -> bool:
        if self.expected_counts is None:
            return True
        return self.total == self.expected_total and all(
            self.counts.get(cat, 0) == n for cat, n in self.expected_counts.items()
        )


def verify_manifest(manifest: DatasetManifest) -> ManifestCheck:
    expected = EXPECTED_CATEGORY_COUNTS.get(manifest.database)
    total = EXPECTED_TOTALS.get(manifest.database)
    return ManifestCheck(len(manifest.rows), manifest.category_counts(), expected, total)


# --- rank correlation ---

def average_ranks(values) -> np.ndarray:
    """1-based ranks, ties sharing the average of their positions."""
    arr = np.asarray(values, dtype=np.float64)
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(arr.size)
    i = 0
    while i < arr.size:
        j = i
        while j + 1 < arr.size and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    """Rank correlation: Pearson correlation of the average-rank vectors.

    Coincides with the classic 1 - 6*sum(d^2)/(N(N^2-1)) form whenever the
    ranks are tie-free.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatchError(f"need equal-length vectors, got {x.shape} vs {y.shape}")
    if x.size < 2:
        raise LengthMismatchError("need at least two samples")
    rx = average_ranks(x)
    ry = average_ranks(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    sx = float(np.sum(dx * dx))
    sy = float(np.sum(dy * dy))
    if sx == 0.0 or sy == 0.0:
        raise DegenerateInputError("all-equal vector has no rank ordering")
    return float(np.sum(dx * dy) / math.sqrt(sx * sy))


def significance(srcc_a: float, srcc_b: float, n: int, z_crit: float = 1.96) -> int:
    """Fisher-z test of two rank correlations sharing one sample of size n.

    Returns 1 when |atanh(a) - atanh(b)| / sqrt(2/(n-3)) exceeds ``z_crit``
    (two-sided 95% by default), else 0.
    """
    if n < 4:
        raise SampleTooSmallError(f"need n >= 4, got {n}")
    if abs(srcc_a) >= 1.0 or abs(srcc_b) >= 1.0:
        raise PerfectCorrelationError("Fisher transform undefined at |r| = 1")
    if srcc_a == srcc_b:
        return 0
    statistic = abs(math.atanh(srcc_a) - math.atanh(srcc_b)) / math.sqrt(2.0 / (n - 3))
    return int(statistic > z_crit)


# --- reports ---

@dataclass(frozen=True)
class BenchmarkRecord:
    pair_id: str
    database: Database
    categories: tuple[Category, ...]
    mos: float
    scores: dict  # estimator name -> score


@dataclass(frozen=True)
class CategoryCorrelation:
    database: Database
    category: Category
    baseline: str
    assisted: str
    n: int
    srcc_baseline: float
    srcc_assisted: float
    pct_change: float | None
    significant: int


@dataclass(frozen=True)
class CorrelationReport:
    pairs: tuple[tuple[str, str], ...]  # (baseline, assisted) estimator names
    entries: tuple[CategoryCorrelation, ...]

    def weighted_category_changes(self) -> dict:
        """Cross-database per-category change, weighted by image counts."""
        out: dict = {}
        for base, assisted in self.pairs:
            per_cat: dict = {}
            for entry in self.entries:
                if (entry.baseline, entry.assisted) != (base, assisted):
                    continue
                if entry.pct_change is None:
                    continue
                bucket = per_cat.setdefault(entry.category, [0.0, 0])
                bucket[0] += entry.pct_change * entry.n
                bucket[1] += entry.n
            out[(base, assisted)] = {
                cat: total / n for cat, (total, n) in per_cat.items() if n
            }
        return out


def category_report(
    records,
    pairs,
    z_crit: float = 1.96,
) -> CorrelationReport:
    """Correlate each estimator pair against MOS per database and category.

    ``pairs`` is a sequence of (baseline, assisted) estimator-name tuples;
    groups with fewer than two records are skipped.
    """
    groups: dict = {}
    for record in records:
        for cat in record.categories:
            groups.setdefault((record.database, cat), []).append(record)

    usable = {key: rows for key, rows in groups.items() if len(rows) >= 2}
    if not usable:
        raise EmptyCategoryError("no category has two or more records")

    entries = []
    for (database, cat), rows in sorted(
        usable.items(), key=lambda kv: (kv[0][0].value, kv[0][1].value)
    ):
        rows = sorted(rows, key=lambda r: r.pair_id)
        mos = [r.mos for r in rows]
        for base, assisted in pairs:
            srcc_b = spearman([r.scores[base] for r in rows], mos)
            srcc_a = spearman([r.scores[assisted] for r in rows], mos)
            pct = 100.0 * (srcc_a - srcc_b) / abs(srcc_b) if srcc_b != 0.0 else None
            try:
                bit = significance(srcc_a, srcc_b, len(rows), z_crit)
            except (SampleTooSmallError, PerfectCorrelationError):
                bit = 0
            entries.append(
                CategoryCorrelation(
                    database, cat, base, assisted, len(rows), srcc_b, srcc_a, pct, bit
                )
            )
    return CorrelationReport(tuple(tuple(p) for p in pairs), tuple(entries))


def report_to_json_dict(report: CorrelationReport) -> dict:
    databases: dict = {}
    for entry in report.entries:
        db = databases.setdefault(entry.database.value, {})
        cat = db.setdefault(entry.category.value, {})
        cat[entry.assisted] = {
            "baseline": entry.baseline,
            "n": entry.n,
            "srcc_baseline": entry.srcc_baseline,
            "srcc_assisted": entry.srcc_assisted,
            "pct_change": entry.pct_change,
            "significant": entry.significant,
        }
    weighted = {
        assisted: {cat.value: pct for cat, pct in by_cat.items()}
        for (_, assisted), by_cat in report.weighted_category_changes().items()
    }
    return {
        "pairs": [list(p) for p in report.pairs],
        "databases": databases,
        "weighted_pct_change": weighted,
    }


def report_from_json_dict(payload: dict) -> CorrelationReport:
    entries = []
    for db_name, by_cat in payload["databases"].items():
        for cat_name, by_est in by_cat.items():
            for assisted, cell in by_est.items():
                entries.append(
                    CategoryCorrelation(
                        Database(db_name),
                        Category(cat_name),
                        cell["baseline"],
                        assisted,
                        cell["n"],
                        cell["srcc_baseline"],
                        cell["srcc_assisted"],
                        cell["pct_change"],
                        cell["significant"],
                    )
                )
    entries.sort(key=lambda e: (e.database.value, e.category.value))
    return CorrelationReport(
        tuple(tuple(p) for p in payload["pairs"]), tuple(entries)
    )


def write_report_json(report: CorrelationReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report_to_json_dict(report), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_report_json(path) -> CorrelationReport:
    with open(path, "r", encoding="utf-8") as fh:
        return report_from_json_dict(json.load(fh))


def write_report_csv(report: CorrelationReport, path) -> None:
    """Flat CSV: one row per database/category/pair plus ALL summary rows
    carrying the count-weighted change and per-database significance bits
    (database order: sorted by name, '-' where a category is absent)."""
    db_order = sorted({e.database for e in report.entries}, key=lambda d: d.value)
    weighted = report.weighted_category_changes()
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["database", "category", "baseline", "assisted", "n",
             "srcc_baseline", "srcc_assisted", "pct_change", "significant"]
        )
        for e in report.entries:
            writer.writerow(
                [e.database.value, e.category.value, e.baseline, e.assisted, e.n,
                 f"{e.srcc_baseline:.6f}", f"{e.srcc_assisted:.6f}",
                 "" if e.pct_change is None else f"{e.pct_change:.4f}", e.significant]
            )
        for base, assisted in report.pairs:
            for cat in Category:
                cells = {
                    e.database: e
                    for e in report.entries
                    if e.category is cat and (e.baseline, e.assisted) == (base, assisted)
                }
                if not cells:
                    continue
                bits = "".join(
                    str(cells[db].significant) if db in cells else "-" for db in db_order
                )
                pct = weighted[(base, assisted)].get(cat)
                writer.writerow(
                    ["ALL", cat.value, base, assisted,
                     sum(e.n for e in cells.values()), "", "",
                     "" if pct is None else f"{pct:.4f}", bits]
                )
