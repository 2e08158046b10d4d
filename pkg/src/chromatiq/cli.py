"""Command-line interface: score, maps, bench, verify-manifest."""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .benchmark import (
    BenchmarkRecord,
    Database,
    category_report,
    load_manifest,
    verify_manifest,
    write_report_csv,
    write_report_json,
)
from .bless import compute_tau
from .config import PipelineConfig, load_config
from .errors import ChromatiqError, DegenerateMapError
from .estimators import (
    ESTIMATOR_ORDER,
    Estimator,
    PairFeatures,
    score_pair,
    visualize_map,
)
from .features import gradient_magnitude, metric_luma, phase_congruency, spectral_residual
from .image import (
    ColorSpace,
    PlanarImage,
    downsample_for_metric,
    load_image,
    save_png,
    write_pgm,
)
from .pyramid import grouplet_forward, wavelet_forward

DEFAULT_PAIRS = (
    ("fsim", "bless-fsim"),
    ("fsimc", "bless-fsimc"),
    ("srsim", "bless-srsim"),
)

# the standalone bless estimator is opt-in (--estimator bless)
DEFAULT_ESTIMATORS = tuple(e for e in ESTIMATOR_ORDER if e is not Estimator.BLESS)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chromatiq",
        description="Spatiochromatic full-reference image quality assessment",
    )
    parser.add_argument("--config", help="pipeline config file (key = value lines)")
    parser.add_argument(
        "--no-downsample", action="store_true",
        help="skip the metric's 256-px preprocessing decimation",
    )
    # global flags; subcommands re-register them (SUPPRESS keeps the
    # top-level value when the subcommand position is unused)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--emit-maps", metavar="DIR", help="write F/W/view maps")
    parser.add_argument(
        "--skip-missing", action="store_true",
        help="bench: warn and drop unreadable rows instead of failing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="score a reference/distorted pair")
    p_score.add_argument("ref")
    p_score.add_argument("dist")
    p_score.add_argument(
        "--estimator", action="append", metavar="NAME",
        help="estimator to run (repeatable); default: all",
    )
    p_score.add_argument("--emit-maps", metavar="DIR", default=argparse.SUPPRESS)
    p_score.add_argument("--dump-tau", metavar="PATH", help="write the reference tau map as 16-bit PGM")
    p_score.add_argument(
        "--dump-feature", nargs=2, metavar=("KIND", "PATH"), action="append",
        help="write a reference feature map (gm|pc|sr|tau) as PGM",
    )

    p_maps = sub.add_parser("maps", help="emit per-image feature maps and quality maps")
    p_maps.add_argument("ref")
    p_maps.add_argument("dist")
    p_maps.add_argument("--out", required=True, metavar="DIR")
    p_maps.add_argument(
        "--dump-plane", nargs=2, metavar=("SPEC", "PATH"), action="append",
        help="debug-dump a decomposition plane of the reference; "
        "SPEC is CHANNEL:SCALE:ORIENT[:LEVEL], e.g. i3:2:h or i1:1:v:2",
    )

    p_bench = sub.add_parser("bench", help="benchmark estimators against a MOS manifest")
    p_bench.add_argument("manifest")
    p_bench.add_argument(
        "--database", default="custom", choices=[d.value for d in Database],
    )
    p_bench.add_argument(
        "--pair", action="append", metavar="BASELINE:ASSISTED",
        help="estimator pair to compare (repeatable); default: the three published pairs",
    )
    p_bench.add_argument("--out-json", metavar="PATH")
    p_bench.add_argument("--out-csv", metavar="PATH")
    p_bench.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    p_bench.add_argument(
        "--skip-missing", action="store_true", default=argparse.SUPPRESS,
        help="warn and drop unreadable rows instead of failing",
    )

    p_verify = sub.add_parser("verify-manifest", help="check manifest codes and counts")
    p_verify.add_argument("manifest")
    p_verify.add_argument(
        "--database", default="custom", choices=[d.value for d in Database],
    )
    return parser


def _load_pipeline_config(args) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else PipelineConfig()
    if args.no_downsample and cfg.downsample:
        from dataclasses import replace

        cfg = replace(cfg, downsample=False)
    return cfg


def _parse_estimators(names) -> tuple[Estimator, ...]:
    if not names:
        return DEFAULT_ESTIMATORS
    by_value = {e.value: e for e in Estimator}
    chosen = []
    for name in names:
        if name not in by_value:
            raise ChromatiqError(
                f"unknown estimator {name!r}; choose from "
                f"{', '.join(by_value)}"
            )
        chosen.append(by_value[name])
    return tuple(chosen)


def _emit_quality_maps(results, out_dir) -> None:
    os.makedirs(out_dir, exist_ok=True)
    for est, result in results.items():
        stem = os.path.join(out_dir, est.value)
        write_pgm(result.feature_map, stem + "-feature.pgm")
        write_pgm(result.weight_map, stem + "-weight.pgm")
        try:
            view = visualize_map(result.feature_map)
        except DegenerateMapError as exc:
            print(f"chromatiq: skipping {est.value} view map: {exc}", file=sys.stderr)
            continue
        save_png(PlanarImage((view,), ColorSpace.GRAY), stem + "-view.png")


def _reference_feature(kind: str, img: PlanarImage, cfg: PipelineConfig) -> np.ndarray:
    if kind == "tau":
        return compute_tau(img, cfg)
    luma = metric_luma(img, cfg)
    if kind == "gm":
        return gradient_magnitude(luma).grid
    if kind == "pc":
        return phase_congruency(luma, cfg).grid
    if kind == "sr":
        return spectral_residual(luma, cfg).grid
    raise ChromatiqError(f"unknown feature kind {kind!r}; choose gm, pc, sr or tau")


def _cmd_score(args) -> int:
    cfg = _load_pipeline_config(args)
    estimators = _parse_estimators(args.estimator)
    ref = load_image(args.ref)
    dist = load_image(args.dist)
    results = score_pair(ref, dist, estimators, cfg)
    prepped = downsample_for_metric(ref) if cfg.downsample else ref
    if args.dump_tau:
        write_pgm(compute_tau(prepped, cfg), args.dump_tau)
    for kind, path in args.dump_feature or ():
        write_pgm(_reference_feature(kind, prepped, cfg), path)
    if args.emit_maps:
        _emit_quality_maps(results, args.emit_maps)
    for est, result in results.items():
        print(f"{est.value}\t{result.score:.6f}")
    return 0


def _dump_decomposition_plane(spec: str, path: str, img: PlanarImage, cfg: PipelineConfig) -> None:
    parts = spec.split(":")
    if len(parts) not in (3, 4):
        raise ChromatiqError(f"bad plane spec {spec!r}; want CHANNEL:SCALE:ORIENT[:LEVEL]")
    channel_names = {"i1": 0, "i2": 1, "i3": 2}
    if parts[0] not in channel_names:
        raise ChromatiqError(f"bad channel {parts[0]!r}; want i1, i2 or i3")
    from .image import apply_gamma, to_opponent

    channel = to_opponent(apply_gamma(img, cfg.gamma)).planes[channel_names[parts[0]]]
    scale = int(parts[1])
    orient = parts[2]
    from .bless import default_scales

    pyr = wavelet_forward(channel, max(scale, cfg.scales or default_scales(*channel.shape)))
    plane = pyr.levels[scale - 1].plane(orient)
    if len(parts) == 4:
        stack = grouplet_forward(plane, int(parts[3]))
        plane = stack.levels[int(parts[3]) - 1].detail
    write_pgm(np.abs(plane), path)


def _cmd_maps(args) -> int:
    cfg = _load_pipeline_config(args)
    ref = load_image(args.ref)
    dist = load_image(args.dist)
    results = score_pair(ref, dist, None, cfg)
    _emit_quality_maps(results, args.out)
    for label, img in (("ref", ref), ("dist", dist)):
        prepped = downsample_for_metric(img) if cfg.downsample else img
        for kind in ("gm", "pc", "sr", "tau"):
            grid = _reference_feature(kind, prepped, cfg)
            write_pgm(grid, os.path.join(args.out, f"{label}-{kind}.pgm"))
    for spec, path in args.dump_plane or ():
        prepped = downsample_for_metric(ref) if cfg.downsample else ref
        _dump_decomposition_plane(spec, path, prepped, cfg)
    return 0


def _score_row(row, base_dir, estimators, cfg):
    def resolve(path):
        return path if os.path.isabs(path) else os.path.join(base_dir, path)

    ref = load_image(resolve(row.ref))
    dist = load_image(resolve(row.dist))
    results = score_pair(ref, dist, estimators, cfg)
    return BenchmarkRecord(
        pair_id=row.dist,
        database=None,  # filled by caller
        categories=row.categories,
        mos=row.mos,
        scores={est.value: res.score for est, res in results.items()},
    )


def _cmd_bench(args) -> int:
    cfg = _load_pipeline_config(args)
    database = Database(args.database)
    manifest = load_manifest(args.manifest, database)
    pairs = []
    for token in args.pair or (f"{b}:{a}" for b, a in DEFAULT_PAIRS):
        base, _, assisted = token.partition(":")
        if not assisted:
            raise ChromatiqError(f"bad pair {token!r}; want BASELINE:ASSISTED")
        pairs.append((base, assisted))
    wanted = {name for pair in pairs for name in pair}
    estimators = _parse_estimators(sorted(wanted))

    base_dir = os.path.dirname(os.path.abspath(args.manifest))
    records = []
    failures = []

    def work(row):
        try:
            return _score_row(row, base_dir, estimators, cfg)
        except (ChromatiqError, OSError) as exc:
            failures.append((row.dist, exc))
            return None

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            scored = list(pool.map(work, manifest.rows))
    else:
        scored = [work(row) for row in manifest.rows]

    if failures and not args.skip_missing:
        path, exc = failures[0]
        raise ChromatiqError(f"row {path!r} failed: {exc}")
    for path, exc in failures:
        print(f"chromatiq: skipping row {path!r}: {exc}", file=sys.stderr)

    records = [
        BenchmarkRecord(r.pair_id, database, r.categories, r.mos, r.scores)
        for r in scored
        if r is not None
    ]
    records.sort(key=lambda r: r.pair_id)
    report = category_report(records, pairs, cfg.significance_z)

    out_json = args.out_json or args.manifest + ".report.json"
    out_csv = args.out_csv or args.manifest + ".report.csv"
    write_report_json(report, out_json)
    write_report_csv(report, out_csv)

    print(f"{'database':<8} {'category':<14} {'pair':<24} {'n':>5} {'pct':>9} sig")
    for e in report.entries:
        pct = "n/a" if e.pct_change is None else f"{e.pct_change:+8.2f}%"
        print(
            f"{e.database.value:<8} {e.category.value:<14} "
            f"{e.baseline + '->' + e.assisted:<24} {e.n:>5} {pct:>9} {e.significant}"
        )
    print(f"report: {out_json}")
    print(f"report: {out_csv}")
    return 0


def _cmd_verify(args) -> int:
    manifest = load_manifest(args.manifest, Database(args.database))
    check = verify_manifest(manifest)
    print(f"rows: {check.total}")
    for cat, count in sorted(check.counts.items(), key=lambda kv: kv[0].value):
        expected = (check.expected_counts or {}).get(cat)
        suffix = "" if expected is None else f" (expected {expected})"
        print(f"{cat.value}: {count}{suffix}")
    if check.expected_counts is None:
        print("no published counts for this database; structural checks only")
        return 0
    if check.ok:
        print(f"counts match the published table (total {check.expected_total})")
        return 0
    print("counts DO NOT match the published table", file=sys.stderr)
    return 2


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "score": _cmd_score,
        "maps": _cmd_maps,
        "bench": _cmd_bench,
        "verify-manifest": _cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except (ChromatiqError, OSError) as exc:
        print(f"chromatiq: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
