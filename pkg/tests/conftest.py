import csv

import pytest

from chromatiq.image import save_png
from chromatiq.synthetic import (
    SCENE_NAMES,
    additive_noise,
    gaussian_blur,
    make_scene,
    quantize_blocks,
    saturation_scale,
)


@pytest.fixture(scope="session")
def scene_pngs(tmp_path_factory):
    """The five bundled test scenes, written once per session as PNGs."""
    root = tmp_path_factory.mktemp("scenes")
    paths = {}
    for name in SCENE_NAMES:
        path = root / f"{name}.png"
        save_png(make_scene(name), path)
        paths[name] = path
    return paths


@pytest.fixture(scope="session")
def bench_manifest(tmp_path_factory):
    """Ten synthetic distorted pairs spanning four categories, with MOS
    values that track distortion strength."""
    root = tmp_path_factory.mktemp("bench")
    rows = []

    def add(scene, distortion, code, mos, tag):
        ref_path = root / f"{scene}.png"
        if not ref_path.exists():
            save_png(make_scene(scene, 96, 128), ref_path)
        dist_path = root / f"{scene}-{tag}.png"
        save_png(distortion(make_scene(scene, 96, 128)), dist_path)
        rows.append((ref_path.name, dist_path.name, mos, code))

    add("harbor", lambda im: gaussian_blur(im, 1.0), "blur", 4.1, "blur1")
    add("harbor", lambda im: gaussian_blur(im, 2.5), "blur", 2.6, "blur2")
    add("meadow", lambda im: gaussian_blur(im, 4.0), "blur", 1.5, "blur4")
    add("meadow", lambda im: additive_noise(im, 0.03, 1), "noise", 4.0, "n1")
    add("market", lambda im: additive_noise(im, 0.10, 2), "noise", 2.2, "n2")
    add("market", lambda im: quantize_blocks(im, 1.0), "compression", 4.3, "q1")
    add("dunes", lambda im: quantize_blocks(im, 3.5), "compression", 2.4, "q2")
    add("dunes", lambda im: saturation_scale(im, 0.7), "color", 3.9, "c1")
    add("orchard", lambda im: saturation_scale(im, 0.4), "color", 2.8, "c2")
    add("orchard", lambda im: gaussian_blur(im, 1.8), "blur", 3.1, "blur3")

    manifest = root / "manifest.csv"
    with open(manifest, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ref", "dist", "mos", "distortion"])
        writer.writerows(rows)
    return manifest
