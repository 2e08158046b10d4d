import io

import numpy as np
import pytest
from PIL import Image as PILImage

from chromatiq.errors import (
    CorruptStreamError,
    EmptyPlaneError,
    NonPositiveGammaError,
    UnsupportedFormatError,
)
from chromatiq.image import (
    ColorSpace,
    PlanarImage,
    apply_gamma,
    decode_image,
    downsample_for_metric,
    encode_png,
    metric_downsample_factor,
    opponent_to_rgb,
    resize_bicubic,
    to_opponent,
    to_yiq,
    write_pgm,
    yiq_to_rgb,
    YIQ_FROM_RGB,
)


def _png_bytes(arr_u8):
    buf = io.BytesIO()
    PILImage.fromarray(arr_u8).save(buf, format="PNG")
    return buf.getvalue()


def _rgb(r, g, b):
    return PlanarImage(
        (np.asarray(r, float), np.asarray(g, float), np.asarray(b, float)),
        ColorSpace.RGB_SRGB,
    )


class TestDecode:
    def test_white_1x1_png(self):
        data = _png_bytes(np.full((1, 1, 3), 255, dtype=np.uint8))
        img = decode_image(data)
        assert img.space is ColorSpace.RGB_SRGB
        for plane in img.planes:
            assert plane == pytest.approx(1.0)

    def test_ascii_ppm_primaries(self):
        ppm = b"P3\n2 1\n255\n0 0 0 255 0 0\n"
        img = decode_image(ppm)
        r, g, b = img.planes
        assert r.tolist() == [[0.0, 1.0]]
        assert g.tolist() == [[0.0, 0.0]]
        assert b.tolist() == [[0.0, 0.0]]

    def test_truncated_png_is_corrupt(self):
        rng = np.random.default_rng(4)
        data = _png_bytes(rng.integers(0, 256, (64, 64, 3), dtype=np.uint8))
        with pytest.raises(CorruptStreamError):
            decode_image(data[: len(data) // 2])

    def test_garbage_is_unsupported(self):
        with pytest.raises(UnsupportedFormatError):
            decode_image(b"\x00\x01\x02 definitely not an image")

    def test_recognized_but_unsupported_format(self):
        buf = io.BytesIO()
        PILImage.fromarray(np.zeros((8, 8), dtype=np.uint8)).save(buf, format="TIFF")
        with pytest.raises(UnsupportedFormatError):
            decode_image(buf.getvalue())

    def test_bmp_roundtrip_values(self):
        arr = np.arange(12, dtype=np.uint8).reshape(2, 2, 3) * 20
        buf = io.BytesIO()
        PILImage.fromarray(arr).save(buf, format="BMP")
        img = decode_image(buf.getvalue())
        assert np.allclose(np.stack(img.planes, axis=-1) * 255, arr)

    def test_lossless_roundtrip_bit_exact(self):
        rng = np.random.default_rng(7)
        arr = rng.integers(0, 256, size=(20, 30, 3), dtype=np.uint8)
        img = decode_image(_png_bytes(arr))
        again = decode_image(encode_png(img))
        for a, b in zip(img.planes, again.planes):
            assert np.array_equal(a, b)


class TestGamma:
    def test_fixed_points(self):
        img = _rgb([[0.0, 1.0]], [[0.0, 1.0]], [[0.0, 1.0]])
        for gamma in (0.5, 1.0, 2.2, 3.7):
            out = apply_gamma(img, gamma)
            assert out.planes[0].tolist() == [[0.0, 1.0]]
            assert out.space is ColorSpace.RGB_LINEAR

    def test_identity_gamma(self):
        rng = np.random.default_rng(0)
        v = rng.random((5, 4))
        img = _rgb(v, v, v)
        out = apply_gamma(img, 1.0)
        assert np.array_equal(out.planes[0], v)

    def test_half_to_the_2p2(self):
        img = _rgb([[0.5]], [[0.5]], [[0.5]])
        out = apply_gamma(img, 2.2)
        # frozen from an independent power evaluation
        assert out.planes[0][0, 0] == pytest.approx(0.217637640824031, abs=1e-12)

    def test_monotone_per_sample(self):
        rng = np.random.default_rng(3)
        v = np.sort(rng.random(64)).reshape(8, 8)
        out = apply_gamma(_rgb(v, v, v), 2.2).planes[0].ravel()
        assert np.all(np.diff(out) >= 0)

    def test_gamma_must_be_positive(self):
        img = _rgb([[0.5]], [[0.5]], [[0.5]])
        for bad in (0.0, -1.0):
            with pytest.raises(NonPositiveGammaError):
                apply_gamma(img, bad)


class TestOpponent:
    def test_achromatic(self):
        v = 0.25
        img = _rgb([[v]], [[v]], [[v]])
        i1, i2, i3 = to_opponent(img).planes
        assert i1[0, 0] == 0.0
        assert i2[0, 0] == 0.0
        assert i3[0, 0] == pytest.approx(3 * v)

    def test_pure_red(self):
        img = _rgb([[1.0]], [[0.0]], [[0.0]])
        i1, i2, i3 = to_opponent(img).planes
        assert (i1[0, 0], i2[0, 0], i3[0, 0]) == (1.0, 1.0, 1.0)

    def test_pure_blue(self):
        img = _rgb([[0.0]], [[0.0]], [[1.0]])
        i1, i2, i3 = to_opponent(img).planes
        assert (i1[0, 0], i2[0, 0], i3[0, 0]) == (0.0, -2.0, 1.0)

    def test_black_guard(self):
        img = _rgb([[0.0]], [[0.0]], [[0.0]])
        i1, i2, i3 = to_opponent(img).planes
        assert (i1[0, 0], i2[0, 0], i3[0, 0]) == (0.0, 0.0, 0.0)

    def test_invertible_above_black(self):
        rng = np.random.default_rng(11)
        r, g, b = rng.random((3, 12, 9)) * 0.9 + 0.05
        img = PlanarImage((r, g, b), ColorSpace.RGB_LINEAR)
        back = opponent_to_rgb(to_opponent(img))
        for orig, rec in zip(img.planes, back.planes):
            assert np.max(np.abs(orig - rec)) < 1e-10


class TestYiq:
    def test_gray_has_zero_chroma(self):
        v = 0.6
        y, i, q = to_yiq(_rgb([[v]], [[v]], [[v]])).planes
        assert y[0, 0] == pytest.approx(v, abs=1e-12)
        assert i[0, 0] == pytest.approx(0.0, abs=1e-12)
        assert q[0, 0] == pytest.approx(0.0, abs=1e-12)

    def test_zero(self):
        y, i, q = to_yiq(_rgb([[0.0]], [[0.0]], [[0.0]])).planes
        assert (y[0, 0], i[0, 0], q[0, 0]) == (0.0, 0.0, 0.0)

    def test_pure_red_matches_matrix_column(self):
        y, i, q = to_yiq(_rgb([[1.0]], [[0.0]], [[0.0]])).planes
        assert (y[0, 0], i[0, 0], q[0, 0]) == (0.299, 0.596, 0.211)

    def test_matrix_is_frozen(self):
        golden = [
            [0.299, 0.587, 0.114],
            [0.596, -0.274, -0.322],
            [0.211, -0.523, 0.312],
        ]
        assert YIQ_FROM_RGB.tolist() == golden

    def test_round_trip(self):
        rng = np.random.default_rng(5)
        r, g, b = rng.random((3, 6, 6))
        img = PlanarImage((r, g, b), ColorSpace.RGB_SRGB)
        back = yiq_to_rgb(to_yiq(img))
        for orig, rec in zip(img.planes, back.planes):
            assert np.max(np.abs(orig - rec)) < 1e-12


class TestResize:
    def test_constant_preserved(self):
        plane = np.full((5, 7), 0.37)
        out = resize_bicubic(plane, 13, 11)
        assert out.shape == (11, 13)
        assert np.max(np.abs(out - 0.37)) < 1e-12

    def test_identity_size(self):
        rng = np.random.default_rng(2)
        plane = rng.random((9, 6))
        out = resize_bicubic(plane, 6, 9)
        assert np.max(np.abs(out - plane)) < 1e-12

    def test_2x2_to_4x4_center_matches_scalar_oracle(self):
        plane = np.array([[0.0, 1.0], [2.0, 3.0]])
        out = resize_bicubic(plane, 4, 4)
        # frozen from an independent scalar evaluation of the Keys kernel
        # (a = -0.5, half-pixel centers, edge clamp)
        assert out[1, 1] == pytest.approx(0.609375, abs=1e-12)
        assert out[1, 2] == pytest.approx(1.203125, abs=1e-12)
        assert out[2, 1] == pytest.approx(1.796875, abs=1e-12)
        assert out[2, 2] == pytest.approx(2.390625, abs=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(EmptyPlaneError):
            resize_bicubic(np.zeros((0, 3)), 4, 4)
        with pytest.raises(EmptyPlaneError):
            resize_bicubic(np.zeros((3, 3)), 0, 4)


class TestMetricDownsample:
    def test_factor_one_identity(self):
        rng = np.random.default_rng(9)
        img = _rgb(*rng.random((3, 256, 256)))
        out = downsample_for_metric(img)
        assert out is img
        assert out.downsample_factor == 1

    def test_512_halves(self):
        img = _rgb(*np.random.default_rng(1).random((3, 512, 512)))
        out = downsample_for_metric(img)
        assert metric_downsample_factor(512, 512) == 2
        assert out.height == 256 and out.width == 256
        assert out.downsample_factor == 2

    def test_narrow_image_keeps_factor_one(self):
        assert metric_downsample_factor(100, 700) == 1

    def test_box_filter_averages(self):
        plane = np.arange(16, dtype=float).reshape(4, 4)
        img = PlanarImage((np.tile(plane, (130, 130)),) * 3, ColorSpace.RGB_SRGB)
        out = downsample_for_metric(img)
        expect = (plane[0, 0] + plane[0, 1] + plane[1, 0] + plane[1, 1]) / 4
        assert out.planes[0][0, 0] == pytest.approx(expect)


class TestPgm:
    def test_16bit_header_and_payload(self, tmp_path):
        plane = np.array([[0.0, 0.5], [0.25, 1.0]])
        path = tmp_path / "m.pgm"
        write_pgm(plane, path)
        raw = path.read_bytes()
        assert raw.startswith(b"P5\n2 2\n65535\n")
        payload = np.frombuffer(raw.split(b"65535\n", 1)[1], dtype=">u2")
        assert payload.tolist() == [0, 32768, 16384, 65535]
