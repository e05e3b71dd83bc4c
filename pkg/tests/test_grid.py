import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp
from PIL import Image

import oracles
from srblend.grid import (
    CorruptImageError,
    PixelGrid,
    UnsupportedImageError,
    crop_border,
    load_image,
    quantize,
    save_image,
    to_bytes,
    to_luma,
)

unit_floats = st.floats(0.0, 1.0, width=64, allow_nan=False)


def grids(min_side=1, max_side=8, channels=(1, 3), elements=unit_floats):
    return st.integers(min_side, max_side).flatmap(
        lambda h: st.integers(min_side, max_side).flatmap(
            lambda w: st.sampled_from(channels).flatmap(
                lambda c: hnp.arrays(np.float64, (h, w, c), elements=elements)
            )
        )
    ).map(PixelGrid)


class TestPixelGrid:
    def test_accepts_2d_as_single_channel(self):
        g = PixelGrid(np.zeros((3, 4)))
        assert (g.height, g.width, g.channels) == (3, 4, 1)

    def test_rejects_bad_channel_count(self):
        with pytest.raises(ValueError, match="channels"):
            PixelGrid(np.zeros((3, 4, 2)))

    def test_rejects_nan_and_inf(self):
        arr = np.zeros((2, 2, 1))
        arr[0, 0, 0] = np.nan
        with pytest.raises(ValueError, match="finite"):
            PixelGrid(arr)
        arr[0, 0, 0] = np.inf
        with pytest.raises(ValueError, match="finite"):
            PixelGrid(arr)

    def test_rejects_empty(self):
        with pytest.raises(ValueError, match="empty"):
            PixelGrid(np.zeros((0, 4, 1)))

    def test_immutable_and_decoupled_from_source(self):
        src = np.zeros((2, 2, 1))
        g = PixelGrid(src)
        src[0, 0, 0] = 1.0
        assert g.data[0, 0, 0] == 0.0
        with pytest.raises(ValueError):
            g.data[0, 0, 0] = 1.0


class TestQuantize:
    def test_half_rounds_away_from_zero(self):
        g = PixelGrid(np.full((1, 1, 1), 0.5))
        assert to_bytes(g)[0, 0, 0] == 128

    def test_clamps(self):
        g = PixelGrid(np.array([[[1.2], [-0.3], [0.0]]]))
        assert to_bytes(g).ravel().tolist() == [255, 0, 0]

    @given(grids(elements=st.floats(-0.5, 1.5, allow_nan=False)))
    def test_matches_scalar_oracle(self, g):
        expected = np.vectorize(oracles.quantize_value)(g.data)
        assert np.array_equal(to_bytes(g), expected)

    @given(grids())
    def test_quantized_values_are_255ths(self, g):
        q = quantize(g)
        assert np.array_equal(q.data * 255.0, np.round(q.data * 255.0))

    @given(grids())
    def test_idempotent(self, g):
        q = quantize(g)
        assert np.array_equal(quantize(q).data, q.data)


class TestPngRoundtrip:
    def test_all_255_bytes_load_as_ones(self, tmp_path):
        path = tmp_path / "white.png"
        Image.fromarray(np.full((2, 2, 3), 255, dtype=np.uint8)).save(path)
        g = load_image(path)
        assert g.channels == 3
        assert np.array_equal(g.data, np.ones((2, 2, 3)))

    def test_byte_128_loads_as_128_over_255(self, tmp_path):
        path = tmp_path / "gray.png"
        Image.fromarray(np.full((1, 1), 128, dtype=np.uint8), mode="L").save(path)
        assert load_image(path).data[0, 0, 0] == 128 / 255

    @given(grids())
    def test_save_load_identity_on_quantized_grids(self, tmp_path_factory, g):
        path = tmp_path_factory.mktemp("roundtrip") / "img.png"
        q = quantize(g)
        save_image(q, path)
        assert np.array_equal(load_image(path).data, q.data)

    def test_grayscale_roundtrip(self, tmp_path):
        g = quantize(PixelGrid(np.linspace(0, 1, 12).reshape(3, 4, 1)))
        save_image(g, tmp_path / "g.png")
        back = load_image(tmp_path / "g.png")
        assert back.channels == 1
        assert np.array_equal(back.data, g.data)

    def test_saved_bytes_match_to_bytes(self, tmp_path):
        g = PixelGrid(np.array([[[0.5], [1.2], [0.0]]]))
        save_image(g, tmp_path / "b.png")
        raw = np.array(Image.open(tmp_path / "b.png"))
        assert raw.ravel().tolist() == [128, 255, 0]


class TestLoadErrors:
    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_image(tmp_path / "nope.png")

    def test_not_a_png(self, tmp_path):
        path = tmp_path / "fake.png"
        path.write_bytes(b"definitely not a png")
        with pytest.raises(UnsupportedImageError, match="not a PNG"):
            load_image(path)

    def test_16_bit_rejected(self, tmp_path):
        path = tmp_path / "deep.png"
        Image.fromarray(np.zeros((2, 2), dtype=np.uint16)).save(path)
        with pytest.raises(UnsupportedImageError, match="bit depth"):
            load_image(path)

    def test_alpha_rejected_not_dropped(self, tmp_path):
        path = tmp_path / "rgba.png"
        Image.fromarray(np.zeros((2, 2, 4), dtype=np.uint8), mode="RGBA").save(path)
        with pytest.raises(UnsupportedImageError, match="alpha"):
            load_image(path)

    def test_palette_rejected(self, tmp_path):
        path = tmp_path / "pal.png"
        Image.fromarray(np.zeros((2, 2), dtype=np.uint8)).convert("P").save(path)
        with pytest.raises(UnsupportedImageError, match="palette"):
            load_image(path)

    def test_truncated_stream_is_corrupt(self, tmp_path):
        good = tmp_path / "good.png"
        Image.fromarray(np.arange(64, dtype=np.uint8).reshape(8, 8)).save(good)
        bad = tmp_path / "bad.png"
        bad.write_bytes(good.read_bytes()[:40])
        with pytest.raises(CorruptImageError):
            load_image(bad)

    def test_truncated_header_is_corrupt(self, tmp_path):
        bad = tmp_path / "short.png"
        bad.write_bytes(b"\x89PNG\r\n\x1a\n\x00\x00")
        with pytest.raises(CorruptImageError, match="truncated"):
            load_image(bad)


class TestLuma:
    def test_white(self):
        g = PixelGrid(np.ones((1, 1, 3)))
        assert to_luma(g).data[0, 0, 0] == pytest.approx(235 / 255, abs=1e-12)

    def test_black(self):
        g = PixelGrid(np.zeros((1, 1, 3)))
        assert to_luma(g).data[0, 0, 0] == pytest.approx(16 / 255, abs=1e-12)

    @given(unit_floats)
    def test_gray(self, v):
        g = PixelGrid(np.full((1, 1, 3), v))
        assert to_luma(g).data[0, 0, 0] == pytest.approx((219 * v + 16) / 255, abs=1e-12)

    @given(grids(channels=(3,)))
    def test_range_and_oracle(self, g):
        y = to_luma(g)
        assert y.channels == 1
        assert np.all(y.data >= 16 / 255 - 1e-12)
        assert np.all(y.data <= 235 / 255 + 1e-12)
        expected = oracles.luma_value(
            g.data[0, 0, 0], g.data[0, 0, 1], g.data[0, 0, 2]
        )
        assert y.data[0, 0, 0] == pytest.approx(expected, abs=1e-12)

    def test_wrong_channel_count(self):
        with pytest.raises(ValueError, match="3-channel"):
            to_luma(PixelGrid(np.zeros((2, 2, 1))))


class TestCropBorder:
    def test_zero_margin_identity(self, rng):
        g = PixelGrid(rng.random((5, 7, 3)))
        assert np.array_equal(crop_border(g, 0).data, g.data)

    def test_central_block(self):
        g = PixelGrid(np.arange(100, dtype=np.float64).reshape(10, 10, 1) / 100)
        c = crop_border(g, 4)
        assert (c.height, c.width) == (2, 2)
        assert np.array_equal(c.data, g.data[4:6, 4:6, :])

    def test_margin_too_large(self):
        g = PixelGrid(np.zeros((10, 10, 1)))
        with pytest.raises(ValueError, match="too large"):
            crop_border(g, 5)

    def test_negative_margin(self):
        with pytest.raises(ValueError, match="non-negative"):
            crop_border(PixelGrid(np.zeros((4, 4, 1))), -1)
