import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from srblend.grid import PixelGrid
from srblend.resample import cubic_kernel, downscale, upscale

# Expected values frozen from an independent brute-force run
# (python3 tests/oracles.py).
SPIKE_DOWN4 = np.array(
    [
        [[0.00412970781326294], [0.04382818937301636]],
        [[0.00221174955368042], [0.02347308397293091]],
    ]
)
RAMP_ROW_DOWN4 = [
    0.09790039062499999,
    0.36570638020833335,
    0.63429361979166665,
    0.90209960937500000,
]
TWO_UP2_INPUT = np.array(
    [
        [[0.82484672098382239], [0.77681618881234538]],
        [[0.02624001760669448], [0.30127672795820004]],
    ]
)
TWO_UP2 = np.array(
    [
        [
            [0.88597309683809200],
            [0.86662843341506013],
            [0.82462287855361904],
            [0.80527821513058717],
        ],
        [
            [0.66139276160101490],
            [0.66620321122062520],
            [0.67664875896606502],
            [0.68145920858567532],
        ],
        [
            [0.17373260508621871],
            [0.23099415731270986],
            [0.35533352786166211],
            [0.41259508008815327],
        ],
        [
            [-0.05084773015085847],
            [0.03056893511827512],
            [0.20735940827410806],
            [0.28877607354324164],
        ],
    ]
)


class TestCubicKernel:
    def test_anchor_points(self):
        assert cubic_kernel(np.array([0.0]))[0] == 1.0
        assert cubic_kernel(np.array([1.0]))[0] == 0.0
        assert cubic_kernel(np.array([2.0]))[0] == 0.0
        assert cubic_kernel(np.array([2.5]))[0] == 0.0

    def test_frozen_half_value(self):
        assert cubic_kernel(np.array([0.5]))[0] == pytest.approx(0.5625, abs=1e-15)

    @given(st.floats(-3.0, 3.0, allow_nan=False))
    def test_matches_piecewise_oracle(self, x):
        got = cubic_kernel(np.array([x]))[0]
        assert got == pytest.approx(oracles.cubic_value(x), abs=1e-12)

    @given(st.floats(0.0, 3.0, allow_nan=False))
    def test_even_symmetry(self, x):
        pair = cubic_kernel(np.array([x, -x]))
        assert pair[0] == pair[1]

    def test_cardinal_interpolation_on_integer_lattice(self):
        # At integer offsets the kernel is the Kronecker delta, so plain
        # upscaling reproduces samples wherever a source pixel lands exactly.
        xs = cubic_kernel(np.array([-2.0, -1.0, 0.0, 1.0, 2.0]))
        assert xs.tolist() == [0.0, 0.0, 1.0, 0.0, 0.0]


class TestFrozenArrays:
    def test_spike_downscale(self):
        spike = np.zeros((8, 8, 1))
        spike[3, 5, 0] = 1.0
        got = downscale(PixelGrid(spike), 4)
        np.testing.assert_allclose(got.data, SPIKE_DOWN4, atol=1e-15)

    def test_ramp_downscale(self):
        ramp = np.tile(np.linspace(0.0, 1.0, 16)[np.newaxis, :, np.newaxis], (8, 1, 1))
        got = downscale(PixelGrid(ramp), 4)
        assert got.data.shape == (2, 4, 1)
        for row in range(2):
            np.testing.assert_allclose(got.data[row, :, 0], RAMP_ROW_DOWN4, atol=1e-15)

    def test_two_by_two_upscale(self):
        got = upscale(PixelGrid(TWO_UP2_INPUT), 2)
        np.testing.assert_allclose(got.data, TWO_UP2, atol=1e-15)

    def test_upscale_may_overshoot_unit_range(self):
        # The frozen 2x2 case produces a value below zero; the resampler must
        # report it rather than clamp (quantization happens downstream).
        got = upscale(PixelGrid(TWO_UP2_INPUT), 2)
        assert got.data.min() < 0.0


class TestAgainstBruteForce:
    @settings(max_examples=25)
    @given(
        st.integers(1, 4),
        st.integers(1, 4),
        st.sampled_from([1, 3]),
        st.sampled_from([2, 3, 4]),
        st.integers(0, 2**32 - 1),
    )
    def test_upscale_matches_oracle(self, h, w, c, scale, seed):
        arr = np.random.default_rng(seed).random((h, w, c))
        got = upscale(PixelGrid(arr), scale)
        expected = oracles.upscale_bruteforce(arr, scale)
        assert got.data.shape == (h * scale, w * scale, c)
        np.testing.assert_allclose(got.data, expected, atol=1e-12)

    @settings(max_examples=25)
    @given(
        st.integers(1, 3),
        st.integers(1, 3),
        st.sampled_from([1, 3]),
        st.sampled_from([2, 3, 4]),
        st.integers(0, 2**32 - 1),
    )
    def test_downscale_matches_oracle(self, hb, wb, c, scale, seed):
        h, w = hb * scale, wb * scale
        arr = np.random.default_rng(seed).random((h, w, c))
        got = downscale(PixelGrid(arr), scale)
        expected = oracles.downscale_bruteforce(arr, scale)
        assert got.data.shape == (hb, wb, c)
        np.testing.assert_allclose(got.data, expected, atol=1e-12)


class TestAnalyticProperties:
    @given(st.floats(0.0, 1.0, allow_nan=False), st.sampled_from([2, 3, 4]))
    def test_constant_preserved_by_upscale(self, v, scale):
        g = PixelGrid(np.full((3, 5, 1), v))
        got = upscale(g, scale)
        np.testing.assert_allclose(got.data, v, atol=1e-12)

    @given(st.floats(0.0, 1.0, allow_nan=False), st.sampled_from([2, 3, 4]))
    def test_constant_preserved_by_downscale(self, v, scale):
        g = PixelGrid(np.full((3 * scale, 2 * scale, 3), v))
        got = downscale(g, scale)
        np.testing.assert_allclose(got.data, v, atol=1e-12)

    def test_downscale_interior_of_linear_ramp_is_linear(self):
        # Away from the clamped edges, cubic resampling reproduces degree-1
        # polynomials exactly: interior samples sit on the same line.
        n = 32
        ramp = np.tile(
            np.linspace(0.0, 1.0, n)[np.newaxis, :, np.newaxis], (8, 1, 1)
        )
        got = downscale(PixelGrid(ramp), 4).data[0, :, 0]
        centers = (np.arange(n // 4) + 0.5) * 4 - 0.5
        expected = centers / (n - 1)
        np.testing.assert_allclose(got[2:-2], expected[2:-2], atol=1e-12)

    def test_upscale_interior_of_linear_ramp_is_linear(self):
        n = 16
        ramp = np.tile(
            np.linspace(0.0, 1.0, n)[np.newaxis, :, np.newaxis], (4, 1, 1)
        )
        got = upscale(PixelGrid(ramp), 2).data[0, :, 0]
        centers = (np.arange(n * 2) + 0.5) * 0.5 - 0.5
        expected = centers / (n - 1)
        np.testing.assert_allclose(got[4:-4], expected[4:-4], atol=1e-12)

    def test_channels_processed_independently(self, rng):
        arr = rng.random((4, 4, 3))
        whole = downscale(PixelGrid(arr), 2).data
        for ch in range(3):
            single = downscale(PixelGrid(arr[:, :, ch : ch + 1]), 2).data
            np.testing.assert_array_equal(whole[:, :, ch : ch + 1], single)

    def test_antialias_widens_downscale_footprint(self):
        # With the kernel stretched by the scale factor, a downscaled spike
        # spreads into every output pixel of an 8->2 reduction; an unstretched
        # kernel (radius 2) could not reach across the whole image.
        spike = np.zeros((8, 8, 1))
        spike[3, 5, 0] = 1.0
        got = downscale(PixelGrid(spike), 4)
        assert np.all(np.abs(got.data) > 0.0)


class TestValidation:
    def test_downscale_requires_divisible_dims(self):
        with pytest.raises(ValueError, match="divisible"):
            downscale(PixelGrid(np.zeros((9, 8, 1))), 4)
        with pytest.raises(ValueError, match="divisible"):
            downscale(PixelGrid(np.zeros((8, 10, 1))), 4)

    def test_scale_must_be_at_least_two(self):
        g = PixelGrid(np.zeros((4, 4, 1)))
        for bad in (0, 1, -2):
            with pytest.raises(ValueError, match="scale"):
                upscale(g, bad)
            with pytest.raises(ValueError, match="scale"):
                downscale(g, bad)

    def test_downscale_to_single_pixel(self):
        g = PixelGrid(np.linspace(0, 1, 16).reshape(4, 4, 1))
        got = downscale(g, 4)
        assert got.data.shape == (1, 1, 1)
        expected = oracles.downscale_bruteforce(g.data, 4)
        np.testing.assert_allclose(got.data, expected, atol=1e-12)
