import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from srblend.backend import KIND_NEAREST, BackendSpec, run_backend
from srblend.d4 import (
    K,
    TRANSFORM_IDS,
    apply_transform,
    inverse_of,
    self_ensemble,
    self_ensemble_batch,
)
from srblend.grid import PixelGrid

# Frozen from the brute-force search in tests/oracles.py.
INVERSE_TABLE = [0, 3, 2, 1, 4, 5, 6, 7]


def _labels(h=3, w=4):
    return [[10 * r + c for c in range(w)] for r in range(h)]


def _as_grid(rows):
    return PixelGrid(np.asarray(rows, dtype=np.float64)[:, :, np.newaxis] / 100.0)


def _as_rows(grid):
    return [
        [int(round(v * 100.0)) for v in row] for row in grid.data[:, :, 0].tolist()
    ]


class TestGroupStructure:
    def test_eight_transforms(self):
        assert K == 8
        assert TRANSFORM_IDS == tuple(range(8))

    def test_identity_is_k0(self, rng):
        g = PixelGrid(rng.random((3, 5, 3)))
        np.testing.assert_array_equal(apply_transform(0, g).data, g.data)

    @pytest.mark.parametrize("k", range(8))
    def test_matches_list_oracle(self, k):
        rows = _labels()
        got = _as_rows(apply_transform(k, _as_grid(rows)))
        assert got == oracles.apply_d4(k, rows)

    def test_all_eight_distinct_on_asymmetric_image(self):
        grid = _as_grid(_labels())
        seen = {tuple(map(tuple, _as_rows(apply_transform(k, grid)))) for k in range(8)}
        assert len(seen) == 8

    def test_inverse_table_frozen(self):
        assert [inverse_of(k) for k in range(8)] == INVERSE_TABLE
        assert oracles.d4_inverse_table() == INVERSE_TABLE

    @pytest.mark.parametrize("k", range(8))
    def test_roundtrip_bit_exact(self, k, rng):
        g = PixelGrid(rng.random((5, 7, 3)))
        back = apply_transform(inverse_of(k), apply_transform(k, g))
        np.testing.assert_array_equal(back.data, g.data)

    @pytest.mark.parametrize("k", range(8))
    def test_shapes(self, k):
        g = PixelGrid(np.zeros((3, 5, 1)))
        t = apply_transform(k, g)
        if k % 2 == 0:
            assert (t.height, t.width) == (3, 5)
        else:
            assert (t.height, t.width) == (5, 3)

    def test_rejects_bad_transform_id(self):
        g = PixelGrid(np.zeros((2, 2, 1)))
        for bad in (-1, 8, 100):
            with pytest.raises(ValueError, match="transform"):
                apply_transform(bad, g)
            with pytest.raises(ValueError, match="transform"):
                inverse_of(bad)

    @settings(max_examples=32)
    @given(st.integers(0, 7), st.integers(0, 7), st.integers(0, 2**32 - 1))
    def test_composition_stays_in_group(self, k1, k2, seed):
        # Applying two transforms equals applying some single transform:
        # closure of the dihedral group.
        arr = np.random.default_rng(seed).random((3, 4, 1))
        g = PixelGrid(arr)
        composed = apply_transform(k2, apply_transform(k1, g)).data
        matches = [
            k
            for k in range(8)
            if apply_transform(k, g).data.shape == composed.shape
            and np.array_equal(apply_transform(k, g).data, composed)
        ]
        assert len(matches) >= 1


class TestSelfEnsemble:
    def _nearest_spec(self, scale=2):
        return BackendSpec(id="builtin-nearest", kind=KIND_NEAREST, scale=scale)

    def test_equivariant_backend_equals_direct_run(self, rng):
        # Nearest-neighbour commutes with every dihedral transform, so the
        # 8-way average must reproduce the plain output (up to accumulation
        # rounding from the 8-term mean).
        lr = PixelGrid(rng.random((6, 9, 3)))
        spec = self._nearest_spec()
        direct = run_backend(spec, lr)
        ens = self_ensemble(spec, lr)
        assert ens.data.shape == direct.data.shape
        np.testing.assert_allclose(ens.data, direct.data, atol=1e-12)

    def test_output_dims(self, rng):
        lr = PixelGrid(rng.random((4, 7, 1)))
        out = self_ensemble(self._nearest_spec(3), lr)
        assert (out.height, out.width, out.channels) == (12, 21, 1)

    def test_batch_matches_single(self, rng):
        spec = self._nearest_spec()
        images = [("a", PixelGrid(rng.random((3, 5, 3)))),
                  ("b", PixelGrid(rng.random((4, 4, 3))))]
        batch = self_ensemble_batch(spec, images)
        assert [image_id for image_id, _ in batch] == ["a", "b"]
        for (_, got), (_, lr) in zip(batch, images):
            np.testing.assert_array_equal(got.data, self_ensemble(spec, lr).data)

    def test_batch_empty(self):
        assert self_ensemble_batch(self._nearest_spec(), []) == []

    def test_batch_single_external_invocation(self, write_backend_script, rng):
        # All 8 variants of every image must travel through one backend batch.
        from conftest import NEAREST_BODY

        command = write_backend_script(NEAREST_BODY)
        spec = BackendSpec(id="ext", kind="external", scale=2, command=command)
        lr = PixelGrid(quant(rng.random((4, 6, 3))))
        got = self_ensemble(spec, lr)
        # On an 8-bit-representable input, the subprocess round trip is
        # lossless, so the external run must agree bit-for-bit with the
        # builtin equivalent.
        ref = self_ensemble(self._nearest_spec(), lr)
        np.testing.assert_array_equal(got.data, ref.data)

    def test_averages_variant_outputs(self, rng):
        # For a backend that is NOT equivariant the ensemble must differ from
        # the direct output — the mean of 8 genuinely different variants.
        from srblend.backend import KIND_BICUBIC

        lr = PixelGrid(rng.random((6, 6, 1)))
        spec = BackendSpec(id="builtin-bicubic", kind=KIND_BICUBIC, scale=2)
        direct = run_backend(spec, lr)
        ens = self_ensemble(spec, lr)
        assert not np.array_equal(ens.data, direct.data)

    def test_symmetric_input_under_equivariant_backend(self):
        # A fully symmetric image is a fixed point of the whole pipeline.
        lr = PixelGrid(np.full((4, 4, 1), 0.25))
        out = self_ensemble(self._nearest_spec(), lr)
        np.testing.assert_allclose(out.data, 0.25, atol=1e-12)


def quant(arr):
    return np.floor(np.clip(arr, 0.0, 1.0) * 255.0 + 0.5) / 255.0
