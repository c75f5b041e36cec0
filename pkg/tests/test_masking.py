import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from dcs import kernels
from dcs.masking import (
    GridShape,
    MaskSpec,
    MaskVec,
    MaskedPair,
    blind_spot_mask,
    draw_mask,
    make_masked_pair,
    tau_amn_mask,
)
from dcs.numerics import RngStream


class TestDrawMask:
    def test_bernoulli_mean(self):
        rng = RngStream(0, 20)
        dim, rho = 10**5, 0.1
        fracs = [draw_mask(rng, dim, rho).popcount / dim for _ in range(100)]
        assert abs(np.mean(fracs) - rho) < 0.003

    def test_rho_domain_edges(self):
        assert draw_mask(RngStream(1), 100, 0.999).popcount >= 1
        for bad in (0.0, 1.0, -0.1, 1.5):
            with pytest.raises(ValueError):
                draw_mask(RngStream(1), 100, bad)

    def test_redraw_guarantees_popcount(self):
        rng = RngStream(0, 21)
        for _ in range(200):
            assert draw_mask(rng, 3, 0.05).popcount >= 1

    def test_min_popcount(self):
        rng = RngStream(0, 22)
        for _ in range(50):
            assert draw_mask(rng, 4, 0.1, min_popcount=2).popcount >= 2

    def test_per_coordinate_probability(self):
        rng = RngStream(0, 23)
        dim, rho, n = 32, 0.2, 10**4
        counts = np.zeros(dim)
        for _ in range(n):
            counts += draw_mask(rng, dim, rho).bits
        se = np.sqrt(rho * (1 - rho) / n)
        assert np.max(np.abs(counts / n - rho)) < 4 * se


class TestMaskVecInvariants:
    def test_bits_validated(self):
        with pytest.raises(ValueError):
            MaskVec(bits=np.array([0, 2, 1]), rho=0.5)
        with pytest.raises(ValueError):
            MaskVec(bits=np.array([0, 1]), rho=1.5)

    def test_popcount(self):
        assert MaskVec(bits=np.array([1, 0, 1, 1]), rho=0.5).popcount == 3


class TestBlindSpotMask:
    def test_unmasked_coordinates_copied_exactly(self, rng):
        x = rng.generator.uniform(0, 1, 64)
        pair = blind_spot_mask(rng.child(1), x, GridShape(8, 8), 0.3)
        off = pair.mask.bits == 0
        np.testing.assert_array_equal(pair.x[off], pair.x_tilde[off])

    def test_constant_image_unchanged(self, rng):
        x = np.full(36, 7.0)
        pair = blind_spot_mask(rng.child(2), x, GridShape(6, 6), 0.5)
        np.testing.assert_array_equal(pair.x_tilde, x)

    def test_center_replacement_uniform_over_neighbors(self):
        # exhaustive oracle: the 3x3 center has exactly the 8 other pixels
        # as its mini-patch; their draw frequencies must be uniform
        x = np.arange(9, dtype=np.float64)
        bits = np.zeros(9, dtype=np.uint8)
        bits[4] = 1
        gen = RngStream(0, 24).generator
        neighbors = [0, 1, 2, 3, 5, 6, 7, 8]
        counts = {v: 0 for v in neighbors}
        n = 10**4
        for _ in range(n):
            out = kernels.grid_neighbor_replace(x, bits, gen.random(1), 3, 3, 1)
            assert out[4] != 4.0
            counts[int(out[4])] += 1
        result = stats.chisquare(list(counts.values()))
        assert result.pvalue > 0.01

    def test_corner_replacement_set(self):
        # corner of a 3x3 image has 3 clipped-patch neighbors: 1, 3, 4
        x = np.arange(9, dtype=np.float64)
        bits = np.zeros(9, dtype=np.uint8)
        bits[0] = 1
        gen = RngStream(0, 25).generator
        seen = set()
        for _ in range(500):
            out = kernels.grid_neighbor_replace(x, bits, gen.random(1), 3, 3, 1)
            seen.add(int(out[0]))
        assert seen == {1, 3, 4}

    def test_single_pixel_image_rejected(self, rng):
        with pytest.raises(ValueError):
            blind_spot_mask(rng, np.array([1.0]), GridShape(1, 1), 0.5)

    def test_shape_mismatch_rejected(self, rng):
        with pytest.raises(ValueError):
            blind_spot_mask(rng, np.ones(10), GridShape(3, 3), 0.5)

    def test_patch_radius_validated(self, rng):
        with pytest.raises(ValueError):
            blind_spot_mask(rng, np.ones(9), GridShape(3, 3), 0.5, patch_radius=0)


class TestTauAmnMask:
    def test_neighbors_within_window(self):
        # delta=2: every replacement comes from at most 4 in-range steps
        delta = 2
        gen = RngStream(0, 26).generator
        x = np.arange(50, dtype=np.float64)
        for _ in range(100):
            bits = (gen.random(50) < 0.3).astype(np.uint8)
            if bits.sum() == 0:
                continue
            u = gen.random(int(bits.sum()))
            out = kernels.window_neighbor_replace(x, bits, u, delta)
            for t in np.nonzero(bits)[0]:
                src = int(out[t])
                assert src != t
                assert abs(src - t) <= delta

    def test_unselected_steps_unchanged(self, rng):
        x = rng.generator.uniform(-1, 1, 40)
        pair = tau_amn_mask(rng.child(3), x, 0.3, 2)
        off = pair.mask.bits == 0
        np.testing.assert_array_equal(pair.x[off], pair.x_tilde[off])

    def test_constant_sequence_unchanged(self, rng):
        x = np.full(30, 2.5)
        pair = tau_amn_mask(rng.child(4), x, 0.4, 2)
        np.testing.assert_array_equal(pair.x_tilde, x)

    def test_short_sequence_rejected(self, rng):
        with pytest.raises(ValueError):
            tau_amn_mask(rng, np.array([1.0]), 0.5, 2)

    def test_delta_validated(self, rng):
        with pytest.raises(ValueError):
            tau_amn_mask(rng, np.ones(10), 0.5, 0)


class TestMaskedPairInvariants:
    def test_mismatched_pair_rejected(self):
        mask = MaskVec(bits=np.array([1, 0, 0]), rho=0.5)
        x = np.array([1.0, 2.0, 3.0])
        bad = np.array([9.0, 2.5, 3.0])  # differs at an unmasked coordinate
        with pytest.raises(ValueError):
            MaskedPair(x=x, x_tilde=bad, mask=mask)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**31), rho=st.floats(0.05, 0.9), dim=st.integers(4, 64))
    def test_measure_preserving_on_unmasked(self, seed, rho, dim):
        rng = RngStream(seed, 27)
        x = rng.generator.uniform(-5, 5, dim)
        pair = tau_amn_mask(rng.child(0), x, rho, 2)
        off = pair.mask.bits == 0
        assert float(np.sum(np.abs(pair.x[off] - pair.x_tilde[off]))) == 0.0


class TestMaskSpecDispatch:
    def test_bsm_requires_grid(self, rng):
        with pytest.raises(ValueError):
            make_masked_pair(rng, np.ones(9), MaskSpec(kind="bsm", grid=None))

    def test_dispatch(self, rng):
        spec = MaskSpec(kind="tau-amn", rho=0.3, delta=2)
        pair = make_masked_pair(rng.child(5), rng.generator.uniform(0, 1, 20), spec)
        assert pair.dim == 20

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            MaskSpec(kind="checkerboard")
