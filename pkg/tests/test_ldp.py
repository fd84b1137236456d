import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ctpatch.features import ldp_map, ldp_vector
from ctpatch.features.ldp import NEIGHBOR_OFFSETS


def brute_ldp(pixels):
    """Per-pixel reference: replicate-clamped neighbors, bit n set when >= center."""
    p = np.asarray(pixels, dtype=int)
    h, w = p.shape
    out = np.zeros((h, w), dtype=int)
    for r in range(h):
        for c in range(w):
            code = 0
            for bit, (dr, dc) in enumerate(NEIGHBOR_OFFSETS):
                nr = min(max(r + dr, 0), h - 1)
                nc = min(max(c + dc, 0), w - 1)
                if p[nr, nc] >= p[r, c]:
                    code += 1 << bit
            out[r, c] = code
    return out


class TestLdpMap:
    def test_constant_patch_all_255(self):
        assert np.all(ldp_map(np.full((5, 5), 42, dtype=np.uint8)) == 255)

    def test_center_strictly_greater_gives_zero(self):
        patch = np.ones((3, 3), dtype=np.uint8)
        patch[1, 1] = 9
        assert ldp_map(patch)[1, 1] == 0

    def test_single_topleft_bit(self):
        # Only neighbor n=0 (top-left) satisfies neighbor >= center.
        patch = np.array([[9, 1, 1], [1, 5, 1], [1, 1, 1]], dtype=np.uint8)
        assert ldp_map(patch)[1, 1] == 1

    def test_each_bit_position(self):
        for bit, (dr, dc) in enumerate(NEIGHBOR_OFFSETS):
            patch = np.ones((3, 3), dtype=np.uint8)
            patch[1, 1] = 5
            patch[1 + dr, 1 + dc] = 7
            assert ldp_map(patch)[1, 1] == 1 << bit

    def test_output_shape_matches_input(self):
        patch = np.zeros((7, 7), dtype=np.uint8)
        assert ldp_map(patch).shape == (7, 7)

    @given(
        arrays(np.uint8, st.tuples(st.integers(1, 6), st.integers(1, 6)), elements=st.integers(0, 255))
    )
    @settings(max_examples=200)
    def test_matches_per_pixel_oracle(self, pixels):
        assert np.array_equal(ldp_map(pixels), brute_ldp(pixels))

    @given(
        arrays(np.uint8, st.tuples(st.integers(1, 8), st.integers(1, 8)), elements=st.integers(0, 255))
    )
    @settings(max_examples=100)
    def test_codes_in_byte_range(self, pixels):
        codes = ldp_map(pixels)
        assert codes.dtype == np.uint8
        assert codes.min() >= 0 and codes.max() <= 255


class TestLdpVector:
    @pytest.mark.parametrize("size,expected", [(16, 256), (32, 1024), (48, 2304), (64, 4096)])
    def test_lengths(self, size, expected):
        patch = np.zeros((size, size), dtype=np.uint8)
        assert ldp_vector(patch).length == expected

    def test_constant_patch_all_ones(self):
        fv = ldp_vector(np.full((16, 16), 3, dtype=np.uint8))
        assert np.all(fv.values == 1.0)
        assert fv.extractor == "LDP"
