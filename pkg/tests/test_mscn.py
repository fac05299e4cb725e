import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_image, make_plane
from fusedetect.errors import DegenerateGlcmError, TooSmallError
from fusedetect.mscn import (
    DEFAULT_CLIP,
    DEFAULT_LEVELS,
    ORIENTATIONS,
    MscnMap,
    extract_mscn_features,
    gaussian_kernel,
    glcm_compute,
    haralick_features,
    mscn_transform,
    quantize_mscn,
)
from oracles import glcm_bruteforce, haralick_oracle, naive_mscn


def mscn_of(arr):
    return mscn_transform(make_plane(arr))


# ---------------------------------------------------------------- transform


def test_gaussian_kernel_unit_sum():
    k = gaussian_kernel()
    assert k.shape == (7,)
    assert abs(k.sum() - 1.0) < 1e-12
    assert np.array_equal(k, k[::-1])  # symmetric taps


def test_mscn_constant_plane_is_zero():
    m = mscn_of(np.full((10, 12), 137.0))
    assert m.coeffs.shape == (10, 12)
    assert np.all(m.coeffs == 0.0)


def test_mscn_single_bright_pixel():
    a = np.zeros((15, 15))
    a[7, 7] = 255.0
    m = mscn_of(a)
    assert m.coeffs[7, 7] > 0
    # the bright pixel dominates its own window
    assert m.coeffs[7, 7] == m.coeffs.max()
    expected = naive_mscn(a)
    assert np.max(np.abs(m.coeffs - expected)) < 1e-9


def test_mscn_matches_naive_oracle_random(rng):
    a = rng.integers(0, 256, size=(24, 31)).astype(np.float64)
    m = mscn_of(a)
    expected = naive_mscn(a)
    assert np.max(np.abs(m.coeffs - expected)) < 1e-9


def test_mscn_matches_naive_oracle_smooth(rng):
    # smooth gradient plus texture, closer to a photograph
    r = np.arange(20)[:, None]
    c = np.arange(26)[None, :]
    a = 100.0 + 3.0 * r + 2.0 * c + 10.0 * rng.standard_normal((20, 26))
    a = np.clip(a, 0, 255)
    m = mscn_of(a)
    expected = naive_mscn(a)
    assert np.max(np.abs(m.coeffs - expected)) < 1e-9


def test_mscn_mean_near_zero_for_textured_plane(rng):
    a = rng.integers(0, 256, size=(64, 64)).astype(np.float64)
    m = mscn_of(a)
    assert -0.5 <= float(m.coeffs.mean()) <= 0.5


def test_mscn_too_small():
    with pytest.raises(TooSmallError):
        mscn_of(np.zeros((6, 20)))
    with pytest.raises(TooSmallError):
        mscn_of(np.zeros((20, 6)))


# ----------------------------------------------------------------- quantize


def quantize_values(values, levels=DEFAULT_LEVELS, clip=DEFAULT_CLIP):
    a = np.atleast_2d(np.asarray(values, dtype=np.float64))
    m = MscnMap(width=a.shape[1], height=a.shape[0], coeffs=a)
    return quantize_mscn(m, levels=levels, clip=clip)


def test_quantize_reference_points():
    bins = quantize_values([0.0, -5.0, 3.0, -3.0])
    assert bins.tolist() == [[8, 0, 15, 0]]


def test_quantize_monotone_and_bounded(rng):
    v = np.sort(rng.uniform(-6, 6, size=200))
    bins = quantize_values(v)[0]
    assert bins.min() >= 0 and bins.max() <= 15
    assert np.all(np.diff(bins) >= 0)


@given(
    st.floats(min_value=-100, max_value=100, allow_nan=False),
    st.integers(min_value=2, max_value=64),
)
def test_quantize_always_in_range(value, levels):
    bins = quantize_values([value], levels=levels)
    assert 0 <= bins[0, 0] <= levels - 1


def test_quantize_rejects_bad_params():
    with pytest.raises(ValueError):
        quantize_values([0.0], levels=1)
    with pytest.raises(ValueError):
        quantize_values([0.0], clip=0.0)


# --------------------------------------------------------------------- glcm


def test_glcm_constant_plane():
    bins = np.full((9, 9), 5, dtype=np.int64)
    for orientation in ORIENTATIONS:
        g = glcm_compute(bins, orientation, distance=1, levels=16)
        assert g.matrix[5, 5] == 1.0
        assert g.matrix.sum() == 1.0
        assert np.count_nonzero(g.matrix) == 1


def test_glcm_horizontal_checkerboard():
    bins = np.indices((8, 8)).sum(axis=0) % 2
    g = glcm_compute(bins, 0, distance=1, levels=2)
    assert g.matrix[0, 1] == 0.5
    assert g.matrix[1, 0] == 0.5
    assert g.matrix[0, 0] == 0.0
    assert g.matrix[1, 1] == 0.0


def test_glcm_matches_bruteforce_battery(rng):
    for _ in range(100):
        bins = rng.integers(0, 16, size=(16, 16))
        for orientation in ORIENTATIONS:
            g = glcm_compute(bins, orientation, distance=1, levels=16)
            expected = glcm_bruteforce(bins, orientation, distance=1, levels=16)
            assert np.array_equal(g.matrix, expected)


def test_glcm_symmetric_and_normalized(rng):
    bins = rng.integers(0, 16, size=(20, 13))
    for orientation in ORIENTATIONS:
        g = glcm_compute(bins, orientation, levels=16)
        assert np.all(g.matrix >= 0)
        assert abs(g.matrix.sum() - 1.0) < 1e-12
        assert np.array_equal(g.matrix, g.matrix.T)


def test_glcm_degenerate_geometry():
    row = np.zeros((1, 8), dtype=np.int64)
    with pytest.raises(DegenerateGlcmError):
        glcm_compute(row, 90, distance=1, levels=16)
    with pytest.raises(DegenerateGlcmError):
        glcm_compute(np.zeros((4, 4), dtype=np.int64), 0, distance=4, levels=16)


def test_glcm_rejects_bad_params():
    bins = np.zeros((8, 8), dtype=np.int64)
    with pytest.raises(ValueError):
        glcm_compute(bins, 30)
    with pytest.raises(ValueError):
        glcm_compute(bins, 0, distance=0)


# ----------------------------------------------------------------- haralick


def haralick_of_matrix(matrix, orientation=0):
    from fusedetect.mscn import Glcm

    return haralick_features(
        Glcm(levels=matrix.shape[0], matrix=matrix, orientation=orientation, distance=1)
    )


def test_haralick_constant_convention():
    m = np.zeros((16, 16))
    m[5, 5] = 1.0
    h = haralick_of_matrix(m)
    assert h.as_tuple() == (0.0, 0.0, 1.0, 1.0, 1.0, 1.0)


def test_haralick_checkerboard_hand_values():
    m = np.array([[0.0, 0.5], [0.5, 0.0]])
    h = haralick_of_matrix(m)
    assert h.contrast == 1.0
    assert h.dissimilarity == 1.0
    assert h.homogeneity == 0.5
    assert h.asm == 0.5
    assert abs(h.energy - math.sqrt(0.5)) < 1e-15
    assert abs(h.energy - 0.70711) < 1e-5
    assert h.correlation == -1.0


def test_haralick_matches_oracle_battery(rng):
    for _ in range(50):
        raw = rng.random((16, 16))
        raw = raw + raw.T  # symmetric like real accumulation
        m = raw / raw.sum()
        got = haralick_of_matrix(m).as_tuple()
        expected = haralick_oracle(m)
        for a, b in zip(got, expected):
            assert math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12)


def test_haralick_invariant_ranges(rng):
    for _ in range(20):
        raw = rng.random((16, 16))
        raw = raw + raw.T
        m = raw / raw.sum()
        h = haralick_of_matrix(m)
        assert 0 < h.homogeneity <= 1.0 + 1e-12
        assert 0 < h.asm <= 1.0
        assert abs(h.energy * h.energy - h.asm) < 1e-12
        assert -1.0 - 1e-9 <= h.correlation <= 1.0 + 1e-9
        assert h.contrast >= 0
        assert h.dissimilarity >= 0


def test_haralick_homogeneity_one_iff_diagonal(rng):
    diag = np.zeros((8, 8))
    diag[np.arange(8), np.arange(8)] = 1.0 / 8
    assert haralick_of_matrix(diag).homogeneity == 1.0
    off = np.zeros((8, 8))
    off[0, 1] = off[1, 0] = 0.5
    assert haralick_of_matrix(off).homogeneity < 1.0


# --------------------------------------------------------------- extraction


def test_extract_length_and_finite(rng):
    img = make_image(rng.integers(0, 256, size=(32, 40, 3)))
    fv = extract_mscn_features(img)
    assert fv.extractor_id == "mscn"
    assert len(fv) == 72
    assert np.all(np.isfinite(fv.values))


def test_extract_constant_image_tiled_pattern():
    img = make_image(np.full((16, 16, 3), 90, dtype=np.uint8))
    fv = extract_mscn_features(img)
    expected = np.tile([0.0, 0.0, 1.0, 1.0, 1.0, 1.0], 12)
    assert np.array_equal(fv.values, expected)


def test_extract_channel_major_order(rng):
    # make the red channel constant; its 24 values must be the degenerate
    # pattern while the others are not
    data = rng.integers(0, 256, size=(24, 24, 3)).astype(np.uint8)
    data[:, :, 0] = 50
    fv = extract_mscn_features(make_image(data))
    expected_red = np.tile([0.0, 0.0, 1.0, 1.0, 1.0, 1.0], 4)
    assert np.array_equal(fv.values[:24], expected_red)
    assert not np.array_equal(fv.values[24:48], expected_red)


def test_extract_deterministic(rng):
    data = rng.integers(0, 256, size=(20, 20, 3)).astype(np.uint8)
    a = extract_mscn_features(make_image(data))
    b = extract_mscn_features(make_image(data.copy()))
    assert a.values.tobytes() == b.values.tobytes()


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_extract_feature_invariants(seed):
    data = np.random.default_rng(seed).integers(0, 256, size=(12, 12, 3))
    fv = extract_mscn_features(make_image(data.astype(np.uint8)))
    v = fv.values.reshape(3, 4, 6)
    assert np.all(v[:, :, 2] > 0) and np.all(v[:, :, 2] <= 1.0 + 1e-12)  # homogeneity
    assert np.all(v[:, :, 3] > 0) and np.all(v[:, :, 3] <= 1.0)  # asm
    assert np.max(np.abs(v[:, :, 4] ** 2 - v[:, :, 3])) < 1e-12  # energy^2 = asm
    assert np.all(v[:, :, 0] >= 0) and np.all(v[:, :, 1] >= 0)
