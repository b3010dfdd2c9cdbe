import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqslam.diffmatrix import DifferenceMatrix, build_difference_matrix, enhance_matrix
from seqslam.matrixio import read_matrix, write_matrix

from conftest import make_traverse, random_images


# ---------------------------------------------------------------- oracles


def sad_oracle(ref_images, query_images):
    """Brute-force double loop over (r, q) pairs."""
    n, m = len(ref_images), len(query_images)
    h, w = ref_images[0].shape
    out = np.zeros((n, m))
    for r in range(n):
        for q in range(m):
            out[r, q] = np.abs(ref_images[r] - query_images[q]).sum() / (h * w)
    return out


def windowed_zscore_oracle(values, r_norm):
    """Per-element windowed z-score: windows of min(r_norm, n) rows, centered
    with floor(r_norm/2) rows leading, slid (not shrunk) to stay inside the
    column; population std; zero-variance windows map to 0."""
    n, m = values.shape
    win = min(r_norm, n)
    out = np.zeros_like(values)
    for q in range(m):
        for r in range(n):
            start = min(max(r - r_norm // 2, 0), n - win)
            window = values[start : start + win, q]
            mean = window.mean()
            std = window.std()
            out[r, q] = 0.0 if std == 0.0 else (values[r, q] - mean) / std
    return out


# ---------------------------------------------------------------- difference matrix


def test_identical_single_image_pair_is_zero():
    img = np.full((3, 3), 42.0)
    t = make_traverse([img, img])
    d = build_difference_matrix(t, t)
    assert np.array_equal(np.diag(d.values), np.zeros(2))


def test_direct_formula_small_case():
    a = np.zeros((2, 2))
    b = np.array([[4.0, 0.0], [0.0, 0.0]])
    ref = make_traverse([a, a])
    query = make_traverse([b, b])
    d = build_difference_matrix(ref, query)
    assert d.values[0, 0] == pytest.approx(1.0)  # 4 / 4 pixels


def test_matches_sad_oracle_exactly(rng):
    ref_imgs = random_images(rng, 6, 8, 8)
    query_imgs = random_images(rng, 5, 8, 8)
    d = build_difference_matrix(make_traverse(ref_imgs), make_traverse(query_imgs, "q"))
    assert np.array_equal(d.values, sad_oracle(ref_imgs, query_imgs))


def test_dimension_mismatch_names_image(rng):
    ref = make_traverse(random_images(rng, 3, 4, 4))
    bad = random_images(rng, 2, 4, 4) + [rng.uniform(0, 255, (4, 5))]
    query = make_traverse(bad, "q")
    with pytest.raises(ValueError, match="q_0002"):
        build_difference_matrix(ref, query)


def test_self_difference_has_zero_diagonal(rng):
    t = make_traverse(random_images(rng, 5, 6, 6))
    d = build_difference_matrix(t, t)
    assert np.array_equal(np.diag(d.values), np.zeros(5))
    assert (d.values >= 0).all()


def test_symmetry(rng):
    a = make_traverse(random_images(rng, 4, 5, 5))
    b = make_traverse(random_images(rng, 6, 5, 5), "q")
    dab = build_difference_matrix(a, b)
    dba = build_difference_matrix(b, a)
    assert np.array_equal(dab.values, dba.values.T)


def test_workers_do_not_change_result(rng):
    ref = make_traverse(random_images(rng, 7, 6, 6))
    query = make_traverse(random_images(rng, 9, 6, 6), "q")
    d1 = build_difference_matrix(ref, query, workers=1)
    d8 = build_difference_matrix(ref, query, workers=8)
    assert np.array_equal(d1.values, d8.values)


# ---------------------------------------------------------------- enhancement


def test_enhance_constant_column_is_zero():
    d = DifferenceMatrix(values=np.full((5, 3), 2.5))
    e = enhance_matrix(d, 3)
    assert np.array_equal(e.values, np.zeros((5, 3)))


def test_enhance_three_element_column():
    d = DifferenceMatrix(values=np.array([[1.0], [2.0], [3.0]]))
    e = enhance_matrix(d, 3)
    expect = 1.0 / math.sqrt(2.0 / 3.0)
    assert e.values[:, 0] == pytest.approx([-expect, 0.0, expect], abs=1e-12)


def test_enhance_window_two_edge_handling():
    d = DifferenceMatrix(values=np.array([[1.0], [2.0], [3.0], [4.0]]))
    e = enhance_matrix(d, 2)
    # element 0 normalizes against rows {0, 1}: (1 - 1.5) / 0.5
    assert e.values[0, 0] == pytest.approx(-1.0, abs=1e-12)


def test_enhance_rejects_small_window():
    d = DifferenceMatrix(values=np.zeros((3, 3)))
    with pytest.raises(ValueError, match="r_norm"):
        enhance_matrix(d, 1)


def test_enhance_matches_windowed_oracle(rng):
    values = rng.uniform(0, 50, (17, 9))
    d = DifferenceMatrix(values=values)
    for r_norm in (2, 3, 4, 7, 16, 17, 30):
        e = enhance_matrix(d, r_norm)
        assert np.allclose(e.values, windowed_zscore_oracle(values, r_norm), atol=1e-9)


def test_enhance_whole_column_when_window_covers(rng):
    values = rng.uniform(0, 100, (12, 6))
    e = enhance_matrix(DifferenceMatrix(values=values), 12)
    col_z = (values - values.mean(axis=0)) / values.std(axis=0)
    assert np.allclose(e.values, col_z, atol=1e-9)
    assert np.all(np.abs(e.values.mean(axis=0)) < 1e-9)
    assert np.all(np.abs(e.values.std(axis=0) - 1.0) < 1e-9)


def test_enhance_shift_invariance_per_column(rng):
    values = rng.uniform(0, 10, (10, 4))
    shifted = values + np.array([3.0, -2.0, 0.5, 100.0])
    a = enhance_matrix(DifferenceMatrix(values=values), 4)
    b = enhance_matrix(DifferenceMatrix(values=shifted), 4)
    assert np.allclose(a.values, b.values, atol=1e-9)


def test_enhance_scale_invariance_per_column(rng):
    values = rng.uniform(1, 10, (10, 4))
    scaled = values * np.array([2.0, 0.25, 7.0, 1e3])
    a = enhance_matrix(DifferenceMatrix(values=values), 5)
    b = enhance_matrix(DifferenceMatrix(values=scaled), 5)
    assert np.allclose(a.values, b.values, atol=1e-9)


def test_enhance_finite_everywhere(rng):
    values = rng.uniform(0, 1, (8, 8))
    values[:, 3] = 0.7  # constant column trips the zero-variance guard
    e = enhance_matrix(DifferenceMatrix(values=values), 4)
    assert np.isfinite(e.values).all()


def test_enhance_workers_do_not_change_result(rng):
    values = rng.uniform(0, 20, (30, 23))
    d = DifferenceMatrix(values=values)
    assert np.array_equal(enhance_matrix(d, 7).values, enhance_matrix(d, 7, workers=6).values)


@given(st.integers(min_value=2, max_value=40), st.integers(min_value=0, max_value=10_000))
@settings(max_examples=40, deadline=None)
def test_enhance_oracle_property(r_norm, seed):
    rng = np.random.default_rng(seed)
    values = rng.uniform(0, 30, (rng.integers(2, 15), rng.integers(1, 6)))
    e = enhance_matrix(DifferenceMatrix(values=values), r_norm)
    assert np.allclose(e.values, windowed_zscore_oracle(values, r_norm), atol=1e-9)


# ---------------------------------------------------------------- binary export


def test_matrix_file_layout(tmp_path, rng):
    values = rng.uniform(0, 9, (3, 2))
    path = tmp_path / "d.ssm1"
    write_matrix(path, values)
    data = path.read_bytes()
    assert data[:4] == b"SSM1"
    assert int.from_bytes(data[4:8], "little") == 3
    assert int.from_bytes(data[8:12], "little") == 2
    assert np.frombuffer(data[12:], dtype="<f8").reshape(3, 2) == pytest.approx(values)


def test_matrix_roundtrip(tmp_path, rng):
    values = rng.uniform(-5, 5, (7, 11))
    path = tmp_path / "d.ssm1"
    write_matrix(path, values)
    assert np.array_equal(read_matrix(path), values)


def test_matrix_rejects_bad_magic(tmp_path):
    path = tmp_path / "d.ssm1"
    path.write_bytes(b"NOPE" + b"\x00" * 16)
    with pytest.raises(ValueError, match="magic"):
        read_matrix(path)
