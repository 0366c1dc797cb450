import numpy as np
import pytest

from spatialmem import (DimensionError, EngineConfig, OutOfWorldError,
                        as_embedding, as_position, cosine_similarity,
                        normalize_position)


def test_as_embedding_accepts_lists():
    v = as_embedding([1, 2, 3], 3)
    assert v.dtype == np.float64
    assert np.array_equal(v, [1.0, 2.0, 3.0])


def test_as_embedding_rejects_wrong_length():
    with pytest.raises(DimensionError) as exc:
        as_embedding([1.0, 2.0], 3)
    assert exc.value.expected == 3
    assert exc.value.got == 2


def test_as_embedding_rejects_nan():
    with pytest.raises(DimensionError):
        as_embedding([1.0, np.nan, 3.0], 3)


def test_as_position_shape():
    with pytest.raises(DimensionError):
        as_position([1.0, 2.0])
    assert as_position((1, 2, 3)).shape == (3,)


def test_cosine_similarity_basic():
    assert cosine_similarity([1, 0], [1, 0]) == pytest.approx(1.0)
    assert cosine_similarity([1, 0], [0, 1]) == pytest.approx(0.0)
    assert cosine_similarity([1, 0], [-1, 0]) == pytest.approx(-1.0)
    assert cosine_similarity([3, 4], [3, 4]) == pytest.approx(1.0)


def test_cosine_similarity_zero_norm_is_zero():
    assert cosine_similarity([0, 0], [1, 1]) == 0.0
    assert cosine_similarity([1, 1], [0, 0]) == 0.0


def test_cosine_similarity_shape_mismatch():
    with pytest.raises(DimensionError):
        cosine_similarity([1, 0], [1, 0, 0])


def test_normalize_position_applies_origin():
    cfg = EngineConfig(origin=(10.0, 20.0, 30.0), L=100.0)
    p = normalize_position([15.0, 25.0, 35.0], cfg)
    assert np.allclose(p, [5.0, 5.0, 5.0])


def test_normalize_position_bounds_half_open():
    cfg = EngineConfig(L=100.0)
    normalize_position([0.0, 0.0, 0.0], cfg)  # lower edge is inside
    with pytest.raises(OutOfWorldError):
        normalize_position([100.0, 0.0, 0.0], cfg)  # upper edge is not
    with pytest.raises(OutOfWorldError) as exc:
        normalize_position([0.0, -0.1, 0.0], cfg)
    assert exc.value.axis == "y"
