import numpy as np
import pytest

from faceprint import (
    IdentitySpec,
    NoFaceError,
    PipelineConfig,
    extract_features,
    extract_pruned_minutiae,
    generate_sample,
)


@pytest.fixture(scope="module")
def sample_image():
    spec = IdentitySpec(identity_seed=2, branch_count=4, arm_length_range=(12, 22), canvas=(256, 256))
    img, _ = generate_sample(spec, 0)
    return img


def test_extract_features_conserves_counts(sample_image):
    cfg = PipelineConfig(grid=8)
    points, _ = extract_pruned_minutiae(sample_image, cfg)
    vector = extract_features(sample_image, cfg)
    assert int(vector.counts.sum()) == len(points)
    assert vector.counts.shape == (64,)


def test_extract_features_grid_sizes(sample_image):
    for grid in (8, 16, 32):
        vector = extract_features(sample_image, PipelineConfig(grid=grid))
        assert vector.counts.shape == (grid * grid,)


def test_extract_features_blank_image_raises():
    with pytest.raises(NoFaceError):
        extract_features(np.full((64, 64), 9, dtype=np.uint8))


def test_pipeline_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig(grid=1)
    with pytest.raises(ValueError):
        PipelineConfig(train_fraction=0.0)
