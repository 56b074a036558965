import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import make_pipeline

from faceprint import IdentitySpec, MinutiaeFeaturizer, MomentumMlpClassifier, generate_sample

SMALL = dict(branch_count=4, arm_length_range=(12, 22), canvas=(256, 256))


def small_dataset(identities=3, samples=4):
    images, labels = [], []
    for label in range(identities):
        spec = IdentitySpec(identity_seed=40 + label, **SMALL)
        for idx in range(samples):
            img, _ = generate_sample(spec, idx)
            images.append(img)
            labels.append(label)
    return images, np.array(labels)


def test_featurizer_transform_shape():
    images, _ = small_dataset(identities=2, samples=2)
    feats = MinutiaeFeaturizer(grid=8).fit_transform(images)
    assert feats.shape == (4, 64)
    assert feats.dtype == np.int64
    assert (feats >= 0).all()


def test_featurizer_get_set_params():
    f = MinutiaeFeaturizer(grid=16, min_separation=6)
    params = f.get_params()
    assert params["grid"] == 16 and params["min_separation"] == 6
    g = clone(f)
    assert g.get_params() == params


def test_featurizer_rejects_bad_params():
    with pytest.raises(ValueError):
        MinutiaeFeaturizer(grid=1).fit([])


def test_classifier_fit_predict_roundtrip():
    rng = np.random.default_rng(0)
    X = np.zeros((30, 6))
    y = np.repeat([3, 7, 9], 10)  # non-contiguous labels
    for i, label in enumerate((3, 7, 9)):
        X[y == label, 2 * i] = rng.uniform(4, 8, size=10)
    clf = MomentumMlpClassifier(epochs=300, random_state=1)
    clf.fit(X, y)
    assert sorted(clf.classes_.tolist()) == [3, 7, 9]
    assert (clf.predict(X) == y).all()
    assert clf.score(X, y) == 1.0
    assert len(clf.loss_history_) == 300


def test_classifier_unfitted_raises():
    with pytest.raises(ValueError):
        MomentumMlpClassifier().predict(np.zeros((1, 4)))


def test_sklearn_pipeline_composition():
    images, labels = small_dataset()
    pipe = make_pipeline(
        MinutiaeFeaturizer(grid=8),
        MomentumMlpClassifier(epochs=300, random_state=0),
    )
    pipe.fit(images, labels)
    pred = pipe.predict(images)
    assert pred.shape == labels.shape
    assert (pred == labels).mean() >= 0.8


def test_classifier_clone_keeps_params():
    clf = MomentumMlpClassifier(learning_rate=0.02, epochs=7)
    c = clone(clf)
    assert c.get_params()["learning_rate"] == 0.02
    assert c.get_params()["epochs"] == 7
