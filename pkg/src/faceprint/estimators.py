"""Scikit-learn compatible wrappers around the pipeline.

MinutiaeFeaturizer turns grayscale face images into fixed-length block-count
vectors; MomentumMlpClassifier wraps the from-scratch network. Both follow
the estimator protocol (get_params/set_params, fit returning self), so they
compose with sklearn pipelines and model selection tools:

    pipe = make_pipeline(MinutiaeFeaturizer(grid=8), MomentumMlpClassifier())
    pipe.fit(images, labels)
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin

from .classifier import (
    HIDDEN_LAYERS,
    TrainConfig,
    predict_batch,
    train,
)
from .minutiae import PruneConfig
from .perfusion import PerfusionConfig
from .pipeline import PipelineConfig, extract_features


class MinutiaeFeaturizer(BaseEstimator, TransformerMixin):
    """Stateless transformer: iterable of 2-D uint8 images -> (n, grid**2) counts.

    Extraction failures (blank images, masks erased by erosion) raise; batch
    callers that need to tolerate bad samples should filter beforehand, as
    the CLI's feature command does.
    """

    def __init__(
        self,
        grid=8,
        erosion_iterations=1,
        structuring_element="cross3",
        border_margin=2,
        min_separation=4,
    ):
        self.grid = grid
        self.erosion_iterations = erosion_iterations
        self.structuring_element = structuring_element
        self.border_margin = border_margin
        self.min_separation = min_separation

    def _config(self) -> PipelineConfig:
        return PipelineConfig(
            perfusion=PerfusionConfig(
                erosion_iterations=self.erosion_iterations,
                structuring_element=self.structuring_element,
            ),
            prune=PruneConfig(
                border_margin=self.border_margin, min_separation=self.min_separation
            ),
            grid=self.grid,
        )

    def fit(self, X, y=None):
        self._config()  # validate parameters
        self.n_features_out_ = self.grid * self.grid
        return self

    def transform(self, X):
        cfg = self._config()
        rows = [extract_features(img, cfg).counts for img in X]
        if not rows:
            return np.empty((0, self.grid * self.grid), dtype=np.int64)
        return np.stack(rows)


class MomentumMlpClassifier(BaseEstimator, ClassifierMixin):
    """Tanh MLP (input -> 100 -> 50 -> 10 -> classes) with momentum updates."""

    def __init__(
        self,
        hidden_layers=HIDDEN_LAYERS,
        learning_rate=0.01,
        momentum=0.9,
        epochs=500,
        batch_mode="full-batch",
        init_scale=0.1,
        random_state=0,
    ):
        self.hidden_layers = hidden_layers
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.epochs = epochs
        self.batch_mode = batch_mode
        self.init_scale = init_scale
        self.random_state = random_state

    def _train_config(self) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate,
            momentum=self.momentum,
            epochs=self.epochs,
            batch_mode=self.batch_mode,
            init_scale=self.init_scale,
            seed=self.random_state,
        )

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        if X.ndim != 2:
            raise ValueError(f"X must be 2-D, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise ValueError(f"y shape {y.shape} does not match {X.shape[0]} samples")
        self.classes_ = np.unique(y)
        indices = np.searchsorted(self.classes_, y)
        self.model_, self.loss_history_ = train(
            X,
            indices,
            self._train_config(),
            num_classes=len(self.classes_),
            hidden_layers=self.hidden_layers,
        )
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        if not hasattr(self, "model_"):
            raise ValueError("classifier is not fitted; call fit first")
        X = np.asarray(X, dtype=np.float64)
        return self.classes_[predict_batch(self.model_, X)]
