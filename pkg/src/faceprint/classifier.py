"""Five-layer feed-forward network trained by backpropagation with momentum.

Topology is input -> 100 -> 50 -> 10 -> classes with tanh on every
computing layer, targets one-hot encoded as +1/-1, and a summed squared
error loss of 0.5 * sum((output - target)^2) per sample. Updates follow
gradient descent with momentum:

    v = momentum * v - learning_rate * grad
    theta = theta + v

with v starting at zero. Full-batch mode (the default) averages gradients
over the training set, so one epoch is one update and the result does not
depend on sample order; per-sample mode updates after every sample in
dataset order. Raw feature counts are divided by the largest count seen in
the training set (stored on the model) so inputs reach the first tanh layer
inside [0, 1].
"""

import random
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError

HIDDEN_LAYERS = (100, 50, 10)
DEFAULT_NUM_CLASSES = 6

_BATCH_MODES = ("full-batch", "per-sample")

_MODEL_MAGIC = "faceprint-mlp"
_MODEL_VERSION = 1


@dataclass
class TrainConfig:
    learning_rate: float = 0.01
    momentum: float = 0.9
    epochs: int = 500
    batch_mode: str = "full-batch"
    init_scale: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not 0 <= self.momentum < 1:
            raise ValueError(f"momentum must be in [0, 1), got {self.momentum}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_mode not in _BATCH_MODES:
            raise ValueError(f"batch_mode must be one of {_BATCH_MODES}")
        if self.init_scale <= 0:
            raise ValueError(f"init_scale must be > 0, got {self.init_scale}")


@dataclass
class MlpModel:
    """Weights are (fan_out, fan_in) matrices; input_scale divides raw inputs."""

    layer_dims: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    input_scale: float = 1.0


def init_model(
    input_dim: int,
    num_classes: int = DEFAULT_NUM_CLASSES,
    hidden_layers=HIDDEN_LAYERS,
    init_scale: float = 0.1,
    seed: int = 0,
    input_scale: float = 1.0,
) -> MlpModel:
    """Seeded uniform [-init_scale, init_scale] initialization.

    Parameters are drawn layer by layer, weight matrix row-major first and
    bias vector second, from one stdlib Mersenne Twister stream, so the
    same seed yields the same model on any platform.
    """
    if input_dim < 1 or num_classes < 1:
        raise ValueError("input_dim and num_classes must be >= 1")
    dims = [int(input_dim), *(int(h) for h in hidden_layers), int(num_classes)]
    rng = random.Random(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        w = np.array(
            [[rng.uniform(-init_scale, init_scale) for _ in range(fan_in)] for _ in range(fan_out)],
            dtype=np.float64,
        )
        b = np.array([rng.uniform(-init_scale, init_scale) for _ in range(fan_out)], dtype=np.float64)
        weights.append(w)
        biases.append(b)
    return MlpModel(layer_dims=dims, weights=weights, biases=biases, input_scale=input_scale)


def _check_input(model: MlpModel, x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != model.layer_dims[0]:
        raise ValueError(
            f"input shape {arr.shape} does not match model input length {model.layer_dims[0]}"
        )
    return arr


def forward(model: MlpModel, x) -> tuple[np.ndarray, list[np.ndarray]]:
    """Network output and all layer activations; activations[0] is the scaled input."""
    a = _check_input(model, x) / model.input_scale
    activations = [a]
    for w, b in zip(model.weights, model.biases):
        a = np.tanh(w @ a + b)
        activations.append(a)
    return activations[-1], activations


def loss(output, target) -> float:
    o = np.asarray(output, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    if o.shape != t.shape:
        raise ValueError(f"output shape {o.shape} != target shape {t.shape}")
    return float(0.5 * np.sum((o - t) ** 2))


def backward(model: MlpModel, x, target) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Exact gradients of loss(forward(x), target) for one sample."""
    t = np.asarray(target, dtype=np.float64)
    if t.shape != (model.layer_dims[-1],):
        raise ValueError(f"target shape {t.shape}, expected ({model.layer_dims[-1]},)")
    _, acts = forward(model, x)
    grads_w = [None] * len(model.weights)
    grads_b = [None] * len(model.biases)
    delta = (acts[-1] - t) * (1.0 - acts[-1] ** 2)
    for k in range(len(model.weights) - 1, -1, -1):
        grads_w[k] = np.outer(delta, acts[k])
        grads_b[k] = delta
        if k > 0:
            delta = (model.weights[k].T @ delta) * (1.0 - acts[k] ** 2)
    return grads_w, grads_b


def one_hot_targets(labels, num_classes: int) -> np.ndarray:
    """+1 at the true class, -1 elsewhere, matching the tanh output range."""
    y = np.asarray(labels, dtype=np.int64)
    targets = -np.ones((y.size, num_classes), dtype=np.float64)
    targets[np.arange(y.size), y] = 1.0
    return targets


def _forward_scaled_batch(model: MlpModel, xs: np.ndarray) -> list[np.ndarray]:
    acts = [xs]
    for w, b in zip(model.weights, model.biases):
        acts.append(np.tanh(acts[-1] @ w.T + b))
    return acts


def train(
    X,
    y,
    cfg: TrainConfig | None = None,
    num_classes: int | None = None,
    hidden_layers=HIDDEN_LAYERS,
) -> tuple[MlpModel, list[float]]:
    """Train a fresh model; returns it with the per-epoch mean loss history."""
    if cfg is None:
        cfg = TrainConfig()
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError(f"X must be a non-empty 2-D array, got shape {X.shape}")
    if y.shape != (X.shape[0],):
        raise ValueError(f"y shape {y.shape} does not match {X.shape[0]} samples")
    if y.min() < 0:
        raise ValueError("labels must be >= 0")
    if num_classes is None:
        num_classes = int(y.max()) + 1
    elif y.max() >= num_classes:
        raise ValueError(f"label {int(y.max())} outside [0, {num_classes})")

    input_scale = float(max(1.0, X.max()))
    model = init_model(
        X.shape[1], num_classes, hidden_layers, cfg.init_scale, cfg.seed, input_scale
    )
    xs = X / input_scale
    targets = one_hot_targets(y, num_classes)
    n = X.shape[0]
    vel_w = [np.zeros_like(w) for w in model.weights]
    vel_b = [np.zeros_like(b) for b in model.biases]
    history: list[float] = []

    for epoch in range(cfg.epochs):
        if cfg.batch_mode == "full-batch":
            acts = _forward_scaled_batch(model, xs)
            epoch_loss = float(0.5 * np.sum((acts[-1] - targets) ** 2) / n)
            _check_finite(epoch_loss, epoch)
            delta = (acts[-1] - targets) * (1.0 - acts[-1] ** 2)
            for k in range(len(model.weights) - 1, -1, -1):
                gw = delta.T @ acts[k] / n
                gb = delta.mean(axis=0)
                vel_w[k] = cfg.momentum * vel_w[k] - cfg.learning_rate * gw
                vel_b[k] = cfg.momentum * vel_b[k] - cfg.learning_rate * gb
                if k > 0:
                    delta = (delta @ model.weights[k]) * (1.0 - acts[k] ** 2)
                model.weights[k] += vel_w[k]
                model.biases[k] += vel_b[k]
        else:
            total = 0.0
            for i in range(n):
                out, acts = forward(model, X[i])
                sample_loss = loss(out, targets[i])
                _check_finite(sample_loss, epoch)
                total += sample_loss
                delta = (acts[-1] - targets[i]) * (1.0 - acts[-1] ** 2)
                for k in range(len(model.weights) - 1, -1, -1):
                    gw = np.outer(delta, acts[k])
                    gb = delta
                    vel_w[k] = cfg.momentum * vel_w[k] - cfg.learning_rate * gw
                    vel_b[k] = cfg.momentum * vel_b[k] - cfg.learning_rate * gb
                    if k > 0:
                        delta = (model.weights[k].T @ delta) * (1.0 - acts[k] ** 2)
                    model.weights[k] += vel_w[k]
                    model.biases[k] += vel_b[k]
            epoch_loss = total / n
        history.append(epoch_loss)
    return model, history


def _check_finite(value: float, epoch: int) -> None:
    if not np.isfinite(value):
        raise DivergenceError(f"training diverged: non-finite loss at epoch {epoch}")


def predict(model: MlpModel, x) -> int:
    """Argmax of the network output; ties resolve to the lowest class id."""
    out, _ = forward(model, x)
    return int(np.argmax(out))


def predict_batch(model: MlpModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.layer_dims[0]:
        raise ValueError(
            f"feature length {X.shape[-1] if X.ndim == 2 else '?'} does not match"
            f" model input length {model.layer_dims[0]}"
        )
    acts = _forward_scaled_batch(model, X / model.input_scale)
    return np.argmax(acts[-1], axis=1)


def evaluate(model: MlpModel, X, y) -> tuple[float, np.ndarray]:
    """Accuracy and confusion matrix (rows true, columns predicted)."""
    y = np.asarray(y, dtype=np.int64)
    pred = predict_batch(model, X)
    if y.shape != pred.shape:
        raise ValueError(f"y shape {y.shape} does not match {pred.shape[0]} samples")
    c = model.layer_dims[-1]
    if y.size and (y.min() < 0 or y.max() >= c):
        raise ValueError(f"labels outside [0, {c})")
    confusion = np.zeros((c, c), dtype=np.int64)
    np.add.at(confusion, (y, pred), 1)
    accuracy = float((pred == y).mean()) if y.size else 0.0
    return accuracy, confusion


def save_model(model: MlpModel, cfg: TrainConfig) -> str:
    """Self-describing text format; floats stored at full round-trip precision."""
    lines = [
        f"{_MODEL_MAGIC} {_MODEL_VERSION}",
        "layer_dims " + " ".join(str(d) for d in model.layer_dims),
        f"input_scale {model.input_scale!r}",
        f"learning_rate {cfg.learning_rate!r}",
        f"momentum {cfg.momentum!r}",
        f"epochs {cfg.epochs}",
        f"batch_mode {cfg.batch_mode}",
        f"init_scale {cfg.init_scale!r}",
        f"seed {cfg.seed}",
    ]
    for k, (w, b) in enumerate(zip(model.weights, model.biases)):
        lines.append(f"weights {k} {w.shape[0]} {w.shape[1]}")
        for row in w:
            lines.append(" ".join(repr(float(v)) for v in row))
        lines.append(f"biases {k} {b.shape[0]}")
        lines.append(" ".join(repr(float(v)) for v in b))
    lines.append("end")
    return "\n".join(lines) + "\n"


def load_model(text: str) -> tuple[MlpModel, TrainConfig]:
    lines = text.splitlines()
    pos = 0

    def take() -> str:
        nonlocal pos
        if pos >= len(lines):
            raise ValueError("truncated model file")
        line = lines[pos]
        pos += 1
        return line

    magic = take().split()
    if len(magic) != 2 or magic[0] != _MODEL_MAGIC or int(magic[1]) != _MODEL_VERSION:
        raise ValueError(f"not a version-{_MODEL_VERSION} {_MODEL_MAGIC} file")
    header: dict[str, str] = {}
    dims_line = take().split()
    if dims_line[0] != "layer_dims":
        raise ValueError("missing layer_dims")
    dims = [int(d) for d in dims_line[1:]]
    for key in ("input_scale", "learning_rate", "momentum", "epochs", "batch_mode", "init_scale", "seed"):
        name, value = take().split(maxsplit=1)
        if name != key:
            raise ValueError(f"expected {key}, found {name}")
        header[key] = value
    weights, biases = [], []
    for k in range(len(dims) - 1):
        tag, idx, rows, cols = take().split()
        if tag != "weights" or int(idx) != k or (int(rows), int(cols)) != (dims[k + 1], dims[k]):
            raise ValueError(f"bad weights header for layer {k}")
        w = np.array(
            [[float(v) for v in take().split()] for _ in range(dims[k + 1])], dtype=np.float64
        )
        if w.shape != (dims[k + 1], dims[k]):
            raise ValueError(f"bad weight matrix shape for layer {k}")
        tag, idx, length = take().split()
        if tag != "biases" or int(idx) != k or int(length) != dims[k + 1]:
            raise ValueError(f"bad biases header for layer {k}")
        b = np.array([float(v) for v in take().split()], dtype=np.float64)
        if b.shape != (dims[k + 1],):
            raise ValueError(f"bad bias vector shape for layer {k}")
        weights.append(w)
        biases.append(b)
    if take() != "end":
        raise ValueError("missing end marker")
    model = MlpModel(
        layer_dims=dims, weights=weights, biases=biases, input_scale=float(header["input_scale"])
    )
    cfg = TrainConfig(
        learning_rate=float(header["learning_rate"]),
        momentum=float(header["momentum"]),
        epochs=int(header["epochs"]),
        batch_mode=header["batch_mode"],
        init_scale=float(header["init_scale"]),
        seed=int(header["seed"]),
    )
    return model, cfg
