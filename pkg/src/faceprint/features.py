"""Block-count feature vectors and dataset splitting.

The image plane is divided into a grid x grid lattice of cells; the feature
vector counts retained minutiae per cell, raster order. Cell boundaries use
floor(coord * grid / extent), so variable-size crops always map to the same
fixed-length vector and no point is ever dropped at the edges.
"""

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientDataError

DEFAULT_GRID = 8
TABLE_GRIDS = (8, 16, 32)


@dataclass
class FeatureVector:
    grid: int
    counts: np.ndarray
    label: int | None = None


@dataclass
class DatasetSplit:
    train: list[FeatureVector] = field(default_factory=list)
    test: list[FeatureVector] = field(default_factory=list)
    seed: int = 0
    train_fraction: float = 0.5


def block_features(points, width: int, height: int, grid: int = DEFAULT_GRID) -> FeatureVector:
    """Count minutiae per grid cell over a width x height image."""
    if grid < 2:
        raise ValueError(f"grid must be >= 2, got {grid}")
    if width < grid or height < grid:
        raise ValueError(f"image {width}x{height} smaller than grid {grid}")
    counts = np.zeros(grid * grid, dtype=np.int64)
    for p in points:
        if not (0 <= p.row < height and 0 <= p.col < width):
            raise ValueError(f"point ({p.row}, {p.col}) outside {width}x{height} image")
        cell = (p.row * grid // height) * grid + (p.col * grid // width)
        counts[cell] += 1
    return FeatureVector(grid=grid, counts=counts)


def split_dataset(vectors, train_fraction: float = 0.5, seed: int = 0) -> DatasetSplit:
    """Stratified seeded split; ceil(fraction * class size) samples train per class."""
    if not 0 < train_fraction < 1:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    by_label: dict[int, list[int]] = {}
    for i, v in enumerate(vectors):
        if v.label is None:
            raise ValueError(f"vector {i} has no label")
        by_label.setdefault(int(v.label), []).append(i)
    if not by_label:
        raise ValueError("no vectors to split")
    for label, idxs in sorted(by_label.items()):
        if len(idxs) < 2:
            raise InsufficientDataError(
                f"class {label} has {len(idxs)} sample(s); need at least 2 to split"
            )
    rng = random.Random(seed)
    split = DatasetSplit(seed=seed, train_fraction=train_fraction)
    for label in sorted(by_label):
        idxs = sorted(by_label[label])
        rng.shuffle(idxs)
        n_train = math.ceil(train_fraction * len(idxs))
        split.train.extend(vectors[i] for i in idxs[:n_train])
        split.test.extend(vectors[i] for i in idxs[n_train:])
    return split


def as_arrays(vectors) -> tuple[np.ndarray, np.ndarray]:
    """Stack labeled feature vectors into (X, y) for the classifier."""
    if not vectors:
        raise ValueError("no feature vectors given")
    n = len(vectors[0].counts)
    for i, v in enumerate(vectors):
        if len(v.counts) != n:
            raise ValueError(f"vector {i} has length {len(v.counts)}, expected {n}")
        if v.label is None:
            raise ValueError(f"vector {i} has no label")
    X = np.array([v.counts for v in vectors], dtype=np.float64)
    y = np.array([int(v.label) for v in vectors], dtype=np.int64)
    return X, y


def features_to_csv(vectors) -> str:
    """CSV with header 'label,n=<vector length>' and one sample per row."""
    if not vectors:
        return "label,n=0\n"
    n = len(vectors[0].counts)
    lines = [f"label,n={n}"]
    for i, v in enumerate(vectors):
        if len(v.counts) != n:
            raise ValueError(f"vector {i} has length {len(v.counts)}, expected {n}")
        label = "" if v.label is None else str(int(v.label))
        lines.append(label + "," + ",".join(str(int(c)) for c in v.counts))
    return "\n".join(lines) + "\n"


def features_from_csv(text: str) -> list[FeatureVector]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty feature CSV")
    header = lines[0].split(",")
    if len(header) != 2 or header[0] != "label" or not header[1].startswith("n="):
        raise ValueError(f"bad feature CSV header: {lines[0]!r}")
    n = int(header[1][2:])
    grid = math.isqrt(n) if n else 0
    vectors = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != n + 1:
            raise ValueError(
                f"row {lineno} has {len(parts) - 1} features, header says {n}"
            )
        label = int(parts[0]) if parts[0] != "" else None
        counts = np.array([int(x) for x in parts[1:]], dtype=np.int64)
        if counts.size and counts.min() < 0:
            raise ValueError(f"row {lineno} has a negative count")
        vectors.append(FeatureVector(grid=grid, counts=counts, label=label))
    return vectors
