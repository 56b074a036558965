"""End-to-end per-image feature extraction.

Chains segmentation, skeletonization, minutiae detection and pruning, and
block counting. After binning, the vector total is checked against the
number of retained minutiae so a conservation bug can never pass silently.
"""

from dataclasses import dataclass, field

from .classifier import TrainConfig
from .errors import FaceprintError
from .features import DEFAULT_GRID, FeatureVector, block_features
from .minutiae import MinutiaPoint, PruneConfig, extract_minutiae, prune_minutiae
from .perfusion import PerfusionConfig, extract_perfusion
from .segmentation import segment_face


@dataclass
class PipelineConfig:
    """Everything the extraction and experiment stages need, in one place."""

    perfusion: PerfusionConfig = field(default_factory=PerfusionConfig)
    prune: PruneConfig = field(default_factory=PruneConfig)
    grid: int = DEFAULT_GRID
    train: TrainConfig = field(default_factory=TrainConfig)
    train_fraction: float = 0.5
    split_seed: int = 0

    def __post_init__(self):
        if self.grid < 2:
            raise ValueError(f"grid must be >= 2, got {self.grid}")
        if not 0 < self.train_fraction < 1:
            raise ValueError(f"train_fraction must be in (0, 1), got {self.train_fraction}")


def extract_pruned_minutiae(
    img, cfg: PipelineConfig | None = None
) -> tuple[list[MinutiaPoint], tuple[int, int]]:
    """Minutiae of one grayscale image after the full pipeline, with crop dims."""
    if cfg is None:
        cfg = PipelineConfig()
    mask, _ = segment_face(img)
    skeleton = extract_perfusion(mask, cfg.perfusion)
    points = extract_minutiae(skeleton)
    kept = prune_minutiae(points, skeleton.shape, cfg.prune)
    return kept, skeleton.shape


def extract_features(img, cfg: PipelineConfig | None = None) -> FeatureVector:
    """Feature vector of one grayscale image (unlabeled)."""
    if cfg is None:
        cfg = PipelineConfig()
    kept, (height, width) = extract_pruned_minutiae(img, cfg)
    vector = block_features(kept, width=width, height=height, grid=cfg.grid)
    if int(vector.counts.sum()) != len(kept):
        raise FaceprintError(
            f"feature conservation violated: {int(vector.counts.sum())} counted"
            f" vs {len(kept)} minutiae"
        )
    return vector
