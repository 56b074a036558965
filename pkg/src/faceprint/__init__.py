"""Thermal face recognition from skeletonized vascular patterns.

Pipeline: mean-threshold binarization -> largest 8-connected component ->
crop -> erosion -> medial axis skeleton -> minutiae (terminations and
bifurcations by 3x3 neighbor count) -> per-block minutiae counts -> tanh
MLP classifier trained with momentum backpropagation. A deterministic
synthetic generator provides labeled data with ground-truth minutiae.
"""

from .classifier import (
    MlpModel,
    TrainConfig,
    backward,
    evaluate,
    forward,
    load_model,
    loss,
    predict,
    predict_batch,
    save_model,
    train,
)
from .errors import (
    DivergenceError,
    ErodedToEmptyError,
    FaceprintError,
    GeometryError,
    InsufficientDataError,
    NoFaceError,
    PgmDepthError,
    PgmFormatError,
    PgmTruncationError,
)
from .estimators import MinutiaeFeaturizer, MomentumMlpClassifier
from .features import (
    DatasetSplit,
    FeatureVector,
    as_arrays,
    block_features,
    features_from_csv,
    features_to_csv,
    split_dataset,
)
from .minutiae import (
    BIFURCATION,
    TERMINATION,
    MinutiaPoint,
    PruneConfig,
    classify_pixel,
    extract_minutiae,
    minutiae_from_text,
    minutiae_to_text,
    prune_minutiae,
    render_overlay,
)
from .perfusion import (
    CROSS3,
    SQUARE3,
    PerfusionConfig,
    erode,
    extract_perfusion,
    medial_axis,
)
from .pgm import (
    binary_to_gray,
    gray_to_binary_lossless,
    load_pgm,
    read_pgm,
    save_pgm,
    write_pgm,
)
from .pipeline import PipelineConfig, extract_features, extract_pruned_minutiae
from .segmentation import (
    CropRect,
    LabelImage,
    binarize_mean,
    crop_to_face,
    label_components_8,
    largest_component,
    segment_face,
)
from .synth import IdentitySpec, generate_dataset, generate_sample

__version__ = "0.1.0"
