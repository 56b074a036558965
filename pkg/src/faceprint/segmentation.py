"""Face segmentation: mean thresholding, 8-connected labeling, cropping.

The mean threshold is computed in exact integer arithmetic (pixel * N > sum
instead of pixel > sum / N) so results are bit-reproducible regardless of
platform float behavior.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import NoFaceError
from .validation import check_binary_image, check_gray_image

_EIGHT = np.ones((3, 3), dtype=np.uint8)


@dataclass(frozen=True)
class CropRect:
    """Inclusive bounding rows/columns of a crop."""

    top: int
    bottom: int
    left: int
    right: int


@dataclass
class LabelImage:
    """Connected-component labeling of a binary image.

    labels holds 0 for background and ids 1..K assigned in raster order of
    each component's first pixel. component_sizes[k] is the pixel count of
    id k (entry 0 is unused and kept at 0).
    """

    labels: np.ndarray
    component_sizes: np.ndarray

    @property
    def num_components(self) -> int:
        return len(self.component_sizes) - 1


def binarize_mean(img) -> np.ndarray:
    """Threshold at the exact arithmetic mean; strictly greater pixels become 1."""
    arr = check_gray_image(img)
    total = int(arr.sum(dtype=np.int64))
    n = arr.size
    return (arr.astype(np.int64) * n > total).astype(np.uint8)


def label_components_8(mask) -> LabelImage:
    """Label 8-connected foreground components, ids in raster first-pixel order."""
    arr = check_binary_image(mask)
    raw, k = ndimage.label(arr, structure=_EIGHT)
    if k == 0:
        return LabelImage(
            labels=np.zeros(arr.shape, dtype=np.int32),
            component_sizes=np.zeros(1, dtype=np.int64),
        )
    flat = raw.ravel()
    ids, first = np.unique(flat, return_index=True)
    fg = ids != 0
    order = ids[fg][np.argsort(first[fg], kind="stable")]
    remap = np.zeros(k + 1, dtype=np.int32)
    remap[order] = np.arange(1, k + 1, dtype=np.int32)
    labels = remap[raw]
    sizes = np.bincount(labels.ravel(), minlength=k + 1).astype(np.int64)
    sizes[0] = 0
    return LabelImage(labels=labels, component_sizes=sizes)


def largest_component(lbl: LabelImage) -> np.ndarray:
    """Mask of the largest component; size ties go to the smallest id."""
    if lbl.num_components == 0:
        raise NoFaceError("no foreground component in image")
    best = int(np.argmax(lbl.component_sizes[1:])) + 1
    return (lbl.labels == best).astype(np.uint8)


def crop_to_face(mask) -> tuple[np.ndarray, CropRect]:
    """Crop to the tight bounding box of the foreground."""
    arr = check_binary_image(mask)
    rows = np.flatnonzero(arr.any(axis=1))
    if rows.size == 0:
        raise NoFaceError("cannot crop an empty mask")
    cols = np.flatnonzero(arr.any(axis=0))
    rect = CropRect(int(rows[0]), int(rows[-1]), int(cols[0]), int(cols[-1]))
    cropped = arr[rect.top : rect.bottom + 1, rect.left : rect.right + 1].copy()
    return cropped, rect


def segment_face(img) -> tuple[np.ndarray, CropRect]:
    """Binarize, keep the largest 8-connected component, crop to it."""
    binary = binarize_mean(img)
    lbl = label_components_8(binary)
    if lbl.num_components == 0:
        raise NoFaceError("no face region: thresholding left no foreground")
    face = largest_component(lbl)
    return crop_to_face(face)
