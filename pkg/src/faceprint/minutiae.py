"""Minutiae detection on skeleton images.

A skeleton pixel is classified by how many of its 8 neighbors are
foreground: exactly 1 neighbor marks a ridge termination, exactly 3 a
bifurcation, 2 an ordinary ridge point. Counts of 0 or 4+ fall outside
those definitions and are reported as "other"; neither contributes a
minutia. Border pixels are classified with background padding.
"""

from dataclasses import dataclass

import numpy as np

from .validation import check_binary_image

TERMINATION = "termination"
BIFURCATION = "bifurcation"

_KIND_LETTER = {TERMINATION: "T", BIFURCATION: "B"}
_LETTER_KIND = {v: k for k, v in _KIND_LETTER.items()}

# Overlay intensities, one per role, so both minutia kinds stand out
# against the ridge they sit on.
OVERLAY_BACKGROUND = 0
OVERLAY_RIDGE = 90
OVERLAY_BIFURCATION = 180
OVERLAY_TERMINATION = 255


@dataclass(frozen=True)
class MinutiaPoint:
    row: int
    col: int
    kind: str


@dataclass
class PruneConfig:
    """Spurious-minutiae removal settings.

    border_margin drops points too close to the image edge;
    min_separation annihilates every pair of points closer than this
    Chebyshev distance (both members of the pair are removed).
    """

    border_margin: int = 2
    min_separation: int = 4

    def __post_init__(self):
        if self.border_margin < 0 or self.min_separation < 0:
            raise ValueError("prune parameters must be >= 0")


def classify_pixel(window) -> str:
    """Classify the center of a 3x3 binary window by its neighbor count."""
    arr = np.asarray(window)
    if arr.shape != (3, 3):
        raise ValueError(f"window must be 3x3, got shape {arr.shape}")
    vals = np.unique(arr)
    if not np.isin(vals, (0, 1)).all():
        raise ValueError("window values must be 0 or 1")
    if arr[1, 1] == 0:
        return "background"
    n = int(arr.sum()) - 1
    if n == 1:
        return TERMINATION
    if n == 2:
        return "normal"
    if n == 3:
        return BIFURCATION
    return "other"


def extract_minutiae(skeleton) -> list[MinutiaPoint]:
    """All terminations and bifurcations of the skeleton, in raster order."""
    arr = check_binary_image(skeleton)
    padded = np.pad(arr, 1)
    counts = (
        padded[:-2, :-2].astype(np.int16)
        + padded[:-2, 1:-1]
        + padded[:-2, 2:]
        + padded[1:-1, :-2]
        + padded[1:-1, 2:]
        + padded[2:, :-2]
        + padded[2:, 1:-1]
        + padded[2:, 2:]
    )
    fg = arr == 1
    term = fg & (counts == 1)
    points = []
    for r, c in np.argwhere(fg & ((counts == 1) | (counts == 3))):
        kind = TERMINATION if term[r, c] else BIFURCATION
        points.append(MinutiaPoint(int(r), int(c), kind))
    return points


def prune_minutiae(points, img_dims, cfg: PruneConfig | None = None) -> list[MinutiaPoint]:
    """Drop border points, then mutually annihilate close pairs.

    img_dims is (height, width) of the image the points came from. The
    result is raster-sorted and independent of the input order.
    """
    if cfg is None:
        cfg = PruneConfig()
    height, width = img_dims
    if height < 1 or width < 1:
        raise ValueError(f"bad image dimensions {img_dims}")
    limit = min(width, height) / 2
    if cfg.border_margin > limit or cfg.min_separation > limit:
        raise ValueError(
            f"prune parameters {cfg.border_margin}/{cfg.min_separation} exceed"
            f" half the smaller image side ({limit})"
        )
    for p in points:
        if not (0 <= p.row < height and 0 <= p.col < width):
            raise ValueError(f"point ({p.row}, {p.col}) outside {width}x{height} image")

    kept = sorted(
        (
            p
            for p in points
            if cfg.border_margin <= p.row < height - cfg.border_margin
            and cfg.border_margin <= p.col < width - cfg.border_margin
        ),
        key=lambda p: (p.row, p.col),
    )
    if cfg.min_separation == 0 or len(kept) < 2:
        return kept
    coords = np.array([(p.row, p.col) for p in kept], dtype=np.int64)
    cheb = np.maximum(
        np.abs(coords[:, 0:1] - coords[:, 0]), np.abs(coords[:, 1:2] - coords[:, 1])
    )
    close = cheb < cfg.min_separation
    np.fill_diagonal(close, False)
    return [p for p, doomed in zip(kept, close.any(axis=1)) if not doomed]


def minutiae_to_text(points) -> str:
    """One 'row col kind' line per point, kind spelled T or B."""
    return "".join(f"{p.row} {p.col} {_KIND_LETTER[p.kind]}\n" for p in points)


def minutiae_from_text(text: str) -> list[MinutiaPoint]:
    points = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3 or parts[2] not in _LETTER_KIND:
            raise ValueError(f"bad minutiae line {lineno}: {line!r}")
        points.append(MinutiaPoint(int(parts[0]), int(parts[1]), _LETTER_KIND[parts[2]]))
    return points


def render_overlay(skeleton, points) -> np.ndarray:
    """Grayscale debug image: ridge plus brighter marks at each minutia."""
    arr = check_binary_image(skeleton)
    overlay = (arr * np.uint8(OVERLAY_RIDGE)).astype(np.uint8)
    for p in points:
        value = OVERLAY_TERMINATION if p.kind == TERMINATION else OVERLAY_BIFURCATION
        overlay[p.row, p.col] = value
    return overlay
