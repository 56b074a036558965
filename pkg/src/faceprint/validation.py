"""Input validation helpers for image arrays.

Images are plain 2-D numpy arrays: grayscale images hold intensities in
[0, 255], binary images hold only 0 and 1. Both are normalized to uint8 so
every stage can rely on the dtype.
"""

import numpy as np

MAX_SIDE = 65535


def check_gray_image(img) -> np.ndarray:
    """Validate a grayscale image and return it as a uint8 array."""
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("image must contain at least one pixel")
    h, w = arr.shape
    if h > MAX_SIDE or w > MAX_SIDE:
        raise ValueError(f"image sides must be <= {MAX_SIDE}, got {w}x{h}")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(arr == np.floor(arr)):
            raise ValueError("intensities must be integers")
        arr = arr.astype(np.int64)
    if arr.size and (arr.min() < 0 or arr.max() > 255):
        raise ValueError("intensities must lie in [0, 255]")
    return np.ascontiguousarray(arr, dtype=np.uint8)


def check_binary_image(img) -> np.ndarray:
    """Validate a binary image ({0,1} values) and return it as uint8."""
    arr = check_gray_image(img)
    if arr.size and arr.max() > 1:
        bad = np.argwhere(arr > 1)[0]
        raise ValueError(
            f"binary image has value {arr[tuple(bad)]} at {tuple(bad)}; only 0 and 1 allowed"
        )
    return arr
