"""PGM (portable graymap) reading and writing.

Supported format: magic P2 (ASCII) or P5 (binary), maxval <= 255. Comments
(# to end of line) may appear between header tokens only. In P5 files a
single whitespace byte separates the maxval from the raster. Writing always
emits maxval 255; reading accepts any maxval in [1, 255] and stores
intensities as-is, without rescaling.

Binary images travel through PGM as 0/255 grayscale so that every
intermediate pipeline artifact opens in an ordinary image viewer.
"""

from pathlib import Path

import numpy as np

from .errors import PgmDepthError, PgmFormatError, PgmTruncationError
from .validation import check_binary_image, check_gray_image

_WHITESPACE = b" \t\n\r\x0b\x0c"


def _next_token(buf: bytes, pos: int) -> tuple[bytes, int]:
    n = len(buf)
    while pos < n:
        c = buf[pos]
        if c in _WHITESPACE:
            pos += 1
        elif c == ord("#"):
            nl = buf.find(b"\n", pos)
            pos = n if nl < 0 else nl + 1
        else:
            break
    if pos >= n:
        raise PgmFormatError("unexpected end of file inside header")
    start = pos
    while pos < n and buf[pos] not in _WHITESPACE and buf[pos] != ord("#"):
        pos += 1
    return buf[start:pos], pos


def _header_int(buf: bytes, pos: int, name: str) -> tuple[int, int]:
    tok, pos = _next_token(buf, pos)
    try:
        value = int(tok)
    except ValueError:
        raise PgmFormatError(f"invalid {name} token {tok!r}") from None
    return value, pos


def read_pgm(data: bytes) -> np.ndarray:
    """Parse PGM bytes into a (height, width) uint8 array."""
    buf = bytes(data)
    if len(buf) < 2:
        raise PgmFormatError("file too short for a PGM header")
    magic = buf[:2]
    if magic not in (b"P2", b"P5"):
        raise PgmFormatError(f"bad magic {magic!r}, expected P2 or P5")
    width, pos = _header_int(buf, 2, "width")
    height, pos = _header_int(buf, pos, "height")
    maxval, pos = _header_int(buf, pos, "maxval")
    if width < 1 or height < 1:
        raise PgmFormatError(f"non-positive dimensions {width}x{height}")
    if maxval > 255:
        raise PgmDepthError(f"maxval {maxval} exceeds 255; deeper images unsupported")
    if maxval < 1:
        raise PgmFormatError(f"invalid maxval {maxval}")

    count = width * height
    if magic == b"P5":
        if pos >= len(buf) or buf[pos] not in _WHITESPACE:
            raise PgmFormatError("missing whitespace byte between maxval and raster")
        pos += 1
        raster = buf[pos : pos + count]
        if len(raster) < count:
            raise PgmTruncationError(
                f"raster has {len(raster)} bytes, expected {count}"
            )
        img = np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()
    else:
        tokens = buf[pos:].split()
        if len(tokens) < count:
            raise PgmTruncationError(
                f"raster has {len(tokens)} pixel values, expected {count}"
            )
        try:
            values = [int(t) for t in tokens[:count]]
        except ValueError:
            raise PgmFormatError("non-numeric pixel value in P2 raster") from None
        img = np.array(values, dtype=np.int64).reshape(height, width)
        if img.min() < 0:
            raise PgmFormatError("negative pixel value in P2 raster")

    if int(img.max(initial=0)) > maxval:
        raise PgmFormatError(f"pixel value exceeds declared maxval {maxval}")
    return img.astype(np.uint8)


def write_pgm(img, binary: bool = True) -> bytes:
    """Serialize a grayscale image as P5 (binary=True) or P2 bytes."""
    arr = check_gray_image(img)
    h, w = arr.shape
    if binary:
        return b"P5\n%d %d\n255\n" % (w, h) + arr.tobytes()
    lines = [f"P2\n{w} {h}\n255"]
    for row in arr:
        lines.append(" ".join(str(int(v)) for v in row))
    return ("\n".join(lines) + "\n").encode("ascii")


def binary_to_gray(mask) -> np.ndarray:
    """Map a {0,1} mask to a {0,255} grayscale image."""
    arr = check_binary_image(mask)
    return (arr * np.uint8(255)).astype(np.uint8)


def gray_to_binary_lossless(img) -> np.ndarray:
    """Map a {0,255} grayscale image back to a {0,1} mask.

    Any other intensity is rejected: this direction is only for images that
    were produced by binary_to_gray (or are otherwise strictly two-level).
    """
    arr = check_gray_image(img)
    bad = (arr != 0) & (arr != 255)
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise ValueError(
            f"intensity {int(arr[r, c])} at ({r}, {c}) is not in {{0, 255}}"
        )
    return (arr == 255).astype(np.uint8)


def load_pgm(path) -> np.ndarray:
    return read_pgm(Path(path).read_bytes())


def save_pgm(path, img, binary: bool = True) -> None:
    Path(path).write_bytes(write_pgm(img, binary=binary))
