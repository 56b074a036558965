"""Synthetic thermal-face images with known minutiae ground truth.

Each identity is a branching tree of ridge strokes drawn inside a bright
elliptical face on a dark background. A stroke is rendered as a warm 3 px
core walled in by dark 3 px channels on either side (a 9 px dark band
repainted bright along its centerline). The intensity triple (background
30, channel 120, face/core 200) is calibrated against the ellipse coverage
so that mean thresholding keeps face and stroke cores as foreground while
the channel walls binarize to background. The face mask therefore contains
the stroke tree as a thin peninsula attached to the bulk at the tree root,
and the skeleton of the eroded mask runs along the stroke cores: its
terminations and bifurcations land on the tree's own tips and attach
points, which the generator reports as ground truth.

The stroke tree depends only on the identity seed; individual samples of an
identity differ by an integer jitter offset, per-pixel background noise and
a handful of bright background speckles (small components the segmentation
stage must reject). All randomness comes from seeded stdlib Mersenne
Twister streams, so identical arguments reproduce identical bytes anywhere.
"""

import math
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GeometryError
from .minutiae import BIFURCATION, TERMINATION, MinutiaPoint
from .pgm import write_pgm

BACKGROUND_LEVEL = 30
RIDGE_LEVEL = 120
FACE_LEVEL = 200
NOISE_AMPLITUDE = 8

_AXIS_X_FRACTION = 0.44
_AXIS_Y_FRACTION = 0.45
_MAX_ARM_FRACTION = 0.55  # of the smaller semi-axis
_TIP_RADIUS = 0.75        # normalized ellipse radius tips must stay inside
_ATTACH_RADIUS = 0.80
_FEATURE_GAP = 11.0       # spacing between ground-truth features
_SEGMENT_GAP = 10.0       # clearance between non-adjacent strokes
_CHANNEL_HALF = 4         # dark band half-width; walls are 3 px per side
_CORE_HALF = 1            # bright stroke core half-width (3 px wide)
_ROOT_BASE_GAP = 9.0      # unwalled stretch joining the root core to the bulk


@dataclass
class IdentitySpec:
    identity_seed: int
    branch_count: int = 6
    arm_length_range: tuple[int, int] = (15, 40)
    jitter: int = 2
    canvas: tuple[int, int] = (416, 544)  # (width, height)

    def __post_init__(self):
        if self.branch_count < 0:
            raise ValueError(f"branch_count must be >= 0, got {self.branch_count}")
        lo, hi = self.arm_length_range
        if not 1 <= lo <= hi:
            raise ValueError(f"bad arm_length_range {self.arm_length_range}")
        if self.jitter < 0:
            raise ValueError(f"jitter must be >= 0, got {self.jitter}")
        w, h = self.canvas
        if w < 32 or h < 32:
            raise ValueError(f"canvas {self.canvas} too small; need at least 32x32")


def _segment_distance(a, b, c, d) -> float:
    """Minimum distance between segments ab and cd in the plane."""

    def cross(o, p, q):
        return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])

    def point_seg(p, u, v):
        ux, uy = v[0] - u[0], v[1] - u[1]
        den = ux * ux + uy * uy
        t = 0.0 if den == 0 else max(0.0, min(1.0, ((p[0] - u[0]) * ux + (p[1] - u[1]) * uy) / den))
        qx, qy = u[0] + t * ux, u[1] + t * uy
        return math.hypot(p[0] - qx, p[1] - qy)

    d1, d2 = cross(a, b, c), cross(a, b, d)
    d3, d4 = cross(c, d, a), cross(c, d, b)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return 0.0
    return min(point_seg(c, a, b), point_seg(d, a, b), point_seg(a, c, d), point_seg(b, c, d))


def _grow_tree(spec: IdentitySpec):
    """Identity-seeded stroke tree: segments plus tip/attach ground truth."""
    w, h = spec.canvas
    cx, cy = w / 2.0, h / 2.0
    a, b = _AXIS_X_FRACTION * w, _AXIS_Y_FRACTION * h
    if spec.branch_count == 0:
        return [], [], []
    lo, hi = spec.arm_length_range
    if hi > _MAX_ARM_FRACTION * min(a, b):
        raise GeometryError(
            f"canvas {w}x{h} too small for arm_length_range {spec.arm_length_range}"
        )

    def radius(p) -> float:
        return math.hypot((p[0] - cx) / a, (p[1] - cy) / b)

    rng = random.Random(f"faceprint-synth:{spec.identity_seed}")
    theta = rng.uniform(0.0, 2.0 * math.pi)
    start = (cx + 0.92 * a * math.cos(theta), cy + 0.92 * b * math.sin(theta))
    tip = (cx + rng.uniform(-0.12, 0.12) * a, cy + rng.uniform(-0.12, 0.12) * b)
    segments = [(start, tip)]
    tips = [tip]
    attaches: list[tuple[float, float]] = []

    for branch in range(1, spec.branch_count):
        placed = False
        for _ in range(400):
            parent = rng.randrange(len(segments))
            t = rng.uniform(0.3, 0.8)
            side = rng.choice((-1.0, 1.0))
            bend = rng.uniform(math.radians(35), math.radians(75))
            length = rng.uniform(lo, hi)
            (px, py), (qx, qy) = segments[parent]
            attach = (px + t * (qx - px), py + t * (qy - py))
            if radius(attach) > _ATTACH_RADIUS:
                continue
            direction = math.atan2(qy - py, qx - px) + side * bend
            new_tip = (
                attach[0] + length * math.cos(direction),
                attach[1] + length * math.sin(direction),
            )
            if radius(new_tip) > _TIP_RADIUS:
                continue
            features = tips + attaches + [segments[0][0]]
            if any(math.hypot(f[0] - attach[0], f[1] - attach[1]) < _FEATURE_GAP for f in features):
                continue
            if any(math.hypot(f[0] - new_tip[0], f[1] - new_tip[1]) < _FEATURE_GAP for f in features):
                continue
            too_close = False
            for j, seg in enumerate(segments):
                if j == parent:
                    continue
                if _segment_distance(attach, new_tip, seg[0], seg[1]) < _SEGMENT_GAP:
                    too_close = True
                    break
            if too_close:
                continue
            segments.append((attach, new_tip))
            tips.append(new_tip)
            attaches.append(attach)
            placed = True
            break
        if not placed:
            raise GeometryError(
                f"could not place branch {branch}: canvas {w}x{h} too crowded"
                f" for arm_length_range {spec.arm_length_range}"
            )
    return segments, tips, attaches


def _paint_stroke(
    img: np.ndarray, seg, dx: float, dy: float, value: int, half: int, start_frac: float = 0.0
) -> None:
    (x0, y0), (x1, y1) = seg
    if start_frac > 0.0:
        x0, y0 = x0 + start_frac * (x1 - x0), y0 + start_frac * (y1 - y0)
    x0, y0, x1, y1 = x0 + dx, y0 + dy, x1 + dx, y1 + dy
    n = max(2, int(math.ceil(math.hypot(x1 - x0, y1 - y0))) * 2)
    cols = np.rint(np.linspace(x0, x1, n)).astype(np.int64)
    rows = np.rint(np.linspace(y0, y1, n)).astype(np.int64)
    h, w = img.shape
    for dr in range(-half, half + 1):
        for dc in range(-half, half + 1):
            rr = np.clip(rows + dr, 0, h - 1)
            cc = np.clip(cols + dc, 0, w - 1)
            img[rr, cc] = value


def generate_sample(spec: IdentitySpec, sample_index: int) -> tuple[np.ndarray, list[MinutiaPoint]]:
    """Render one sample of an identity; returns the image and ground truth."""
    if sample_index < 0:
        raise ValueError(f"sample_index must be >= 0, got {sample_index}")
    segments, tips, attaches = _grow_tree(spec)
    w, h = spec.canvas
    cx, cy = w / 2.0, h / 2.0
    a, b = _AXIS_X_FRACTION * w, _AXIS_Y_FRACTION * h

    rng = random.Random(f"faceprint-synth:{spec.identity_seed}:{sample_index}")
    dx = rng.randint(-spec.jitter, spec.jitter) if spec.jitter else 0
    dy = rng.randint(-spec.jitter, spec.jitter) if spec.jitter else 0

    noise = np.frombuffer(rng.randbytes(w * h), dtype=np.uint8).reshape(h, w)
    noise = noise.astype(np.int16) % (2 * NOISE_AMPLITUDE + 1) - NOISE_AMPLITUDE

    cols, rows = np.meshgrid(np.arange(w), np.arange(h))
    inside = ((cols - cx) / a) ** 2 + ((rows - cy) / b) ** 2 <= 1.0
    img = np.full((h, w), BACKGROUND_LEVEL, dtype=np.int16)
    img[inside] = FACE_LEVEL
    img += noise

    for _ in range(rng.randint(4, 10)):
        for _ in range(100):
            sc = rng.randint(3, w - 4)
            sr = rng.randint(3, h - 4)
            if math.hypot((sc - cx) / a, (sr - cy) / b) >= 1.12:
                rad = rng.randint(1, 2)
                img[max(0, sr - rad) : sr + rad + 1, max(0, sc - rad) : sc + rad + 1] = FACE_LEVEL
                break

    # Channel walls first, bright cores second, so crossings stay connected
    # and the tree joins the face bulk only through the root's unwalled base.
    for i, seg in enumerate(segments):
        start_frac = 0.0
        if i == 0:
            length = math.hypot(seg[1][0] - seg[0][0], seg[1][1] - seg[0][1])
            start_frac = min(0.45, _ROOT_BASE_GAP / max(length, 1.0))
        _paint_stroke(img, seg, dx, dy, RIDGE_LEVEL, _CHANNEL_HALF, start_frac)
    for seg in segments:
        _paint_stroke(img, seg, dx, dy, FACE_LEVEL, _CORE_HALF)

    truth = [
        MinutiaPoint(int(round(y + dy)), int(round(x + dx)), TERMINATION) for x, y in tips
    ] + [
        MinutiaPoint(int(round(y + dy)), int(round(x + dx)), BIFURCATION) for x, y in attaches
    ]
    return np.clip(img, 0, 255).astype(np.uint8), truth


def generate_dataset(
    num_identities: int, samples_each: int, master_seed: int, outdir
) -> list[tuple[str, int]]:
    """Write PGM samples plus a filename,label manifest; returns the manifest rows."""
    if num_identities < 1:
        raise ValueError(f"num_identities must be >= 1, got {num_identities}")
    if samples_each < 1:
        raise ValueError(f"samples_each must be >= 1, got {samples_each}")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rows: list[tuple[str, int]] = []
    for label in range(num_identities):
        spec = IdentitySpec(identity_seed=master_seed * 100003 + label)
        for idx in range(samples_each):
            img, _ = generate_sample(spec, idx)
            name = f"id{label:02d}_s{idx:02d}.pgm"
            (outdir / name).write_bytes(write_pgm(img, binary=True))
            rows.append((name, label))
    manifest = "filename,label\n" + "".join(f"{name},{label}\n" for name, label in rows)
    (outdir / "manifest.csv").write_text(manifest)
    return rows
