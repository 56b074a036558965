import itertools
import random

import numpy as np
import pytest

from faceprint import (
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

from .oracles import classify_rule_table


def test_classify_published_termination_window():
    window = [[0, 0, 1], [0, 1, 0], [0, 0, 0]]
    assert classify_pixel(window) == TERMINATION


def test_classify_published_bifurcation_window():
    window = [[1, 1, 0], [1, 1, 0], [0, 0, 0]]
    assert classify_pixel(window) == BIFURCATION


def test_classify_published_normal_window():
    window = [[0, 1, 0], [0, 1, 1], [0, 0, 0]]
    assert classify_pixel(window) == "normal"


def test_classify_isolated_is_other():
    window = [[0, 0, 0], [0, 1, 0], [0, 0, 0]]
    assert classify_pixel(window) == "other"


def test_classify_background():
    assert classify_pixel(np.zeros((3, 3), dtype=np.uint8)) == "background"


def test_classify_exhaustive_against_rule_table():
    table = classify_rule_table()
    for bits in itertools.product((0, 1), repeat=9):
        window = np.array(bits, dtype=np.uint8).reshape(3, 3)
        assert classify_pixel(window) == table[bits], bits


def test_classify_rejects_bad_window():
    with pytest.raises(ValueError):
        classify_pixel(np.zeros((2, 3), dtype=np.uint8))
    with pytest.raises(ValueError):
        classify_pixel(np.full((3, 3), 2, dtype=np.uint8))


def test_extract_empty():
    assert extract_minutiae(np.zeros((4, 4), dtype=np.uint8)) == []


def test_extract_straight_line():
    skel = np.zeros((5, 9), dtype=np.uint8)
    skel[2, 2:7] = 1  # length-5 line
    points = extract_minutiae(skel)
    assert [p.kind for p in points] == [TERMINATION, TERMINATION]
    assert [(p.row, p.col) for p in points] == [(2, 2), (2, 6)]


def test_extract_y_shape():
    skel = np.zeros((9, 9), dtype=np.uint8)
    for r, c in [(1, 4), (2, 4), (3, 4), (4, 4), (5, 3), (6, 2), (7, 1), (5, 5), (6, 6), (7, 7)]:
        skel[r, c] = 1
    points = extract_minutiae(skel)
    terms = [p for p in points if p.kind == TERMINATION]
    bifs = [p for p in points if p.kind == BIFURCATION]
    assert len(terms) == 3 and len(bifs) == 1
    assert (bifs[0].row, bifs[0].col) == (4, 4)
    assert {(p.row, p.col) for p in terms} == {(1, 4), (7, 1), (7, 7)}


def test_extract_raster_order_and_subset():
    rng = np.random.default_rng(13)
    for _ in range(10):
        skel = (rng.random((15, 15)) < 0.3).astype(np.uint8)
        points = extract_minutiae(skel)
        coords = [(p.row, p.col) for p in points]
        assert coords == sorted(coords)
        assert all(skel[r, c] == 1 for r, c in coords)
        assert len(points) <= int(skel.sum())


def test_extract_border_uses_background_padding():
    skel = np.zeros((3, 4), dtype=np.uint8)
    skel[0, 0] = skel[0, 1] = 1  # domino on the border
    points = extract_minutiae(skel)
    assert [p.kind for p in points] == [TERMINATION, TERMINATION]


def test_prune_disabled_is_identity():
    points = [MinutiaPoint(0, 5, TERMINATION), MinutiaPoint(1, 5, BIFURCATION)]
    kept = prune_minutiae(points, (20, 20), PruneConfig(0, 0))
    assert kept == sorted(points, key=lambda p: (p.row, p.col))


def test_prune_border_margin():
    points = [MinutiaPoint(0, 5, TERMINATION), MinutiaPoint(10, 10, TERMINATION)]
    kept = prune_minutiae(points, (20, 20), PruneConfig(border_margin=2, min_separation=0))
    assert kept == [MinutiaPoint(10, 10, TERMINATION)]


def test_prune_close_pair_mutual_annihilation():
    points = [MinutiaPoint(10, 10, TERMINATION), MinutiaPoint(12, 10, TERMINATION)]
    kept = prune_minutiae(points, (30, 30), PruneConfig(border_margin=0, min_separation=4))
    assert kept == []


def test_prune_separation_is_strict():
    points = [MinutiaPoint(10, 10, TERMINATION), MinutiaPoint(10, 14, TERMINATION)]
    kept = prune_minutiae(points, (30, 30), PruneConfig(border_margin=0, min_separation=4))
    assert len(kept) == 2  # Chebyshev distance exactly 4 is not "< 4"


def test_prune_idempotent():
    rng = random.Random(4)
    points = [
        MinutiaPoint(rng.randrange(40), rng.randrange(40), BIFURCATION) for _ in range(25)
    ]
    cfg = PruneConfig(border_margin=2, min_separation=4)
    once = prune_minutiae(points, (40, 40), cfg)
    assert prune_minutiae(once, (40, 40), cfg) == once


def test_prune_order_independent():
    rng = random.Random(8)
    points = [
        MinutiaPoint(rng.randrange(30), rng.randrange(30), TERMINATION) for _ in range(20)
    ]
    shuffled = points[:]
    rng.shuffle(shuffled)
    cfg = PruneConfig(border_margin=2, min_separation=4)
    assert prune_minutiae(points, (30, 30), cfg) == prune_minutiae(shuffled, (30, 30), cfg)


def test_prune_validates_bounds_and_params():
    with pytest.raises(ValueError):
        prune_minutiae([MinutiaPoint(50, 0, TERMINATION)], (20, 20), PruneConfig(0, 0))
    with pytest.raises(ValueError):
        prune_minutiae([], (6, 6), PruneConfig(border_margin=0, min_separation=4))


def test_mirror_equivariance():
    rng = np.random.default_rng(31)
    for _ in range(10):
        skel = (rng.random((12, 18)) < 0.3).astype(np.uint8)
        w = skel.shape[1]
        mirrored = skel[:, ::-1].copy()
        direct = {(p.row, w - 1 - p.col, p.kind) for p in extract_minutiae(skel)}
        flipped = {(p.row, p.col, p.kind) for p in extract_minutiae(mirrored)}
        assert direct == flipped


def test_text_roundtrip():
    points = [MinutiaPoint(3, 7, TERMINATION), MinutiaPoint(9, 1, BIFURCATION)]
    text = minutiae_to_text(points)
    assert text == "3 7 T\n9 1 B\n"
    assert minutiae_from_text(text) == points


def test_text_rejects_garbage():
    with pytest.raises(ValueError):
        minutiae_from_text("3 7 X\n")


def test_overlay_intensities():
    skel = np.zeros((5, 5), dtype=np.uint8)
    skel[2, 1:4] = 1
    points = extract_minutiae(skel)
    overlay = render_overlay(skel, points)
    assert overlay[2, 2] == 90  # plain ridge
    assert overlay[2, 1] == 255 and overlay[2, 3] == 255  # terminations
    assert overlay[0, 0] == 0
