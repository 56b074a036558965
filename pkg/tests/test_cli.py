import subprocess
import sys

import numpy as np
import pytest

from faceprint import (
    IdentitySpec,
    binary_to_gray,
    generate_sample,
    load_pgm,
    minutiae_from_text,
    read_pgm,
    save_pgm,
    write_pgm,
)
from faceprint.cli import main

SMALL = dict(branch_count=4, arm_length_range=(12, 22), canvas=(256, 256))


def write_image(path, seed=1, index=0):
    img, _ = generate_sample(IdentitySpec(identity_seed=seed, **SMALL), index)
    save_pgm(path, img)
    return img


def write_small_dataset(tmp_path, identities=6, samples=2):
    rows = []
    for label in range(identities):
        spec = IdentitySpec(identity_seed=70 + label, **SMALL)
        for idx in range(samples):
            img, _ = generate_sample(spec, idx)
            name = f"p{label}_{idx}.pgm"
            save_pgm(tmp_path / name, img)
            rows.append(f"{name},{label}")
    manifest = tmp_path / "manifest.csv"
    manifest.write_text("filename,label\n" + "\n".join(rows) + "\n")
    return manifest


def test_binarize_uniform_then_segment_fails(tmp_path, capsys):
    src = tmp_path / "flat.pgm"
    save_pgm(src, np.full((20, 20), 80, dtype=np.uint8))
    out = tmp_path / "mask.pgm"
    assert main(["binarize", str(src), "-o", str(out)]) == 0
    captured = capsys.readouterr()
    assert "foreground=0" in captured.out
    assert (read_pgm(out.read_bytes()) == 0).all()
    assert main(["segment", str(src), "-o", str(tmp_path / "m2.pgm")]) == 1
    assert "no face region" in capsys.readouterr().err


def test_segment_prints_crop(tmp_path, capsys):
    src = tmp_path / "face.pgm"
    write_image(src)
    out = tmp_path / "mask.pgm"
    assert main(["segment", str(src), "-o", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("crop ")
    top, bottom, left, right = map(int, lines[0].split()[1:])
    assert top <= bottom and left <= right
    mask = read_pgm(out.read_bytes())
    assert mask.shape == (bottom - top + 1, right - left + 1)


def test_perfusion_and_minutiae_stages(tmp_path, capsys):
    src = tmp_path / "face.pgm"
    write_image(src)
    mask = tmp_path / "mask.pgm"
    skel = tmp_path / "skel.pgm"
    pts = tmp_path / "pts.txt"
    overlay = tmp_path / "ov.pgm"
    assert main(["segment", str(src), "-o", str(mask)]) == 0
    assert main(["perfusion", str(mask), "-o", str(skel)]) == 0
    assert main(["minutiae", str(skel), "-o", str(pts), "--overlay", str(overlay)]) == 0
    out = capsys.readouterr().out
    assert "terminations=" in out and "bifurcations=" in out
    points = minutiae_from_text(pts.read_text())
    assert points
    assert overlay.exists()


def test_perfusion_rejects_gray_input(tmp_path):
    src = tmp_path / "gray.pgm"
    save_pgm(src, np.full((10, 10), 128, dtype=np.uint8))
    assert main(["perfusion", str(src), "-o", str(tmp_path / "s.pgm")]) == 1


def test_features_command(tmp_path, capsys):
    manifest = write_small_dataset(tmp_path, identities=2, samples=2)
    out = tmp_path / "features.csv"
    assert main(["features", str(manifest), "-o", str(out)]) == 0
    text = out.read_text()
    assert text.splitlines()[0] == "label,n=64"
    assert len(text.splitlines()) == 5


def test_features_empty_manifest(tmp_path):
    manifest = tmp_path / "manifest.csv"
    manifest.write_text("filename,label\n")
    out = tmp_path / "features.csv"
    assert main(["features", str(manifest), "-o", str(out)]) == 0
    assert out.read_text() == "label,n=64\n"


def test_features_isolates_corrupt_image(tmp_path, capsys):
    manifest = write_small_dataset(tmp_path, identities=6, samples=2)
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P5\n4 4\n255\nxx")  # truncated
    manifest.write_text(manifest.read_text() + "bad.pgm,0\n")
    out = tmp_path / "features.csv"
    assert main(["features", str(manifest), "-o", str(out)]) == 0  # 1/13 < 10%
    rejects = tmp_path / "features.csv.rejects.txt"
    assert rejects.exists() and "bad.pgm" in rejects.read_text()
    assert len(out.read_text().splitlines()) == 13


def test_features_fails_above_reject_tolerance(tmp_path):
    manifest = write_small_dataset(tmp_path, identities=2, samples=2)
    extra = "\n".join(f"missing{i}.pgm,0" for i in range(2))
    manifest.write_text(manifest.read_text() + extra + "\n")
    out = tmp_path / "features.csv"
    assert main(["features", str(manifest), "-o", str(out)]) == 1  # 2/6 > 10%


def test_split_train_predict_evaluate_chain(tmp_path, capsys):
    manifest = write_small_dataset(tmp_path, identities=6, samples=4)
    features = tmp_path / "features.csv"
    assert main(["features", str(manifest), "-o", str(features)]) == 0
    train_csv = tmp_path / "train.csv"
    test_csv = tmp_path / "test.csv"
    assert main([
        "split", str(features), "-o", str(train_csv), "--test-out", str(test_csv),
        "--train-fraction", "0.5", "--seed", "7",
    ]) == 0
    model = tmp_path / "model.txt"
    assert main(["train", str(train_csv), "-o", str(model), "--epochs", "300"]) == 0
    assert main(["predict", str(model), str(test_csv), "-o", str(tmp_path / "p.txt")]) == 0
    preds = (tmp_path / "p.txt").read_text().split()
    assert len(preds) == 12
    capsys.readouterr()
    assert main(["evaluate", str(model), str(test_csv)]) == 0
    out = capsys.readouterr().out
    assert "accuracy: " in out and "%" in out and "confusion:" in out
    line = next(ln for ln in out.splitlines() if ln.startswith("accuracy"))
    assert float(line.split()[1].rstrip("%")) >= 0.0


def test_predict_shape_mismatch(tmp_path, capsys):
    manifest = write_small_dataset(tmp_path, identities=2, samples=2)
    f64 = tmp_path / "f64.csv"
    f256 = tmp_path / "f256.csv"
    assert main(["features", str(manifest), "-o", str(f64)]) == 0
    assert main(["features", str(manifest), "-o", str(f256), "--grid", "16"]) == 0
    model = tmp_path / "model.txt"
    assert main(["train", str(f64), "-o", str(model), "--epochs", "5"]) == 0
    assert main(["predict", str(model), str(f256)]) == 1
    err = capsys.readouterr().err
    assert "256" in err and "64" in err


def test_evaluate_sweep(tmp_path, capsys):
    manifest = write_small_dataset(tmp_path, identities=6, samples=2)
    assert main([
        "evaluate", "--sweep", str(manifest), "--epochs", "120", "--seed", "7",
    ]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("# config:")
    rows = [ln for ln in out if not ln.startswith("#") and "%" in ln]
    assert [r.split()[0] for r in rows] == ["8x8", "16x16", "32x32"]
    for r in rows:
        value = float(r.split()[1].rstrip("%"))
        assert 0.0 <= value <= 100.0


def test_evaluate_usage_errors(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["evaluate", "model.txt"])
    assert exc.value.code == 2


def test_synth_command(tmp_path, capsys):
    out = tmp_path / "data"
    assert main(["synth", "-n", "2", "-k", "2", "--seed", "1", "-o", str(out)]) == 0
    assert "wrote 4 images" in capsys.readouterr().out
    assert (out / "manifest.csv").exists()
    assert len(list(out.glob("*.pgm"))) == 4


def test_synth_rerun_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["synth", "-n", "1", "-k", "2", "--seed", "3", "-o", str(a)]) == 0
    assert main(["synth", "-n", "1", "-k", "2", "--seed", "3", "-o", str(b)]) == 0
    for name in ("id00_s00.pgm", "id00_s01.pgm", "manifest.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_synth_zero_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["synth", "-n", "0", "-k", "2", "-o", "x"])
    assert exc.value.code == 2


def test_missing_input_is_data_error(tmp_path, capsys):
    assert main(["binarize", str(tmp_path / "nope.pgm"), "-o", str(tmp_path / "o.pgm")]) == 1
    assert "error:" in capsys.readouterr().err


def test_config_file_and_flag_precedence(tmp_path):
    manifest = write_small_dataset(tmp_path, identities=2, samples=2)
    cfg = tmp_path / "run.cfg"
    cfg.write_text("grid = 16\nmin_sep = 4  # comment\n")
    out_cfg = tmp_path / "a.csv"
    assert main(["features", str(manifest), "-o", str(out_cfg), "--config", str(cfg)]) == 0
    assert out_cfg.read_text().splitlines()[0] == "label,n=256"
    out_flag = tmp_path / "b.csv"
    assert main([
        "features", str(manifest), "-o", str(out_flag), "--config", str(cfg), "--grid", "8",
    ]) == 0
    assert out_flag.read_text().splitlines()[0] == "label,n=64"


def test_config_file_unknown_key(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("blocksize = 8\n")
    src = tmp_path / "img.pgm"
    write_image(src)
    assert main(["perfusion", str(src), "-o", str(tmp_path / "s.pgm"), "--config", str(cfg)]) == 1


def test_console_entry_point(tmp_path):
    src = tmp_path / "face.pgm"
    write_image(src)
    result = subprocess.run(
        [sys.executable, "-m", "faceprint.cli", "binarize", str(src), "-o", str(tmp_path / "m.pgm")],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert "foreground=" in result.stdout
