"""Command-line interface exposing each pipeline stage and the experiment.

Exit codes: 0 success, 1 domain/data error (bad image, empty mask, shape
mismatch), 2 usage error. Option precedence is flags > config file >
defaults; the config file holds plain "key = value" lines with the same
names as the long flags (underscores for dashes).
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from .classifier import TrainConfig, evaluate, load_model, predict_batch, save_model, train
from .errors import FaceprintError
from .features import (
    TABLE_GRIDS,
    as_arrays,
    block_features,
    features_from_csv,
    features_to_csv,
    split_dataset,
)
from .minutiae import (
    BIFURCATION,
    TERMINATION,
    PruneConfig,
    extract_minutiae,
    minutiae_to_text,
    prune_minutiae,
    render_overlay,
)
from .perfusion import PerfusionConfig, extract_perfusion
from .pgm import binary_to_gray, gray_to_binary_lossless, load_pgm, save_pgm
from .pipeline import PipelineConfig, extract_pruned_minutiae
from .segmentation import binarize_mean, segment_face
from .synth import generate_dataset

DEFAULTS = {
    "grid": 8,
    "erode_iters": 1,
    "se": "cross3",
    "border_margin": 2,
    "min_sep": 4,
    "lr": 0.01,
    "momentum": 0.9,
    "epochs": 500,
    "seed": 0,
    "train_fraction": 0.5,
}

_INT_KEYS = {"grid", "erode_iters", "border_margin", "min_sep", "epochs", "seed"}
_FLOAT_KEYS = {"lr", "momentum", "train_fraction"}


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _parse_config_file(path: str) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in DEFAULTS:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        if key in _INT_KEYS:
            values[key] = int(value)
        elif key in _FLOAT_KEYS:
            values[key] = float(value)
        else:
            values[key] = value
    return values


def _effective_config(args) -> dict:
    effective = dict(DEFAULTS)
    if getattr(args, "config", None):
        effective.update(_parse_config_file(args.config))
    for key in DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            effective[key] = flag
    return effective


def _pipeline_config(eff: dict) -> PipelineConfig:
    return PipelineConfig(
        perfusion=PerfusionConfig(
            erosion_iterations=eff["erode_iters"], structuring_element=eff["se"]
        ),
        prune=PruneConfig(border_margin=eff["border_margin"], min_separation=eff["min_sep"]),
        grid=eff["grid"],
        train=_train_config(eff),
        train_fraction=eff["train_fraction"],
        split_seed=eff["seed"],
    )


def _train_config(eff: dict) -> TrainConfig:
    return TrainConfig(
        learning_rate=eff["lr"],
        momentum=eff["momentum"],
        epochs=eff["epochs"],
        seed=eff["seed"],
    )


def _config_line(eff: dict) -> str:
    return "# config: " + " ".join(f"{k}={eff[k]}" for k in sorted(DEFAULTS))


def _read_manifest(path: Path) -> list[tuple[str, int]]:
    rows = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line == "filename,label":
            continue
        name, _, label = line.partition(",")
        if not name or not label:
            raise ValueError(f"{path}:{lineno}: expected 'filename,label', got {raw!r}")
        rows.append((name, int(label)))
    return rows


# ---------------------------------------------------------------------------
# stage subcommands


def cmd_binarize(args, parser) -> int:
    img = load_pgm(args.input)
    mask = binarize_mean(img)
    save_pgm(args.output, binary_to_gray(mask))
    h, w = mask.shape
    print(f"{w}x{h} foreground={int(mask.sum())}")
    return 0


def cmd_segment(args, parser) -> int:
    img = load_pgm(args.input)
    mask, rect = segment_face(img)
    save_pgm(args.output, binary_to_gray(mask))
    print(f"crop {rect.top} {rect.bottom} {rect.left} {rect.right}")
    h, w = mask.shape
    print(f"{w}x{h} foreground={int(mask.sum())}")
    return 0


def cmd_perfusion(args, parser) -> int:
    eff = _effective_config(args)
    mask = gray_to_binary_lossless(load_pgm(args.input))
    cfg = PerfusionConfig(
        erosion_iterations=eff["erode_iters"], structuring_element=eff["se"]
    )
    skeleton = extract_perfusion(mask, cfg)
    save_pgm(args.output, binary_to_gray(skeleton))
    h, w = skeleton.shape
    print(f"{w}x{h} foreground={int(skeleton.sum())}")
    return 0


def cmd_minutiae(args, parser) -> int:
    eff = _effective_config(args)
    skeleton = gray_to_binary_lossless(load_pgm(args.input))
    points = extract_minutiae(skeleton)
    cfg = PruneConfig(border_margin=eff["border_margin"], min_separation=eff["min_sep"])
    kept = prune_minutiae(points, skeleton.shape, cfg)
    Path(args.output).write_text(minutiae_to_text(kept))
    if args.overlay:
        save_pgm(args.overlay, render_overlay(skeleton, kept))
    h, w = skeleton.shape
    terms = sum(p.kind == TERMINATION for p in kept)
    bifs = sum(p.kind == BIFURCATION for p in kept)
    print(f"{w}x{h} terminations={terms} bifurcations={bifs}")
    return 0


# ---------------------------------------------------------------------------
# dataset subcommands


def _extract_dataset_minutiae(manifest_path: Path, images_dir, cfg: PipelineConfig):
    """Run extraction over every manifest row; returns successes and rejects."""
    rows = _read_manifest(manifest_path)
    base = Path(images_dir) if images_dir else manifest_path.parent
    done, rejects = [], []
    for name, label in rows:
        try:
            img = load_pgm(base / name)
            points, dims = extract_pruned_minutiae(img, cfg)
        except (FaceprintError, ValueError, OSError) as exc:
            rejects.append((name, str(exc)))
            continue
        done.append((name, label, points, dims))
    return done, rejects


def cmd_features(args, parser) -> int:
    eff = _effective_config(args)
    cfg = _pipeline_config(eff)
    manifest = Path(args.manifest)
    done, rejects = _extract_dataset_minutiae(manifest, args.images, cfg)
    vectors = []
    for name, label, points, (height, width) in done:
        vector = block_features(points, width=width, height=height, grid=cfg.grid)
        vector.label = label
        vectors.append(vector)
    out = Path(args.output)
    if vectors:
        out.write_text(features_to_csv(vectors))
    else:
        out.write_text(f"label,n={cfg.grid * cfg.grid}\n")
    if rejects:
        report = out.with_name(out.name + ".rejects.txt")
        report.write_text("".join(f"{name}: {reason}\n" for name, reason in rejects))
        print(f"rejected {len(rejects)} image(s), see {report}", file=sys.stderr)
    total = len(done) + len(rejects)
    print(f"features: {len(vectors)} of {total} images -> {out}")
    if total and len(rejects) > 0.1 * total:
        print(f"error: {len(rejects)}/{total} images failed extraction", file=sys.stderr)
        return 1
    return 0


def cmd_split(args, parser) -> int:
    vectors = features_from_csv(Path(args.features).read_text())
    eff = _effective_config(args)
    split = split_dataset(vectors, train_fraction=eff["train_fraction"], seed=eff["seed"])
    Path(args.output).write_text(features_to_csv(split.train))
    Path(args.test_out).write_text(features_to_csv(split.test))
    print(f"split: {len(split.train)} train, {len(split.test)} test")
    return 0


def cmd_train(args, parser) -> int:
    vectors = features_from_csv(Path(args.features).read_text())
    X, y = as_arrays(vectors)
    eff = _effective_config(args)
    cfg = _train_config(eff)
    model, history = train(X, y, cfg)
    Path(args.output).write_text(save_model(model, cfg))
    dims = "-".join(str(d) for d in model.layer_dims)
    print(f"trained {dims} for {cfg.epochs} epochs, final loss {history[-1]:.6f}")
    return 0


def cmd_predict(args, parser) -> int:
    model, _ = load_model(Path(args.model).read_text())
    vectors = features_from_csv(Path(args.features).read_text())
    if not vectors:
        raise ValueError("no feature rows to predict")
    X = np.array([v.counts for v in vectors], dtype=np.float64)
    labels = predict_batch(model, X)
    text = "".join(f"{int(lab)}\n" for lab in labels)
    if args.output:
        Path(args.output).write_text(text)
    else:
        print(text, end="")
    return 0


def _print_report(accuracy: float, confusion) -> None:
    print(f"accuracy: {accuracy * 100:.2f}%")
    print("confusion:")
    for row in confusion:
        print(" ".join(f"{int(v):4d}" for v in row))


def cmd_evaluate(args, parser) -> int:
    eff = _effective_config(args)
    if args.sweep:
        if args.features is not None:
            parser.error("--sweep takes a manifest as its single input")
        return _run_sweep(Path(args.input), args.images, eff)
    if args.features is None:
        parser.error("evaluate needs MODEL and FEATURES (or --sweep MANIFEST)")
    model, _ = load_model(Path(args.input).read_text())
    vectors = features_from_csv(Path(args.features).read_text())
    X, y = as_arrays(vectors)
    print(_config_line(eff))
    accuracy, confusion = evaluate(model, X, y)
    _print_report(accuracy, confusion)
    return 0


def _run_sweep(manifest: Path, images_dir, eff: dict) -> int:
    """Train and score one model per grid size, reusing extracted minutiae."""
    cfg = _pipeline_config(eff)
    done, rejects = _extract_dataset_minutiae(manifest, images_dir, cfg)
    if not done:
        raise FaceprintError("no image in the manifest survived extraction")
    print(_config_line(eff))
    if rejects:
        print(f"# rejected: {len(rejects)}")
    print("blocks performance_rate")
    for grid in TABLE_GRIDS:
        vectors = []
        for name, label, points, (height, width) in done:
            vector = block_features(points, width=width, height=height, grid=grid)
            vector.label = label
            vectors.append(vector)
        split = split_dataset(vectors, train_fraction=eff["train_fraction"], seed=eff["seed"])
        X_train, y_train = as_arrays(split.train)
        X_test, y_test = as_arrays(split.test)
        model, _ = train(X_train, y_train, _train_config(eff))
        accuracy, _ = evaluate(model, X_test, y_test)
        print(f"{grid}x{grid} {accuracy * 100:.2f}%")
    return 0


def cmd_synth(args, parser) -> int:
    eff = _effective_config(args)
    start = time.perf_counter()
    rows = generate_dataset(args.identities, args.samples, eff["seed"], args.output)
    elapsed = time.perf_counter() - start
    print(f"wrote {len(rows)} images + manifest.csv to {args.output} ({elapsed:.1f}s)")
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_config_opt(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="FILE", help="key = value config file")


def _add_perfusion_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--erode-iters", dest="erode_iters", type=int, metavar="N")
    p.add_argument("--se", choices=("cross3", "square3"))


def _add_prune_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--border-margin", dest="border_margin", type=int, metavar="N")
    p.add_argument("--min-sep", dest="min_sep", type=int, metavar="N")


def _add_train_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lr", type=float, metavar="R")
    p.add_argument("--momentum", type=float, metavar="R")
    p.add_argument("--epochs", type=int, metavar="N")


def _add_seed_opt(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, metavar="N")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="faceprint",
        description="Thermal face recognition pipeline: segmentation, minutiae, MLP.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("binarize", help="threshold a grayscale PGM at its mean")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    _add_config_opt(p)
    p.set_defaults(func=cmd_binarize)

    p = sub.add_parser("segment", help="extract and crop the face mask")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    _add_config_opt(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("perfusion", help="erode a mask and skeletonize it")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    _add_perfusion_opts(p)
    _add_config_opt(p)
    p.set_defaults(func=cmd_perfusion)

    p = sub.add_parser("minutiae", help="detect and prune skeleton minutiae")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--overlay", metavar="PGM", help="write a debug overlay image")
    _add_prune_opts(p)
    _add_config_opt(p)
    p.set_defaults(func=cmd_minutiae)

    p = sub.add_parser("features", help="extract feature vectors for a manifest")
    p.add_argument("manifest")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--images", metavar="DIR", help="image directory (default: manifest's)")
    p.add_argument("--grid", type=int, metavar="N")
    _add_perfusion_opts(p)
    _add_prune_opts(p)
    _add_config_opt(p)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("split", help="stratified train/test split of a feature CSV")
    p.add_argument("features")
    p.add_argument("-o", "--output", required=True, help="train CSV path")
    p.add_argument("--test-out", dest="test_out", required=True, help="test CSV path")
    p.add_argument("--train-fraction", dest="train_fraction", type=float, metavar="R")
    _add_seed_opt(p)
    _add_config_opt(p)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="train the classifier on a feature CSV")
    p.add_argument("features")
    p.add_argument("-o", "--output", required=True, help="model file path")
    _add_train_opts(p)
    _add_seed_opt(p)
    _add_config_opt(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict labels for a feature CSV")
    p.add_argument("model")
    p.add_argument("features")
    p.add_argument("-o", "--output")
    _add_config_opt(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser(
        "evaluate", help="score a model on a feature CSV, or --sweep a manifest"
    )
    p.add_argument("input", help="model file, or manifest with --sweep")
    p.add_argument("features", nargs="?", help="feature CSV (model form)")
    p.add_argument("--sweep", action="store_true", help="run grids 8/16/32 end to end")
    p.add_argument("--images", metavar="DIR")
    p.add_argument("--grid", type=int, metavar="N")
    p.add_argument("--train-fraction", dest="train_fraction", type=float, metavar="R")
    _add_perfusion_opts(p)
    _add_prune_opts(p)
    _add_train_opts(p)
    _add_seed_opt(p)
    _add_config_opt(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="generate a synthetic labeled dataset")
    p.add_argument("-n", "--identities", type=_positive_int, required=True, metavar="N")
    p.add_argument("-k", "--samples", type=_positive_int, required=True, metavar="K")
    p.add_argument("-o", "--output", required=True, metavar="DIR")
    _add_seed_opt(p)
    _add_config_opt(p)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (FaceprintError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
