"""Command-line front door: synthesis, RQA extraction, training,
identification, recognition, evaluation, importance, and augmentation.

Every subcommand accepts ``--seed`` and derives all randomness from it,
so repeating an invocation with identical flags writes byte-identical
files; ``--jobs`` changes wall time only. ``--params FILE`` reads a flat
``key = value`` text file whose keys are long option names with
underscores (``window_len = 250``); explicit flags still win. Exit
codes: 0 success, 1 usage, 2 unreadable input data, 3 validation or
convergence failure.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .errors import ConvergenceError, ParseError, ValidationError
from .features import (DEFAULT_SAMPLES, FeatureRegistry, Scaler,
                       featurize_segments, feature_vector, read_feature_csv,
                       standardize, write_feature_csv)
from .forest import ForestConfig
from .imu import (CHANNELS, DEFAULT_RATE_HZ, LabeledDataset, extract_segment,
                  parse_imu_csv, parse_label_csv)
from .pipeline import (CentroidTrainer, ForestTrainer, IdentificationConfig,
                       SvmTrainer, identify_segments, is_sample_feature,
                       noise_augment, permutation_importance, loso_evaluate,
                       subset_features, train_identifier, write_confusion_csv,
                       write_importance_csv, write_report_csv)
from .rqa import (EmbeddingConfig, NORMS, RpConfig, RqaWindowConfig,
                  recurrence_plot, time_delay_embed, windowed_rqa,
                  write_rp_pgm, write_rqa_csv)
from .svm import (KERNEL_KINDS, KernelConfig, load_model, ovo_predict,
                  ovo_train, save_model)
from .synth import SynthConfig, generate_dataset, write_dataset

DEFAULTS_EPILOG = """\
tuned defaults:
  windowed RQA        window 125, step 25, delay 1, dimension 4,
                      threshold 0.1, L2 (Euclidean) norm
  identification SVM  polynomial kernel, gamma 0.95, cost 3,
                      degree 3, coef0 2
  recognition SVM     radial kernel, gamma 0.005, cost 1
  features            43 selected statistics + 10 resampled samples per
                      acceleration axis (73 total); augmentation sigma 0.5
  synthesis           15 subjects, 5 repetitions of each of 12 gestures,
                      50 Hz sampling
  forest baseline     100 trees, depth 10
"""


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1; argparse's default would be 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _pool(jobs: int):
    if jobs < 1:
        raise ValidationError("--jobs must be >= 1")
    return ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None


def _add_common(sub, jobs=False):
    sub.add_argument("--seed", type=int, default=0,
                     help="master seed for every random draw (default 0)")
    sub.add_argument("--params", metavar="FILE",
                     help="flat `key = value` file overriding option "
                          "defaults")
    if jobs:
        sub.add_argument("--jobs", type=int, default=1,
                         help="worker processes; results are identical "
                              "for any value (default 1)")


def _add_rqa(sub):
    sub.add_argument("--series", default="acc_y", choices=CHANNELS,
                     help="channel to analyse (default acc_y)")
    sub.add_argument("--window-len", type=int, default=125,
                     help="window length in samples (default 125)")
    sub.add_argument("--step", type=int, default=25,
                     help="window step in samples (default 25)")
    sub.add_argument("--delay", type=int, default=1,
                     help="embedding delay (default 1)")
    sub.add_argument("--dimension", type=int, default=4,
                     help="embedding dimension (default 4)")
    sub.add_argument("--epsilon", type=float, default=0.1,
                     help="recurrence threshold (default 0.1)")
    sub.add_argument("--norm", default="L2", choices=NORMS,
                     help="state-distance norm (default L2)")


def _add_id_svm(sub):
    sub.add_argument("--kernel", default="polynomial", choices=KERNEL_KINDS,
                     help="kernel kind (default polynomial)")
    sub.add_argument("--gamma", type=float, default=0.95,
                     help="kernel gamma (default 0.95)")
    sub.add_argument("--cost", type=float, default=3.0,
                     help="soft-margin cost (default 3)")
    sub.add_argument("--degree", type=int, default=3,
                     help="polynomial degree (default 3)")
    sub.add_argument("--coef0", type=float, default=2.0,
                     help="polynomial/sigmoid offset (default 2)")


def _add_rec_svm(sub):
    sub.add_argument("--kernel", default="radial", choices=KERNEL_KINDS,
                     help="kernel kind (default radial)")
    sub.add_argument("--gamma", type=float, default=0.005,
                     help="kernel gamma; omit --gamma for 1/n_features "
                          "(default 0.005)")
    sub.add_argument("--cost", type=float, default=1.0,
                     help="soft-margin cost (default 1)")
    sub.add_argument("--degree", type=int, default=3,
                     help="polynomial degree (default 3)")
    sub.add_argument("--coef0", type=float, default=0.0,
                     help="polynomial/sigmoid offset (default 0)")


def _add_features(sub, default="full"):
    sub.add_argument("--features", default=default,
                     choices=("full", "stats", "samples"),
                     help="feature set: 63 statistics + samples, "
                          "statistics only, or resampled accelerations "
                          f"only (default {default})")
    sub.add_argument("--samples", type=int, default=DEFAULT_SAMPLES,
                     help="resampled points per acceleration axis "
                          "(default 10)")


def _kernel_from(args) -> KernelConfig:
    return KernelConfig(kind=args.kernel, gamma=args.gamma,
                        coef0=args.coef0, degree=args.degree)


def _id_config(args) -> IdentificationConfig:
    return IdentificationConfig(
        window=RqaWindowConfig(window_len=args.window_len, step=args.step),
        embedding=EmbeddingConfig(m=args.dimension, tau=args.delay),
        rp=RpConfig(epsilon=args.epsilon, norm=args.norm),
        series=args.series,
        overlap_fraction=getattr(args, "overlap", 0.5),
        n_balance_iters=getattr(args, "iterations", 100),
        kernel=_kernel_from(args),
        cost=args.cost)


def _data_dir(root, kind: str) -> Path:
    root = Path(root)
    sub = root / kind
    return sub if sub.is_dir() else root


def _load_streams(folder, rate_hz: float):
    folder = Path(folder)
    pairs = []
    for p in sorted(folder.glob("*.csv")):
        if p.name.endswith("_labels.csv"):
            continue
        labels = p.with_name(p.stem + "_labels.csv")
        if not labels.exists():
            raise ParseError(f"{labels}: missing label file")
        pairs.append((parse_imu_csv(p, rate_hz=rate_hz),
                      parse_label_csv(labels)))
    if not pairs:
        raise ParseError(f"{folder}: no stream CSVs found")
    return pairs


def _load_segments(root, rate_hz: float):
    out = []
    for stream, intervals in _load_streams(_data_dir(root, "recognition"),
                                           rate_hz):
        for iv in intervals:
            out.append((extract_segment(stream, iv), iv.label))
    return out


def _feature_columns(names, which: str):
    if which == "full":
        return None
    want_samples = which == "samples"
    return [i for i, nm in enumerate(names)
            if is_sample_feature(nm) == want_samples]


def _segment_dataset(args) -> LabeledDataset:
    dataset = featurize_segments(_load_segments(args.data, args.rate),
                                 n_samples=args.samples)
    cols = _feature_columns(dataset.feature_names, args.features)
    return dataset if cols is None else subset_features(dataset, cols)


def read_params(path) -> dict[str, str]:
    """Flat config file: one ``key = value`` per line, ``#`` comments."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from None
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ParseError(f"{path}: line {lineno}: expected `key = value`")
        out[key.replace("-", "_")] = value
    return out


def _typed_overrides(sub: argparse.ArgumentParser, params_path) -> dict:
    raw = read_params(params_path)
    actions = {a.dest: a for a in sub._actions}
    out = {}
    for key, value in raw.items():
        action = actions.get(key)
        if action is None or key in ("help", "params"):
            raise ParseError(f"{params_path}: unknown parameter {key!r}")
        if action.choices is not None and value not in action.choices:
            raise ParseError(f"{params_path}: {key} must be one of "
                             f"{list(action.choices)}, got {value!r}")
        if action.type is not None:
            try:
                value = action.type(value)
            except (TypeError, ValueError):
                raise ParseError(f"{params_path}: invalid value for "
                                 f"{key!r}: {value!r}") from None
        out[key] = value
    return out


def _cmd_synth(args) -> int:
    cfg = SynthConfig(n_subjects=args.subjects, reps=args.reps,
                      rate_hz=args.rate, adl_minutes=args.adl_minutes,
                      gesture_fraction=args.gesture_fraction, seed=args.seed)
    pool = _pool(args.jobs)
    try:
        result = generate_dataset(cfg, pool.map if pool else map)
    finally:
        if pool:
            pool.shutdown()
    write_dataset(result, args.out)
    n_seg = sum(len(iv) for _, iv in result.recognition)
    line = f"wrote {cfg.n_subjects} subjects, {n_seg} segments"
    if result.identification:
        line += f", {len(result.identification)} continuous streams"
    print(f"{line} to {args.out}")
    return 0


def _cmd_rqa_features(args) -> int:
    stream = parse_imu_csv(args.infile, rate_hz=args.rate)
    rows = windowed_rqa(stream.channel(args.series),
                        EmbeddingConfig(m=args.dimension, tau=args.delay),
                        RpConfig(epsilon=args.epsilon, norm=args.norm),
                        RqaWindowConfig(window_len=args.window_len,
                                        step=args.step))
    write_rqa_csv(rows, args.outfile)
    print(f"wrote {len(rows)} windows to {args.outfile}")
    return 0


def _cmd_rp_export(args) -> int:
    stream = parse_imu_csv(args.infile, rate_hz=args.rate)
    series = stream.channel(args.series)
    if args.length is not None:
        end = args.start + args.length
        if args.start < 0 or end > len(series):
            raise ValidationError(
                f"window [{args.start}, {end}) out of bounds for "
                f"{len(series)} samples")
        series = series[args.start:end]
    emb = EmbeddingConfig(m=args.dimension, tau=args.delay)
    plot = recurrence_plot(time_delay_embed(series, emb),
                           RpConfig(epsilon=args.epsilon, norm=args.norm),
                           emb)
    write_rp_pgm(plot, args.outfile)
    print(f"wrote {plot.n_states} x {plot.n_states} plot to {args.outfile}")
    return 0


def _cmd_train_identifier(args) -> int:
    data = _load_streams(_data_dir(args.data, "identification"), args.rate)
    cfg = _id_config(args)
    pool = _pool(args.jobs)
    try:
        model, report = train_identifier(data, cfg, seed=args.seed,
                                         mapper=pool.map if pool else map)
    finally:
        if pool:
            pool.shutdown()
    save_model(model, args.out)
    if args.report:
        write_report_csv(report, args.report)
    if args.confusion:
        write_confusion_csv(report, args.confusion)
    print(report.summary())
    return 0


def _cmd_identify(args) -> int:
    stream = parse_imu_csv(args.infile, rate_hz=args.rate)
    model = load_model(args.model)
    segments = identify_segments(stream, model, _id_config(args))
    with open(args.outfile, "w", encoding="utf-8", newline="") as fh:
        fh.write("start,end,subject\n")
        for start, end in segments:
            fh.write(f"{start},{end},{stream.subject_id}\n")
    print(f"found {len(segments)} candidate segments in {args.infile}")
    return 0


def _train_recognizer_model(dataset: LabeledDataset, args):
    kernel = _kernel_from(args)
    if args.augment_sigma is not None:
        scaler, scaled, _ = standardize(dataset.X)
        augmented = noise_augment(
            LabeledDataset(X=scaled, labels=list(dataset.labels),
                           subjects=list(dataset.subjects),
                           feature_names=list(dataset.feature_names)),
            args.augment_sigma, seed=args.seed)
        return ovo_train(augmented, kernel, args.cost, seed=args.seed,
                         scaler=scaler, prescaled=True)
    return ovo_train(dataset, kernel, args.cost, seed=args.seed)


def _cmd_train_recognizer(args) -> int:
    dataset = _segment_dataset(args)
    model = _train_recognizer_model(dataset, args)
    save_model(model, args.out)
    print(f"trained {len(model.models)} pairwise models on "
          f"{len(dataset)} segments, {dataset.X.shape[1]} features")
    return 0


def _cmd_recognize(args) -> int:
    model = load_model(args.model)
    wanted = model.registry.names
    sample_idx = [int(nm.rsplit("_s", 1)[1]) for nm in wanted
                  if is_sample_feature(nm)]
    n_samples = max(sample_idx, default=DEFAULT_SAMPLES)
    full = FeatureRegistry.recognition(n_samples)
    index = {nm: i for i, nm in enumerate(full.names)}
    try:
        cols = [index[nm] for nm in wanted]
    except KeyError as exc:
        raise ValidationError(
            f"model expects feature {exc.args[0]!r}, which segment "
            "featurization does not produce") from None
    segment = parse_imu_csv(args.infile, rate_hz=args.rate)
    label, votes = ovo_predict(model, feature_vector(segment, n_samples)[cols])
    runner = sorted(votes.items(), key=lambda kv: (-kv[1], kv[0]))
    detail = ", ".join(f"{c}={v}" for c, v in runner[:3])
    print(label)
    print(f"votes: {detail}", file=sys.stderr)
    return 0


def _cmd_evaluate(args) -> int:
    dataset = _segment_dataset(args)
    if args.classifier == "svm":
        trainer = SvmTrainer(kernel=_kernel_from(args), cost=args.cost,
                             select_k=args.select,
                             augment_sigma=args.augment_sigma)
    else:
        trainer = ForestTrainer(ForestConfig(n_trees=args.trees,
                                             max_depth=args.depth))
    pool = _pool(args.jobs)
    try:
        report = loso_evaluate(dataset, trainer, seed=args.seed,
                               mapper=pool.map if pool else map)
    finally:
        if pool:
            pool.shutdown()
    write_report_csv(report, args.report)
    if args.confusion:
        write_confusion_csv(report, args.confusion)
    print(report.summary())
    return 0


def _cmd_importance(args) -> int:
    dataset = _segment_dataset(args)
    if args.classifier == "svm":
        trainer = SvmTrainer(kernel=_kernel_from(args), cost=args.cost)
    else:
        trainer = CentroidTrainer()
    pool = _pool(args.jobs)
    try:
        result = permutation_importance(dataset, trainer, n_reps=args.reps,
                                        seed=args.seed,
                                        mapper=pool.map if pool else map)
    finally:
        if pool:
            pool.shutdown()
    write_importance_csv(result, args.outfile)
    ranked = sorted(zip(result.drop, result.feature_names), reverse=True)
    top = ", ".join(f"{nm} ({d:+.4f})" for d, nm in ranked[:3])
    print(f"baseline accuracy {result.baseline:.4f}; largest drops: {top}")
    return 0


def _cmd_augment(args) -> int:
    dataset = read_feature_csv(args.infile)
    scaler = Scaler.fit(dataset.X)
    scaled = LabeledDataset(X=scaler.transform(dataset.X),
                            labels=list(dataset.labels),
                            subjects=list(dataset.subjects),
                            feature_names=list(dataset.feature_names))
    augmented = noise_augment(scaled, args.sigma, seed=args.seed)
    n = len(dataset)
    noisy_raw = augmented.X[n:] * scaler.std + scaler.mean
    out = LabeledDataset(X=np.vstack([dataset.X, noisy_raw]),
                         labels=list(augmented.labels),
                         subjects=list(augmented.subjects),
                         feature_names=list(dataset.feature_names))
    write_feature_csv(out, args.outfile)
    print(f"wrote {len(out)} rows ({n} original + {n} noisy) to "
          f"{args.outfile}")
    return 0


def build_parser():
    parser = _Parser(prog="gesturekit",
                     description="Gesture identification and recognition "
                                 "on wearable IMU streams.")
    subs = {}
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")

    def sub(name, handler, help_text, jobs=False):
        p = commands.add_parser(
            name, help=help_text, description=help_text,
            epilog=DEFAULTS_EPILOG,
            formatter_class=argparse.RawDescriptionHelpFormatter)
        p.set_defaults(func=handler)
        _add_common(p, jobs=jobs)
        subs[name] = p
        return p

    p = sub("synth", _cmd_synth,
            "Generate a synthetic labeled IMU corpus.", jobs=True)
    p.add_argument("--out", required=True, metavar="DIR",
                   help="output dataset directory")
    p.add_argument("--subjects", type=int, default=15,
                   help="number of synthetic subjects (default 15)")
    p.add_argument("--reps", type=int, default=5,
                   help="repetitions of each gesture per subject (default 5)")
    p.add_argument("--rate", type=float, default=DEFAULT_RATE_HZ,
                   help="sampling rate in Hz (default 50)")
    p.add_argument("--adl-minutes", type=float, default=0.0,
                   help="continuous background stream length per subject; "
                        "0 skips identification streams (default 0)")
    p.add_argument("--gesture-fraction", type=float, default=0.005,
                   help="fraction of background samples inside gestures "
                        "(default 0.005)")

    p = sub("rqa-features", _cmd_rqa_features,
            "Windowed recurrence features (rr, tra) from one stream.")
    p.add_argument("--in", dest="infile", required=True, metavar="CSV",
                   help="input IMU stream")
    p.add_argument("--out", dest="outfile", required=True, metavar="CSV",
                   help="output feature table")
    p.add_argument("--rate", type=float, default=DEFAULT_RATE_HZ,
                   help="sampling rate in Hz (default 50)")
    _add_rqa(p)

    p = sub("rp-export", _cmd_rp_export,
            "Export one recurrence plot as a PGM image.")
    p.add_argument("--in", dest="infile", required=True, metavar="CSV",
                   help="input IMU stream")
    p.add_argument("--out", dest="outfile", required=True, metavar="PGM",
                   help="output image (P5, white = recurrence)")
    p.add_argument("--rate", type=float, default=DEFAULT_RATE_HZ,
                   help="sampling rate in Hz (default 50)")
    p.add_argument("--start", type=int, default=0,
                   help="first sample of the exported span (default 0)")
    p.add_argument("--length", type=int, default=None,
                   help="span length in samples (default: whole stream)")
    _add_rqa(p)

    p = sub("train-identifier", _cmd_train_identifier,
            "Train the gesture-window identifier on continuous streams.",
            jobs=True)
    p.add_argument("--data", required=True, metavar="DIR",
                   help="dataset root or folder of stream + label CSVs")
    p.add_argument("--out", required=True, metavar="MODEL",
                   help="output model file")
    p.add_argument("--report", metavar="CSV",
                   help="per-fold metric table")
    p.add_argument("--confusion", metavar="CSV",
                   help="summed confusion matrix")
    p.add_argument("--rate", type=float, default=DEFAULT_RATE_HZ,
                   help="sampling rate in Hz (default 50)")
    p.add_argument("--overlap", type=float, default=0.5,
                   help="fraction of a gesture that must fall inside a "
                        "window to label it positive (default 0.5)")
    p.add_argument("--iterations", type=int, default=100,
                   help="balanced redraws per fold (default 100)")
    _add_rqa(p)
    _add_id_svm(p)

    p = sub("identify", _cmd_identify,
            "Locate candidate gesture segments in a continuous stream.")
    p.add_argument("--in", dest="infile", required=True, metavar="CSV",
                   help="input IMU stream")
    p.add_argument("--model", required=True, metavar="MODEL",
                   help="identifier model file")
    p.add_argument("--out", dest="outfile", required=True, metavar="CSV",
                   help="output segment table (start,end,subject)")
    p.add_argument("--rate", type=float, default=DEFAULT_RATE_HZ,
                   help="sampling rate in Hz (default 50)")
    _add_rqa(p)
    _add_id_svm(p)

    p = sub("train-recognizer", _cmd_train_recognizer,
            "Train the 12-class gesture recognizer on labeled segments.")
    p.add_argument("--data", required=True, metavar="DIR",
                   help="dataset root or folder of segment streams")
    p.add_argument("--out", required=True, metavar="MODEL",
                   help="output model file")
    p.add_argument("--rate", type=float, default=DEFAULT_RATE_HZ,
                   help="sampling rate in Hz (default 50)")
    p.add_argument("--augment-sigma", type=float, default=None,
                   help="train on originals plus noisy copies with this "
                        "z-score noise scale (default: off; tuned 0.5)")
    _add_features(p)
    _add_rec_svm(p)

    p = sub("recognize", _cmd_recognize,
            "Classify one gesture segment with a trained recognizer.")
    p.add_argument("--in", dest="infile", required=True, metavar="CSV",
                   help="segment stream to classify")
    p.add_argument("--model", required=True, metavar="MODEL",
                   help="recognizer model file")
    p.add_argument("--rate", type=float, default=DEFAULT_RATE_HZ,
                   help="sampling rate in Hz (default 50)")

    p = sub("evaluate", _cmd_evaluate,
            "Leave-one-subject-out evaluation on labeled segments.",
            jobs=True)
    p.add_argument("--data", required=True, metavar="DIR",
                   help="dataset root or folder of segment streams")
    p.add_argument("--mode", default="loso", choices=("loso",),
                   help="cross-validation scheme (default loso)")
    p.add_argument("--classifier", default="svm", choices=("svm", "forest"),
                   help="model family (default svm)")
    p.add_argument("--report", default="report.csv", metavar="CSV",
                   help="per-fold metric table (default report.csv)")
    p.add_argument("--confusion", metavar="CSV",
                   help="summed confusion matrix")
    p.add_argument("--rate", type=float, default=DEFAULT_RATE_HZ,
                   help="sampling rate in Hz (default 50)")
    p.add_argument("--select", type=int, default=None,
                   help="rank statistical features per fold and keep this "
                        "many (default: off; tuned 43)")
    p.add_argument("--augment-sigma", type=float, default=None,
                   help="per-fold noise augmentation scale "
                        "(default: off; tuned 0.5)")
    p.add_argument("--trees", type=int, default=100,
                   help="forest size (default 100)")
    p.add_argument("--depth", type=int, default=10,
                   help="forest depth cap (default 10)")
    _add_features(p)
    _add_rec_svm(p)

    p = sub("importance", _cmd_importance,
            "Permutation importance of segment features.", jobs=True)
    p.add_argument("--data", required=True, metavar="DIR",
                   help="dataset root or folder of segment streams")
    p.add_argument("--out", dest="outfile", required=True, metavar="CSV",
                   help="output table (feature,mean_accuracy,drop)")
    p.add_argument("--rate", type=float, default=DEFAULT_RATE_HZ,
                   help="sampling rate in Hz (default 50)")
    p.add_argument("--reps", type=int, default=100,
                   help="permutations per feature (default 100)")
    p.add_argument("--classifier", default="svm",
                   choices=("svm", "centroid"),
                   help="model retrained per permutation; centroid is a "
                        "fast approximation (default svm)")
    _add_features(p, default="stats")
    _add_rec_svm(p)

    p = sub("augment", _cmd_augment,
            "Append noisy copies to a feature table.")
    p.add_argument("--in", dest="infile", required=True, metavar="CSV",
                   help="input feature table")
    p.add_argument("--out", dest="outfile", required=True, metavar="CSV",
                   help="output table with originals then noisy copies")
    p.add_argument("--sigma", type=float, default=0.5,
                   help="noise scale in per-feature standard deviations "
                        "(default 0.5)")

    return parser, subs


def dispatch(argv) -> int:
    """Parse and run one invocation; returns the exit status."""
    parser, subs = build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
        if getattr(args, "func", None) is None:
            parser.print_usage(sys.stderr)
            return 1
        if getattr(args, "params", None):
            subs[args.command].set_defaults(
                **_typed_overrides(subs[args.command], args.params))
            try:
                args = parser.parse_args(argv)
            except SystemExit as exc:
                return int(exc.code or 0)
        return args.func(args)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    entrypoint()
