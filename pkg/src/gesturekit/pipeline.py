"""End-to-end orchestration: window labeling, identification training
with ADL rebalancing, segment assembly, permutation importance, feature
selection, noise augmentation, LOSO evaluation, and report files.

Folds, balance iterations, and permutation repetitions each draw from an
rng derived as (master seed, task key), so any of them may run under a
parallel mapper without changing a single output byte. Trainers are small
picklable callables with the shared signature
``trainer(train_dataset, test_rows, seed) -> predicted labels``; the test
labels never reach a trainer, and scalers / selected feature sets are fit
inside the trainer on its training rows only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ValidationError
from .features import standardize
from .forest import ForestConfig, forest_train_predict
from .imu import ADL_LABEL, ImuStream, LabeledDataset
from .rqa import EmbeddingConfig, RpConfig, RqaWindowConfig, windowed_rqa
from .seeding import (AUGMENT, BALANCE, FINAL, FOLD, PERMUTE, TRAINER,
                      derive_int, derive_rng)
from .svm import PRESETS, KernelConfig, ovo_train

GESTURE_WINDOW_LABEL = "gesture"
_SAMPLE_NAME = re.compile(r"acc_[xyz]_s\d+")


@dataclass(frozen=True)
class IdentificationConfig:
    """Windowed-RQA geometry plus the identification training knobs."""
    window: RqaWindowConfig = field(default_factory=RqaWindowConfig)
    embedding: EmbeddingConfig = field(default_factory=EmbeddingConfig)
    rp: RpConfig = field(default_factory=RpConfig)
    series: str = "acc_y"
    overlap_fraction: float = 0.5
    n_balance_iters: int = 100
    kernel: KernelConfig = field(
        default_factory=lambda: PRESETS["identification"][0])
    cost: float = PRESETS["identification"][1]

    def __post_init__(self):
        if not 0.0 < self.overlap_fraction <= 1.0:
            raise ValidationError("overlap_fraction must be in (0, 1]")
        if self.n_balance_iters < 1:
            raise ValidationError("n_balance_iters must be >= 1")


@dataclass(frozen=True)
class EvaluationReport:
    """Per-fold metrics and the confusion matrix summed over folds."""
    folds: tuple[str, ...]              # held-out subject per fold
    accuracy: np.ndarray
    balanced: np.ndarray
    classes: tuple[str, ...]
    confusion: np.ndarray               # (K, K) counts, rows = true class

    def __post_init__(self):
        acc = np.asarray(self.accuracy, dtype=np.float64)
        bal = np.asarray(self.balanced, dtype=np.float64)
        conf = np.asarray(self.confusion, dtype=np.int64)
        if not (len(acc) == len(bal) == len(self.folds)):
            raise ValidationError("one metric row per fold required")
        k = len(self.classes)
        if conf.shape != (k, k):
            raise ValidationError("confusion matrix must be K x K")
        for a in (acc, bal):
            if len(a) and (a.min() < 0 or a.max() > 1):
                raise ValidationError("accuracies must lie in [0, 1]")
        object.__setattr__(self, "accuracy", acc)
        object.__setattr__(self, "balanced", bal)
        object.__setattr__(self, "confusion", conf)

    @property
    def mean_accuracy(self) -> float:
        return float(self.accuracy.mean())

    @property
    def mean_balanced(self) -> float:
        return float(self.balanced.mean())

    def summary(self) -> str:
        return (f"folds={len(self.folds)} "
                f"accuracy mean={self.mean_accuracy:.4f} "
                f"min={self.accuracy.min():.4f} max={self.accuracy.max():.4f} "
                f"balanced mean={self.mean_balanced:.4f}")


def confusion_matrix(classes, true_labels, pred_labels) -> np.ndarray:
    index = {c: i for i, c in enumerate(classes)}
    out = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(true_labels, pred_labels):
        out[index[t], index[p]] += 1
    return out


def balanced_accuracy(confusion) -> float:
    """Mean per-class recall; for a 2x2 matrix this is (TPR + TNR) / 2."""
    conf = np.asarray(confusion, dtype=np.float64)
    totals = conf.sum(axis=1)
    if np.any(totals == 0):
        raise ValidationError("every true class needs at least one sample")
    return float((np.diag(conf) / totals).mean())


def label_windows(stream: ImuStream, intervals, win: RqaWindowConfig,
                  overlap_fraction: float = 0.5) -> list[str]:
    """Binary window labels: gesture if enough of some interval is inside.

    A window is a gesture window iff at least ``overlap_fraction`` of any
    single interval's duration falls within it; otherwise it is ADL.
    """
    n = len(stream)
    for iv in intervals:
        if iv.end > n:
            raise ValidationError(
                f"interval [{iv.start}, {iv.end}) exceeds stream length {n}")
    labels = []
    for s in win.starts(n):
        s = int(s)
        e = s + win.window_len
        hit = any(min(iv.end, e) - max(iv.start, s)
                  >= overlap_fraction * len(iv) for iv in intervals)
        labels.append(GESTURE_WINDOW_LABEL if hit else ADL_LABEL)
    return labels


def window_features(stream: ImuStream, cfg: IdentificationConfig):
    """(window starts, (n, 2) rr/tra matrix) for one stream."""
    rows = windowed_rqa(stream.channel(cfg.series), cfg.embedding, cfg.rp,
                        cfg.window)
    starts = np.array([r.window_start for r in rows], dtype=np.int64)
    X = np.array([[r.rr, r.tra] for r in rows], dtype=np.float64)
    return starts, X


def windows_dataset(data, cfg: IdentificationConfig) -> LabeledDataset:
    """Stack (stream, intervals) pairs into a window-level dataset."""
    X_parts, labels, subjects = [], [], []
    for stream, intervals in data:
        _, X = window_features(stream, cfg)
        X_parts.append(X)
        labels.extend(label_windows(stream, intervals, cfg.window,
                                    cfg.overlap_fraction))
        subjects.extend([stream.subject_id] * len(X))
    return LabeledDataset(X=np.vstack(X_parts), labels=labels,
                          subjects=subjects, feature_names=["rr", "tra"])


def subset_features(dataset: LabeledDataset, indices) -> LabeledDataset:
    indices = list(indices)
    return LabeledDataset(X=dataset.X[:, indices],
                          labels=list(dataset.labels),
                          subjects=list(dataset.subjects),
                          feature_names=[dataset.feature_names[i]
                                         for i in indices])


def _balanced_subset(dataset, rng) -> LabeledDataset:
    """All gesture windows plus an equal-size ADL draw (no replacement)."""
    labels = np.asarray(dataset.labels)
    gesture = np.flatnonzero(labels == GESTURE_WINDOW_LABEL)
    adl = np.flatnonzero(labels == ADL_LABEL)
    if len(gesture) == 0:
        raise ValidationError("no gesture windows in the training data")
    if len(adl) < len(gesture):
        raise ValidationError("not enough ADL windows for a balanced draw")
    pick = rng.choice(adl, size=len(gesture), replace=False)
    idx = np.concatenate([gesture, np.sort(pick)])
    return LabeledDataset(X=dataset.X[idx],
                          labels=[dataset.labels[i] for i in idx],
                          subjects=[dataset.subjects[i] for i in idx],
                          feature_names=list(dataset.feature_names))


def _identifier_fold(args):
    dataset, cfg, seed, fi, subject = args
    test_mask = dataset.rows_for_subjects([subject])
    train = LabeledDataset(X=dataset.X[~test_mask],
                           labels=[l for l, m in zip(dataset.labels, test_mask)
                                   if not m],
                           subjects=[s for s, m in
                                     zip(dataset.subjects, test_mask) if not m],
                           feature_names=list(dataset.feature_names))
    test_X = dataset.X[test_mask]
    test_labels = [l for l, m in zip(dataset.labels, test_mask) if m]
    order = (ADL_LABEL, GESTURE_WINDOW_LABEL)
    accs, bals = [], []
    gesture_votes = np.zeros(len(test_labels), dtype=np.int64)
    for it in range(cfg.n_balance_iters):
        rng = derive_rng(seed, BALANCE, fi, it)
        subset = _balanced_subset(train, rng)
        model = ovo_train(subset, cfg.kernel, cfg.cost,
                          seed=derive_int(seed, TRAINER, fi, it))
        pred = model.predict(test_X)
        conf = confusion_matrix(order, test_labels, pred)
        accs.append(float(np.trace(conf) / conf.sum()))
        bals.append(balanced_accuracy(conf))
        gesture_votes += np.asarray(pred) == GESTURE_WINDOW_LABEL
    # majority vote across iterations; exact ties fall to ADL
    majority = [GESTURE_WINDOW_LABEL
                if 2 * v > cfg.n_balance_iters else ADL_LABEL
                for v in gesture_votes]
    conf = confusion_matrix(order, test_labels, majority)
    return subject, float(np.mean(accs)), float(np.mean(bals)), conf


def train_identifier(data, cfg: IdentificationConfig, seed=0, mapper=map):
    """LOSO-style identification training with per-fold rebalancing.

    ``data`` is a sequence of (stream, intervals) pairs. Each fold holds
    one subject out; every balance iteration trains the pairwise SVM on
    all training gesture windows plus an equal-size ADL draw and tests on
    the held-out subject's windows. The report averages the iterations
    per fold and sums a majority-vote confusion matrix over folds; the
    returned model is trained on one balanced draw over all subjects.
    """
    dataset = windows_dataset(data, cfg)
    subjects = dataset.subject_ids()
    if len(subjects) < 2:
        raise ValidationError("need >=2 subjects")
    if GESTURE_WINDOW_LABEL not in dataset.labels:
        raise ValidationError("no gesture windows in the training data")
    tasks = [(dataset, cfg, seed, fi, s) for fi, s in enumerate(subjects)]
    rows = list(mapper(_identifier_fold, tasks))
    order = (ADL_LABEL, GESTURE_WINDOW_LABEL)
    report = EvaluationReport(
        folds=tuple(r[0] for r in rows),
        accuracy=np.array([r[1] for r in rows]),
        balanced=np.array([r[2] for r in rows]),
        classes=order,
        confusion=np.sum([r[3] for r in rows], axis=0))
    final_subset = _balanced_subset(dataset, derive_rng(seed, FINAL))
    model = ovo_train(final_subset, cfg.kernel, cfg.cost,
                      seed=derive_int(seed, FINAL, 0))
    return model, report


def identify_segments(stream: ImuStream, model,
                      cfg: IdentificationConfig) -> list[tuple[int, int]]:
    """Candidate gesture intervals from a model's window predictions.

    Runs of consecutive positive windows collapse to one interval of
    window length placed at the run's midpoint start; overlapping
    emissions keep the earlier one.
    """
    starts, X = window_features(stream, cfg)
    pred = model.predict(X)
    positive = [int(s) for s, p in zip(starts, pred)
                if p == GESTURE_WINDOW_LABEL]
    runs = []
    for s in positive:
        if runs and s - runs[-1][-1] == cfg.window.step:
            runs[-1].append(s)
        else:
            runs.append([s])
    out = []
    for run in runs:
        mid = (run[0] + run[-1]) // 2
        iv = (mid, mid + cfg.window.window_len)
        if out and iv[0] < out[-1][1]:
            continue
        out.append(iv)
    return out


@dataclass(frozen=True)
class ImportanceResult:
    feature_names: tuple[str, ...]
    baseline: float
    per_rep: np.ndarray          # (n_features, n_reps) accuracies
    mean_accuracy: np.ndarray    # per feature

    @property
    def drop(self) -> np.ndarray:
        return self.baseline - self.mean_accuracy


def _stratified_split(labels):
    """Deterministic half split: per class, even ranks train, odd test."""
    train_idx, test_idx = [], []
    by_class = {}
    for i, lab in enumerate(labels):
        by_class.setdefault(lab, []).append(i)
    for lab in sorted(by_class):
        rows = by_class[lab]
        train_idx.extend(rows[0::2])
        test_idx.extend(rows[1::2])
    if not test_idx:
        raise ValidationError("dataset too small to split")
    return np.sort(train_idx), np.sort(test_idx)


def _importance_accuracy(X, dataset, train_idx, test_idx, trainer,
                         trainer_seed):
    train = LabeledDataset(X=X[train_idx],
                           labels=[dataset.labels[i] for i in train_idx],
                           subjects=[dataset.subjects[i] for i in train_idx],
                           feature_names=list(dataset.feature_names))
    pred = trainer(train, X[test_idx], trainer_seed)
    truth = [dataset.labels[i] for i in test_idx]
    return float(np.mean([p == t for p, t in zip(pred, truth)]))


def _importance_feature(args):
    dataset, f, n_reps, seed, trainer, train_idx, test_idx, t_seed = args
    out = np.empty(n_reps)
    for r in range(n_reps):
        rng = derive_rng(seed, PERMUTE, f, r)
        Xp = dataset.X.copy()
        Xp[:, f] = Xp[rng.permutation(len(Xp)), f]
        out[r] = _importance_accuracy(Xp, dataset, train_idx, test_idx,
                                      trainer, t_seed)
    return out


def permutation_importance(dataset: LabeledDataset, trainer, n_reps=100,
                           seed=0, mapper=map) -> ImportanceResult:
    """Mean accuracy after permuting each feature column, plus baseline.

    The whole column is shuffled (seeded per feature and repetition)
    before a fixed stratified half split; the trainer is re-run with the
    same trainer seed every time, so permuting a constant column
    reproduces the baseline accuracy exactly.
    """
    if n_reps < 1:
        raise ValidationError("n_reps must be >= 1")
    if np.all(dataset.X.std(axis=0) == 0):
        raise ValidationError("every feature is constant; nothing to rank")
    train_idx, test_idx = _stratified_split(dataset.labels)
    t_seed = derive_int(seed, TRAINER)
    baseline = _importance_accuracy(dataset.X, dataset, train_idx, test_idx,
                                    trainer, t_seed)
    tasks = [(dataset, f, n_reps, seed, trainer, train_idx, test_idx, t_seed)
             for f in range(dataset.X.shape[1])]
    per_rep = np.vstack(list(mapper(_importance_feature, tasks)))
    return ImportanceResult(feature_names=tuple(dataset.feature_names),
                            baseline=baseline, per_rep=per_rep,
                            mean_accuracy=per_rep.mean(axis=1))


def is_sample_feature(name: str) -> bool:
    return _SAMPLE_NAME.fullmatch(name) is not None


def select_features(feature_names, mean_accuracy, baseline,
                    k: int = 43) -> list[int]:
    """Indices (ascending) of the k highest-drop statistical features
    plus every resampled-acceleration feature.

    Drop ties keep the earlier registry name.
    """
    names = list(feature_names)
    mean_accuracy = np.asarray(mean_accuracy, dtype=np.float64)
    if len(names) != len(mean_accuracy):
        raise ValidationError("one mean accuracy per feature required")
    stats = [i for i, nm in enumerate(names) if not is_sample_feature(nm)]
    samples = [i for i, nm in enumerate(names) if is_sample_feature(nm)]
    if k > len(stats):
        raise ValidationError(f"k={k} exceeds the {len(stats)} statistical "
                              "features")
    drop = baseline - mean_accuracy
    chosen = sorted(stats, key=lambda i: (-drop[i], i))[:k]
    return sorted(chosen + samples)


def noise_augment(train: LabeledDataset, sigma: float = 0.5,
                  seed=0) -> LabeledDataset:
    """Originals plus Gaussian-corrupted copies (2n rows).

    Meant to run after standardization, mirroring how the corrupted copy
    is produced on z-scored features. Labels and subjects duplicate
    one-to-one, so class and subject marginals are preserved exactly.
    """
    if sigma < 0:
        raise ValidationError("sigma must be non-negative")
    rng = derive_rng(seed, AUGMENT)
    noisy = train.X + rng.normal(0.0, 1.0, train.X.shape) * sigma
    return LabeledDataset(X=np.vstack([train.X, noisy]),
                          labels=list(train.labels) * 2,
                          subjects=list(train.subjects) * 2,
                          feature_names=list(train.feature_names))


@dataclass(frozen=True)
class CentroidTrainer:
    """Nearest class centroid on standardized features.

    Cheap deterministic stand-in used to rank features inside folds; the
    seed argument is accepted and ignored.
    """

    def __call__(self, train: LabeledDataset, test_rows, seed=0):
        scaler, Xs, test = standardize(train.X, test_rows)
        classes = train.classes
        labels = np.asarray(train.labels)
        centroids = np.vstack([Xs[labels == c].mean(axis=0) for c in classes])
        d = ((test[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        return [classes[i] for i in np.argmin(d, axis=1)]


@dataclass(frozen=True)
class SvmTrainer:
    """One-against-one SVM trainer with optional per-fold feature
    selection and noise augmentation.

    ``select_k`` turns on permutation-ranked selection of that many
    statistical features (sample features always kept), computed on the
    training rows with ``ranking`` (default: nearest centroid).
    ``augment_sigma`` standardizes, augments, then trains prescaled.
    """
    kernel: KernelConfig = PRESETS["recognition"][0]
    cost: float = PRESETS["recognition"][1]
    columns: tuple[int, ...] | None = None
    select_k: int | None = None
    importance_reps: int = 20
    ranking: object = CentroidTrainer()
    augment_sigma: float | None = None

    def __call__(self, train: LabeledDataset, test_rows, seed=0):
        test = np.atleast_2d(np.asarray(test_rows, dtype=np.float64))
        if self.columns is not None:
            train = subset_features(train, self.columns)
            test = test[:, list(self.columns)]
        if self.select_k is not None:
            imp = permutation_importance(train, self.ranking,
                                         n_reps=self.importance_reps,
                                         seed=seed)
            idx = select_features(train.feature_names, imp.mean_accuracy,
                                  imp.baseline, k=self.select_k)
            train = subset_features(train, idx)
            test = test[:, idx]
        if self.augment_sigma is not None:
            scaler, Xs, _ = standardize(train.X)
            scaled = LabeledDataset(X=Xs, labels=list(train.labels),
                                    subjects=list(train.subjects),
                                    feature_names=list(train.feature_names))
            augmented = noise_augment(scaled, self.augment_sigma, seed=seed)
            model = ovo_train(augmented, self.kernel, self.cost, seed=seed,
                              scaler=scaler, prescaled=True)
        else:
            model = ovo_train(train, self.kernel, self.cost, seed=seed)
        return model.predict(test)


@dataclass(frozen=True)
class ForestTrainer:
    config: ForestConfig = ForestConfig()

    def __call__(self, train: LabeledDataset, test_rows, seed=0):
        return forest_train_predict(train, test_rows,
                                    replace(self.config, seed=seed))


def _loso_fold(args):
    dataset, trainer, classes, seed, fi, subject = args
    mask = dataset.rows_for_subjects([subject])
    train = LabeledDataset(X=dataset.X[~mask],
                           labels=[l for l, m in zip(dataset.labels, mask)
                                   if not m],
                           subjects=[s for s, m in zip(dataset.subjects, mask)
                                     if not m],
                           feature_names=list(dataset.feature_names))
    test_X = dataset.X[mask]
    truth = [l for l, m in zip(dataset.labels, mask) if m]
    pred = trainer(train, test_X, derive_int(seed, FOLD, fi))
    conf = confusion_matrix(classes, truth, pred)
    acc = float(np.trace(conf) / conf.sum())
    present = conf.sum(axis=1) > 0
    recalls = np.diag(conf)[present] / conf.sum(axis=1)[present]
    return subject, acc, float(recalls.mean()), conf


def loso_evaluate(dataset: LabeledDataset, trainer, seed=0,
                  mapper=map) -> EvaluationReport:
    """Leave-one-subject-out evaluation: one fold per distinct subject.

    Balanced accuracy per fold averages recall over the classes actually
    present in that fold's test rows; the confusion matrix sums over
    folds in global canonical class order.
    """
    subjects = dataset.subject_ids()
    if len(subjects) < 2:
        raise ValidationError("need >=2 subjects")
    classes = tuple(dataset.classes)
    tasks = [(dataset, trainer, classes, seed, fi, s)
             for fi, s in enumerate(subjects)]
    rows = list(mapper(_loso_fold, tasks))
    return EvaluationReport(folds=tuple(r[0] for r in rows),
                            accuracy=np.array([r[1] for r in rows]),
                            balanced=np.array([r[2] for r in rows]),
                            classes=classes,
                            confusion=np.sum([r[3] for r in rows], axis=0))


def _fmt(x: float) -> str:
    return repr(float(x))


def write_report_csv(report: EvaluationReport, path) -> None:
    """Per-fold metrics: ``fold,subject,accuracy,balanced_accuracy``."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("fold,subject,accuracy,balanced_accuracy\n")
        for i, subject in enumerate(report.folds):
            fh.write(f"{i},{subject},{_fmt(report.accuracy[i])},"
                     f"{_fmt(report.balanced[i])}\n")


def write_confusion_csv(report: EvaluationReport, path) -> None:
    """K x K counts with class-name header and row labels."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("," + ",".join(report.classes) + "\n")
        for i, cls in enumerate(report.classes):
            row = ",".join(str(int(v)) for v in report.confusion[i])
            fh.write(f"{cls},{row}\n")


def write_importance_csv(result: ImportanceResult, path) -> None:
    """``feature,mean_accuracy,drop`` rows; first row is the unpermuted
    baseline under the name ``original``."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("feature,mean_accuracy,drop\n")
        fh.write(f"original,{_fmt(result.baseline)},{_fmt(0.0)}\n")
        for i, name in enumerate(result.feature_names):
            fh.write(f"{name},{_fmt(result.mean_accuracy[i])},"
                     f"{_fmt(result.drop[i])}\n")
