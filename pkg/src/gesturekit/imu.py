"""IMU data model: streams, gesture labels, datasets, CSV ingestion.

File formats
------------
Stream CSV  header: ``t,acc_x,acc_y,acc_z,gyro_x,gyro_y,gyro_z,mag_x,mag_y,mag_z``
            one row per sample, decimal point, UTF-8, LF or CRLF.
Label CSV   header: ``start,end,label,subject`` with half-open sample
            intervals ``[start, end)`` and labels from the 12-gesture
            dictionary or ``ADL``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParseError, ValidationError

# 12-gesture dictionary in canonical order; index = canonical rank.
GESTURES = ("Up", "Down", "Left", "Right", "CW", "CCW",
            "Z", "AZ", "S", "AS", "Push", "Pull")
ADL_LABEL = "ADL"

CHANNELS = ("acc_x", "acc_y", "acc_z",
            "gyro_x", "gyro_y", "gyro_z",
            "mag_x", "mag_y", "mag_z")

STREAM_HEADER = ("t",) + CHANNELS
LABEL_HEADER = ("start", "end", "label", "subject")

DEFAULT_RATE_HZ = 50.0


def canonical_class_order(labels) -> list[str]:
    """Sort class labels: gestures by dictionary rank, other labels after
    them lexicographically. This ordering is the tie-break authority for
    voting and majority rules everywhere in the package."""
    known = {g: i for i, g in enumerate(GESTURES)}
    return sorted(set(labels), key=lambda c: (0, known[c], "") if c in known else (1, 0, c))


@dataclass(frozen=True)
class ImuSample:
    """One 9-channel reading at sample index ``t`` (50 Hz clock)."""
    t: int
    acc: np.ndarray
    gyro: np.ndarray
    mag: np.ndarray


@dataclass(frozen=True)
class ImuStream:
    """Immutable uniformly-sampled 9-channel sensor sequence.

    ``channels`` is an (N, 9) float array in CHANNELS order; ``t`` is the
    contiguous integer sample index. Channel triples are exposed as views.
    """
    subject_id: str
    rate_hz: float
    t: np.ndarray
    channels: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.int64)
        ch = np.asarray(self.channels, dtype=np.float64)
        if ch.ndim != 2 or ch.shape[1] != 9:
            raise ValidationError(f"channels must be (N, 9), got {ch.shape}")
        if len(t) != len(ch):
            raise ValidationError("t and channels length mismatch")
        if len(t) == 0:
            raise ValidationError("empty stream")
        if self.rate_hz <= 0:
            raise ValidationError("rate_hz must be positive")
        if not np.all(np.isfinite(ch)):
            raise ValidationError("non-finite channel value")
        if len(t) > 1 and not np.all(np.diff(t) == 1):
            raise ValidationError("sample index must be contiguous")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "channels", ch)
        t.setflags(write=False)
        ch.setflags(write=False)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def acc(self) -> np.ndarray:
        return self.channels[:, 0:3]

    @property
    def gyro(self) -> np.ndarray:
        return self.channels[:, 3:6]

    @property
    def mag(self) -> np.ndarray:
        return self.channels[:, 6:9]

    def channel(self, name: str) -> np.ndarray:
        """Single channel by name, e.g. ``acc_y``."""
        try:
            return self.channels[:, CHANNELS.index(name)]
        except ValueError:
            raise ValidationError(f"unknown channel {name!r}") from None

    def sample(self, i: int) -> ImuSample:
        return ImuSample(int(self.t[i]), self.acc[i], self.gyro[i], self.mag[i])

    @property
    def samples(self):
        return [self.sample(i) for i in range(len(self))]


@dataclass(frozen=True)
class LabeledInterval:
    """Half-open sample interval [start, end) carrying a class label."""
    start: int
    end: int
    label: str
    subject_id: str

    def __post_init__(self):
        if self.start < 0 or self.start >= self.end:
            raise ValidationError(f"empty or negative interval [{self.start}, {self.end})")
        if self.label != ADL_LABEL and self.label not in GESTURES:
            raise ValidationError(f"unknown label {self.label!r}")

    def __len__(self) -> int:
        return self.end - self.start


@dataclass
class LabeledDataset:
    """Feature rows paired with class labels and subject ids."""
    X: np.ndarray
    labels: list[str]
    subjects: list[str]
    feature_names: list[str]

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        if self.X.ndim != 2:
            raise ValidationError("X must be 2-D")
        if self.X.shape[1] != len(self.feature_names):
            raise ValidationError("column count does not match feature registry")
        if not (len(self.labels) == len(self.subjects) == self.X.shape[0]):
            raise ValidationError("row metadata length mismatch")
        if len(self.subjects) == 0:
            raise ValidationError("empty dataset")

    def __len__(self) -> int:
        return self.X.shape[0]

    @property
    def classes(self) -> list[str]:
        return canonical_class_order(self.labels)

    def subject_ids(self) -> list[str]:
        return sorted(set(self.subjects))

    def rows_for_subjects(self, subject_ids) -> np.ndarray:
        wanted = set(subject_ids)
        return np.array([s in wanted for s in self.subjects], dtype=bool)


def _format(x: float) -> str:
    """Shortest decimal that round-trips the float exactly."""
    return repr(float(x))


def parse_imu_csv(path, subject_id: str | None = None,
                  rate_hz: float = DEFAULT_RATE_HZ) -> ImuStream:
    """Parse a stream CSV into a validated ImuStream.

    The subject id defaults to the file stem. Errors (bad header,
    non-numeric cell, non-monotonic or gapped index) name the 1-based
    line in the file.
    """
    from pathlib import Path
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError(f"{path}: empty file")
    header = tuple(c.strip() for c in lines[0].split(","))
    if header != STREAM_HEADER:
        missing = set(STREAM_HEADER) - set(header)
        dupes = {c for c in header if list(header).count(c) > 1}
        if dupes:
            raise ParseError(f"{path}: duplicate columns {sorted(dupes)}")
        if missing:
            raise ParseError(f"{path}: missing columns {sorted(missing)}")
        raise ParseError(f"{path}: unexpected header {header}")
    rows = [ln for ln in lines[1:] if ln.strip()]
    if not rows:
        raise ParseError(f"{path}: empty stream")
    t = np.empty(len(rows), dtype=np.int64)
    ch = np.empty((len(rows), 9), dtype=np.float64)
    for i, ln in enumerate(rows):
        lineno = i + 2
        cells = ln.split(",")
        if len(cells) != 10:
            raise ParseError(f"{path}: expected 10 cells at line {lineno}, got {len(cells)}")
        try:
            t[i] = int(cells[0])
            ch[i] = [float(c) for c in cells[1:]]
        except ValueError as exc:
            raise ParseError(f"{path}: non-numeric cell at line {lineno}: {exc}") from None
        if not np.all(np.isfinite(ch[i])):
            raise ParseError(f"{path}: non-finite value at line {lineno}")
        if i > 0:
            if t[i] <= t[i - 1]:
                raise ParseError(f"{path}: non-monotonic index at line {lineno}")
            if t[i] != t[i - 1] + 1:
                raise ParseError(f"{path}: missing sample before line {lineno}")
    return ImuStream(subject_id=subject_id if subject_id is not None else path.stem,
                     rate_hz=rate_hz, t=t, channels=ch)


def write_imu_csv(stream: ImuStream, path) -> None:
    """Serialize a stream; numeric content survives a parse round-trip."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(STREAM_HEADER) + "\n")
        for i in range(len(stream)):
            cells = [str(int(stream.t[i]))] + [_format(v) for v in stream.channels[i]]
            fh.write(",".join(cells) + "\n")


def parse_label_csv(path) -> list[LabeledInterval]:
    """Parse a label CSV into intervals sorted by start; overlaps are errors."""
    from pathlib import Path
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError(f"{path}: empty file")
    header = tuple(c.strip() for c in lines[0].split(","))
    if header != LABEL_HEADER:
        raise ParseError(f"{path}: unexpected header {header}, want {LABEL_HEADER}")
    intervals = []
    for i, ln in enumerate(lines[1:]):
        if not ln.strip():
            continue
        lineno = i + 2
        cells = [c.strip() for c in ln.split(",")]
        if len(cells) != 4:
            raise ParseError(f"{path}: expected 4 cells at line {lineno}")
        try:
            start, end = int(cells[0]), int(cells[1])
        except ValueError:
            raise ParseError(f"{path}: non-integer bound at line {lineno}") from None
        try:
            intervals.append(LabeledInterval(start, end, cells[2], cells[3]))
        except ValidationError as exc:
            raise ParseError(f"{path}: {exc} at line {lineno}") from None
    intervals.sort(key=lambda iv: iv.start)
    for a, b in zip(intervals, intervals[1:]):
        if b.start < a.end:
            raise ParseError(f"{path}: overlapping intervals "
                             f"[{a.start}, {a.end}) and [{b.start}, {b.end})")
    return intervals


def write_label_csv(intervals, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(LABEL_HEADER) + "\n")
        for iv in intervals:
            fh.write(f"{iv.start},{iv.end},{iv.label},{iv.subject_id}\n")


def extract_segment(stream: ImuStream, interval: LabeledInterval) -> ImuStream:
    """Cut [start, end) out of a stream. The segment is re-originated to
    sample index 0 and keeps subject id and rate."""
    if interval.end > len(stream):
        raise ValidationError(
            f"interval [{interval.start}, {interval.end}) out of bounds "
            f"for stream of length {len(stream)}")
    n = interval.end - interval.start
    return ImuStream(subject_id=stream.subject_id, rate_hz=stream.rate_hz,
                     t=np.arange(n, dtype=np.int64),
                     channels=stream.channels[interval.start:interval.end].copy())
