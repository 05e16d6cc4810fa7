"""CSV ingestion, chronological splits, z-scoring and sliding windows."""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, DataError, IngestionError
from ..hierlabel import HierarchySpec, build_labels, fit_hierarchy, one_hot


def load_csv(path, columns=None):
    """Read a benchmark CSV: first column is a timestamp, the rest numeric.

    Returns ``(values (Q, D), column_names)``.  ``columns`` optionally selects
    channels by name, in the given order.
    """
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise IngestionError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{path}: empty file", line=1) from None
        if len(header) < 2:
            raise IngestionError(f"{path}: need a date column plus >= 1 numeric column", line=1)
        names = [h.strip() for h in header[1:]]
        rows = []
        for row in reader:
            lineno = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise IngestionError(
                    f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}", line=lineno
                )
            parsed = []
            for name, cell in zip(names, row[1:]):
                cell = cell.strip()
                if not cell:
                    raise IngestionError(
                        f"{path}:{lineno}: missing value in column {name!r}", line=lineno, column=name
                    )
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise IngestionError(
                        f"{path}:{lineno}: non-numeric value {cell!r} in column {name!r}",
                        line=lineno,
                        column=name,
                    ) from None
            if not all(math.isfinite(v) for v in parsed):
                raise IngestionError(f"{path}:{lineno}: non-finite value", line=lineno)
            rows.append(parsed)
    if not rows:
        raise IngestionError(f"{path}: no data rows")
    values = np.array(rows, dtype=np.float64)
    if columns:
        missing = [c for c in columns if c not in names]
        if missing:
            raise DataError(f"{path}: columns not found: {missing}")
        idx = [names.index(c) for c in columns]
        values, names = values[:, idx], list(columns)
    return values, names


@dataclass(frozen=True)
class SplitRanges:
    """Half-open row ranges ``(start, stop)`` for each split."""

    train: tuple
    val: tuple
    test: tuple

    def with_context(self, lookback):
        """Prepend ``lookback`` rows of history to val and test."""
        return SplitRanges(
            train=self.train,
            val=(max(self.val[0] - lookback, 0), self.val[1]),
            test=(max(self.test[0] - lookback, 0), self.test[1]),
        )

    def __getitem__(self, name):
        return getattr(self, name)


def chrono_split(Q, ratios=(0.6, 0.2, 0.2), lookback=None, horizon=None):
    """Contiguous train/val/test ranges by ratio (before context prepend)."""
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != 3 or any(r <= 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise ConfigError(f"split ratios must be three positive numbers summing to 1, got {ratios}")
    n_train = int(Q * ratios[0])
    n_test = int(Q * ratios[2])
    n_val = Q - n_train - n_test
    ranges = SplitRanges((0, n_train), (n_train, n_train + n_val), (n_train + n_val, Q))
    _check_lengths(ranges, lookback, horizon)
    return ranges


def ett_split(Q, rows_per_day=24, lookback=None, horizon=None):
    """Month-border protocol of the ETT benchmark: 12 / 4 / 4 months of 30 days."""
    month = 30 * rows_per_day
    b1, b2, b3 = 12 * month, 16 * month, 20 * month
    if Q < b3:
        raise ConfigError(f"ETT protocol needs {b3} rows, series has {Q}")
    ranges = SplitRanges((0, b1), (b1, b2), (b2, b3))
    _check_lengths(ranges, lookback, horizon)
    return ranges


def _check_lengths(ranges, lookback, horizon):
    if lookback is None or horizon is None:
        return
    need = lookback + horizon
    if ranges.train[1] - ranges.train[0] < need:
        raise ConfigError(f"train split shorter than L+T={need}")
    for name in ("val", "test"):
        lo, hi = ranges[name]
        if hi - lo < horizon:
            raise ConfigError(f"{name} split shorter than T={horizon} even with context")


@dataclass
class Normalizer:
    """Per-channel z-score with statistics from the training rows."""

    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, train):
        train = np.asarray(train, dtype=np.float64)
        std = train.std(axis=0)
        if np.any(std == 0):
            bad = np.flatnonzero(std == 0).tolist()
            raise DataError(f"zero-variance channel(s) {bad} in the training split")
        return cls(mean=train.mean(axis=0), std=std)

    @classmethod
    def identity(cls, n_channels):
        return cls(mean=np.zeros(n_channels), std=np.ones(n_channels))

    def transform(self, x):
        return (np.asarray(x, dtype=np.float64) - self.mean) / self.std

    def inverse(self, z):
        return np.asarray(z, dtype=np.float64) * self.std + self.mean


def zscore(values, train_range):
    """Normalise all rows with statistics of ``values[train_range]``."""
    norm = Normalizer.fit(values[train_range[0] : train_range[1]])
    return norm.transform(values), norm


@dataclass
class WindowBatch:
    x: np.ndarray  # (B, L, D)
    y: np.ndarray  # (B, T, D)
    classes: dict = field(default_factory=dict)  # level -> (B, T, D) int
    offsets: dict = field(default_factory=dict)  # level -> (B, T, D)

    def onehot(self, level, K):
        return one_hot(self.classes[level], K)

    def __len__(self):
        return self.x.shape[0]


class WindowSet:
    """All stride-1 windows of one split; batches are materialised on demand.

    Labels depend only on each value, so they are computed once per row and
    sliced alongside ``y``.
    """

    def __init__(self, series, lookback, horizon, spec=None, partitions=None):
        series = np.asarray(series, dtype=np.float64)
        if series.ndim != 2:
            raise DataError(f"series must be (rows, channels), got {series.shape}")
        n = series.shape[0] - lookback - horizon + 1
        if lookback < 1 or horizon < 1:
            raise ConfigError("lookback and horizon must be >= 1")
        if n < 1:
            raise ConfigError(
                f"split of length {series.shape[0]} too short for L={lookback}, T={horizon}"
            )
        self.series = series
        self.lookback, self.horizon = lookback, horizon
        self.n_windows = n
        self.row_labels = build_labels(series, spec, partitions) if spec is not None else {}
        self._xv = np.lib.stride_tricks.sliding_window_view(series, lookback, axis=0)
        self._yv = np.lib.stride_tricks.sliding_window_view(series[lookback:], horizon, axis=0)

    def __len__(self):
        return self.n_windows

    def batch(self, idx):
        idx = np.asarray(idx)
        x = np.swapaxes(self._xv[idx], -1, -2)
        y = np.swapaxes(self._yv[idx], -1, -2)
        classes, offsets = {}, {}
        for level, (k, d) in self.row_labels.items():
            kv = np.lib.stride_tricks.sliding_window_view(k[self.lookback :], self.horizon, axis=0)
            dv = np.lib.stride_tricks.sliding_window_view(d[self.lookback :], self.horizon, axis=0)
            classes[level] = np.swapaxes(kv[idx], -1, -2)
            offsets[level] = np.swapaxes(dv[idx], -1, -2)
        return WindowBatch(x=np.ascontiguousarray(x), y=np.ascontiguousarray(y), classes=classes, offsets=offsets)

    def iter_batches(self, batch_size, order=None):
        order = np.arange(self.n_windows) if order is None else np.asarray(order)
        for start in range(0, order.size, batch_size):
            yield self.batch(order[start : start + batch_size])


def make_windows(split_values, lookback, horizon, spec=None, partitions=None):
    return WindowSet(split_values, lookback, horizon, spec=spec, partitions=partitions)


@dataclass
class PreparedData:
    names: list
    normalizer: Normalizer
    spec: HierarchySpec
    partitions: dict
    ranges: SplitRanges
    train: WindowSet
    val: WindowSet
    test: WindowSet

    @property
    def n_channels(self):
        return len(self.names)

    def split(self, name):
        return getattr(self, name)


def prepare(values, names, lookback, horizon, spec, ranges, normalize=True, normalizer=None, partitions=None):
    """Normalise, fit partitions on the training rows, and window each split.

    ``normalizer`` / ``partitions`` may be supplied (e.g. from a snapshot) to
    skip fitting.
    """
    values = np.asarray(values, dtype=np.float64)
    tr = ranges.train
    if normalizer is None:
        normalizer = Normalizer.fit(values[tr[0] : tr[1]]) if normalize else Normalizer.identity(values.shape[1])
    z = normalizer.transform(values)
    if partitions is None:
        partitions = fit_hierarchy(z[tr[0] : tr[1]], spec)
    ctx = ranges.with_context(lookback)
    sets = {
        name: WindowSet(z[ctx[name][0] : ctx[name][1]], lookback, horizon, spec, partitions)
        for name in ("train", "val", "test")
    }
    return PreparedData(
        names=list(names),
        normalizer=normalizer,
        spec=spec,
        partitions=partitions,
        ranges=ranges,
        **sets,
    )
