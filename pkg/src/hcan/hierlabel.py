"""Quantile group mapping and hierarchical class / offset labels.

Each hierarchy level splits every channel's (training) values into ``K``
intervals whose boundaries are order statistics of the sorted values at
indices ``floor((Q - 1) * k / K)``.  Because the index formula nests when
the finer ``K`` is a multiple of the coarser one, fine classes map onto
coarse classes through ``fine_class // (K_fine // K_coarse)``.

Intervals are half-open ``[left, right)`` with the last one closed; values
outside the fitted range clamp to the first or last class.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError, DimensionError


@dataclass
class IntervalPartition:
    """Per-channel class boundaries for one hierarchy level.

    ``boundaries`` has shape ``(D, K + 1)``; row ``d`` holds
    ``rho_1_left, ..., rho_K_left, rho_K_right`` for channel ``d``.
    """

    level: int
    boundaries: np.ndarray

    def __post_init__(self):
        self.boundaries = np.atleast_2d(np.asarray(self.boundaries, dtype=np.float64))
        if self.boundaries.shape[1] < 2:
            raise ConfigError("partition needs at least one interval (K + 1 >= 2 boundaries)")
        if np.any(np.diff(self.boundaries, axis=1) < 0):
            raise DataError("partition boundaries must be non-decreasing")

    @property
    def n_classes(self):
        return self.boundaries.shape[1] - 1

    @property
    def n_channels(self):
        return self.boundaries.shape[0]

    @property
    def lefts(self):
        return self.boundaries[:, :-1]

    def __eq__(self, other):
        if not isinstance(other, IntervalPartition):
            return NotImplemented
        return self.level == other.level and np.array_equal(self.boundaries, other.boundaries)


def boundary_indices(Q, K):
    """Sorted-array indices of the K + 1 boundaries for a length-Q series."""
    k = np.arange(K + 1)
    return ((Q - 1) * k) // K


def fit_partition(train_values, K, level=0):
    """Fit quantile boundaries per channel.

    ``train_values`` is ``(Q,)`` for one channel or ``(Q, D)``.
    """
    values = np.asarray(train_values, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    if values.ndim != 2:
        raise DimensionError(f"fit_partition expects (Q,) or (Q, D) values, got {values.shape}")
    K = int(K)
    if K < 1:
        raise ConfigError(f"class count must be >= 1, got {K}")
    Q = values.shape[0]
    if Q == 0:
        raise DataError("cannot fit a partition on an empty channel")
    if np.any(np.isnan(values)):
        raise DataError("NaN in partition training values")
    if K > Q:
        raise ConfigError(f"class count K={K} exceeds series length Q={Q}")
    ordered = np.sort(values, axis=0)
    idx = boundary_indices(Q, K)
    return IntervalPartition(level=level, boundaries=ordered[idx].T.copy())


def classify(partition, y, channel=None):
    """Vectorised classify_value.

    ``y`` has trailing dimension D (one column per channel) unless ``channel``
    is given, in which case every element uses that channel's boundaries.
    Returns integer classes (0-based) and offsets ``y - rho_left``.
    """
    y = np.asarray(y, dtype=np.float64)
    if np.any(np.isnan(y)):
        raise DataError("NaN value cannot be classified")
    K = partition.n_classes
    if channel is not None:
        lefts = partition.lefts[channel]
        k = np.clip(np.searchsorted(lefts, y, side="right") - 1, 0, K - 1)
        return k, y - lefts[k]
    if y.shape[-1] != partition.n_channels:
        raise DimensionError(
            f"value array has {y.shape[-1]} channels, partition has {partition.n_channels}"
        )
    k = np.empty(y.shape, dtype=np.int64)
    delta = np.empty(y.shape)
    for d in range(partition.n_channels):
        kd, dd = classify(partition, y[..., d], channel=d)
        k[..., d] = kd
        delta[..., d] = dd
    return k, delta


def classify_value(partition, y, channel=0):
    """Class (1-based, as in the interval notation) and offset for one scalar."""
    y = float(y)
    if np.isnan(y):
        raise DataError("NaN value cannot be classified")
    k, delta = classify(partition, np.array(y), channel=channel)
    return int(k) + 1, float(delta)


@dataclass
class HierarchySpec:
    """Ordered hierarchy levels, coarsest first, e.g. ``(1, 2, 4)``."""

    class_counts: tuple = (1, 2, 4)
    nesting: dict = field(init=False, repr=False)

    def __post_init__(self):
        counts = tuple(int(k) for k in self.class_counts)
        if not counts or any(k < 1 for k in counts):
            raise ConfigError(f"class counts must be positive, got {counts}")
        for coarse, fine in zip(counts, counts[1:]):
            if fine % coarse != 0 or fine <= coarse:
                raise ConfigError(
                    f"each level must refine the previous by an integer factor: {coarse} -> {fine}"
                )
        self.class_counts = counts
        self.nesting = {}
        for i in range(1, len(counts)):
            ratio = counts[i] // counts[i - 1]
            self.nesting[i] = np.arange(counts[i]) // ratio

    @property
    def levels(self):
        """Indices of levels that carry a classifier (K > 1)."""
        return [i for i, k in enumerate(self.class_counts) if k > 1]

    @property
    def fine_level(self):
        lv = self.levels
        return lv[-1] if lv else None

    @property
    def coarse_level(self):
        lv = self.levels
        return lv[-2] if len(lv) >= 2 else None

    def parent_map(self, level):
        """Map from classes of ``level`` to classes of ``level - 1``."""
        return self.nesting[level]

    def nesting_between(self, fine, coarse):
        """Map from classes of level ``fine`` to classes of level ``coarse``."""
        ratio = self.class_counts[fine] // self.class_counts[coarse]
        return np.arange(self.class_counts[fine]) // ratio


def fit_hierarchy(train_values, spec):
    """One partition per level (including K = 1 levels), keyed by level index."""
    return {
        level: fit_partition(train_values, K, level=level)
        for level, K in enumerate(spec.class_counts)
    }


def build_labels(y, spec, partitions):
    """Per-level ``(classes, offsets)`` for a horizon array ``(..., D)``."""
    y = np.asarray(y, dtype=np.float64)
    labels = {}
    for level in range(len(spec.class_counts)):
        if level not in partitions:
            raise ConfigError(f"no partition fitted for level {level}")
        part = partitions[level]
        if y.shape[-1] != part.n_channels:
            raise DimensionError(
                f"horizon has {y.shape[-1]} channels, partition for level {level} has "
                f"{part.n_channels}"
            )
        labels[level] = classify(part, y)
    return labels


def one_hot(classes, K):
    classes = np.asarray(classes)
    return (classes[..., None] == np.arange(K)).astype(np.float64)


# -------------------------------------------------------------- text format

_HEADER = "# level channel boundaries..."


def format_partitions(partitions):
    """Plain-text table, one row per (level, channel); floats in repr form."""
    lines = [_HEADER]
    for level in sorted(partitions):
        part = partitions[level]
        for d in range(part.n_channels):
            cells = " ".join(repr(float(b)) for b in part.boundaries[d])
            lines.append(f"{level} {d} {cells}")
    return "\n".join(lines) + "\n"


def parse_partitions(text):
    rows = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 4:
            raise DataError(f"partition table line {lineno}: expected level, channel, >=2 boundaries")
        try:
            level, channel = int(parts[0]), int(parts[1])
            bounds = [float(v) for v in parts[2:]]
        except ValueError as exc:
            raise DataError(f"partition table line {lineno}: {exc}") from exc
        rows.setdefault(level, {})[channel] = bounds
    out = {}
    for level, by_channel in rows.items():
        channels = sorted(by_channel)
        if channels != list(range(len(channels))):
            raise DataError(f"partition table level {level}: channels not contiguous")
        widths = {len(by_channel[c]) for c in channels}
        if len(widths) != 1:
            raise DataError(f"partition table level {level}: ragged boundary rows")
        out[level] = IntervalPartition(level=level, boundaries=np.array([by_channel[c] for c in channels]))
    return out


def class_histogram(partition, values):
    """Counts per (channel, class) of ``values`` (Q, D)."""
    k, _ = classify(partition, np.asarray(values, dtype=np.float64).reshape(-1, partition.n_channels))
    K = partition.n_classes
    return np.stack([np.bincount(k[:, d], minlength=K) for d in range(partition.n_channels)])
