"""Synthetic series for tests, demos and smoke runs."""

import datetime as _dt
from dataclasses import dataclass

import numpy as np


def seasonal_series(n_rows, n_channels=3, seed=0, period=24, noise=0.3):
    """Daily/weekly seasonality with channel-specific phase plus AR(1) noise."""
    rng = np.random.default_rng(seed)
    t = np.arange(n_rows)[:, None]
    phase = rng.uniform(0, 2 * np.pi, size=(1, n_channels))
    amp = rng.uniform(0.5, 2.0, size=(1, n_channels))
    base = amp * np.sin(2 * np.pi * t / period + phase) + 0.5 * np.sin(2 * np.pi * t / (7 * period) + 2 * phase)
    ar = np.zeros((n_rows, n_channels))
    eps = rng.normal(scale=noise, size=(n_rows, n_channels))
    for i in range(1, n_rows):
        ar[i] = 0.8 * ar[i - 1] + eps[i]
    trend = np.linspace(0, 1, n_rows)[:, None] * rng.normal(size=(1, n_channels))
    return base + ar + trend + rng.normal(size=(1, n_channels)) * 3


@dataclass
class BandedSeries:
    values: np.ndarray  # (Q, D)
    band: np.ndarray  # (Q, D) ground-truth band index of the noiseless signal
    ramp: np.ndarray  # (Q, D) True on transition steps between bands
    levels: np.ndarray


def banded_series(n_rows, n_channels=1, seed=0, plateau=10, ramp=2, levels=(-3.0, -1.0, 1.0, 3.0), noise=0.1):
    """Periodic sawtooth over four well-separated value bands.

    Each period visits the bands in ascending order, holding ``plateau`` steps
    per band with ``ramp``-step linear transitions (including the drop from
    the top band back to the bottom).  Channels are phase-shifted copies.
    """
    rng = np.random.default_rng(seed)
    levels = np.asarray(levels, dtype=np.float64)
    K = levels.size
    sig, band, is_ramp = [], [], []
    for k in range(K):
        nxt = levels[(k + 1) % K]
        sig += [levels[k]] * plateau
        band += [k] * plateau
        is_ramp += [False] * plateau
        for r in range(1, ramp + 1):
            v = levels[k] + (nxt - levels[k]) * r / (ramp + 1)
            sig.append(v)
            band.append(int(np.argmin(np.abs(levels - v))))
            is_ramp.append(True)
    sig, band, is_ramp = np.array(sig), np.array(band), np.array(is_ramp)
    period = sig.size
    values = np.empty((n_rows, n_channels))
    bands = np.empty((n_rows, n_channels), dtype=np.int64)
    ramps = np.empty((n_rows, n_channels), dtype=bool)
    for d in range(n_channels):
        idx = (np.arange(n_rows) + d * (period // max(n_channels, 1))) % period
        values[:, d] = sig[idx]
        bands[:, d] = band[idx]
        ramps[:, d] = is_ramp[idx]
    values = values + rng.normal(scale=noise, size=values.shape)
    return BandedSeries(values=values, band=bands, ramp=ramps, levels=levels)


def write_csv(path, values, names=None, start="2016-07-01 00:00:00", freq_hours=1.0):
    """Write an ETT-style CSV (``date`` column then one column per channel)."""
    values = np.asarray(values, dtype=np.float64)
    names = names or [f"ch{i}" for i in range(values.shape[1])]
    t0 = _dt.datetime.fromisoformat(start)
    step = _dt.timedelta(hours=freq_hours)
    with open(path, "w") as fh:
        fh.write("date," + ",".join(names) + "\n")
        for i, row in enumerate(values):
            stamp = (t0 + i * step).strftime("%Y-%m-%d %H:%M:%S")
            fh.write(stamp + "," + ",".join(repr(float(v)) for v in row) + "\n")
