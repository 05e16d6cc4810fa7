"""Forecasting backbones producing the per-channel feature map F (B, D, T)."""

import numpy as np

from . import ndgrad as nd
from .errors import ConfigError, DimensionError, NumericError
from .nn import Linear, Module


def moving_average(x, kernel_size):
    """Centered moving average along axis -2 of ``(..., L, D)`` with edge replication."""
    x = np.asarray(x, dtype=np.float64)
    L = x.shape[-2]
    if kernel_size < 1 or kernel_size % 2 == 0:
        raise ConfigError(f"moving-average kernel must be a positive odd integer, got {kernel_size}")
    if kernel_size > 2 * L + 1:
        raise ConfigError(f"kernel {kernel_size} larger than 2L+1 = {2 * L + 1}")
    pad = (kernel_size - 1) // 2
    front = np.repeat(x[..., :1, :], pad, axis=-2)
    back = np.repeat(x[..., -1:, :], pad, axis=-2)
    padded = np.concatenate([front, x, back], axis=-2)
    windows = np.lib.stride_tricks.sliding_window_view(padded, kernel_size, axis=-2)
    return windows.mean(axis=-1)


def series_decomp(x, kernel_size=25):
    """Split ``x`` (..., L, D) into (seasonal, trend) with trend = moving average."""
    trend = moving_average(x, kernel_size)
    return x - trend, trend


class Backbone(Module):
    """Interface: ``forward(x)`` maps a history batch (B, L, D) to F (B, D, T)."""

    lookback: int
    horizon: int

    def _check_input(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 3 or x.shape[1] != self.lookback:
            raise DimensionError(f"expected input (B, {self.lookback}, D), got {x.shape}")
        if not np.all(np.isfinite(x)):
            raise NumericError("backbone input contains non-finite values")
        return x

    def __call__(self, x):
        return self.forward(x)


class LinearBackbone(Backbone):
    """One channel-shared affine map L -> T."""

    _layers = ("proj",)

    def __init__(self, lookback, horizon, rng):
        self.lookback, self.horizon = lookback, horizon
        self.proj = Linear(lookback, horizon, rng, name="backbone.linear")

    def forward(self, x):
        x = self._check_input(x)
        return self.proj(nd.Tensor(np.swapaxes(x, 1, 2)))


class DLinear(Backbone):
    """Trend/seasonal decomposition followed by two channel-shared linear maps."""

    _layers = ("seasonal", "trend")

    def __init__(self, lookback, horizon, rng, kernel_size=25):
        if kernel_size < 1 or kernel_size % 2 == 0 or kernel_size > 2 * lookback + 1:
            raise ConfigError(
                f"kernel_size must be odd and <= 2L+1 = {2 * lookback + 1}, got {kernel_size}"
            )
        self.lookback, self.horizon = lookback, horizon
        self.kernel_size = kernel_size
        self.seasonal = Linear(lookback, horizon, rng, name="backbone.seasonal")
        self.trend = Linear(lookback, horizon, rng, name="backbone.trend")

    def forward(self, x):
        x = self._check_input(x)
        seasonal, trend = series_decomp(x, self.kernel_size)
        s = nd.Tensor(np.swapaxes(seasonal, 1, 2))
        t = nd.Tensor(np.swapaxes(trend, 1, 2))
        return self.seasonal(s) + self.trend(t)


BACKBONES = {"linear": LinearBackbone, "dlinear": DLinear}


def make_backbone(name, lookback, horizon, rng, **kwargs):
    try:
        cls = BACKBONES[name]
    except KeyError:
        raise ConfigError(f"unknown backbone {name!r}; choose from {sorted(BACKBONES)}") from None
    if cls is DLinear:
        return cls(lookback, horizon, rng, kernel_size=kwargs.get("kernel_size", 25))
    return cls(lookback, horizon, rng)
