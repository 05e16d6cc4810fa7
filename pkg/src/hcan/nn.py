"""Parameter containers shared by the backbone and the HCAN heads."""

import math

import numpy as np

from . import ndgrad as nd
from .errors import DimensionError


class Linear:
    """Affine map on the last axis: ``x @ weight + bias``.

    Weight is stored ``(in, out)``.  Initialised uniformly in
    ``[-1/sqrt(in), 1/sqrt(in)]`` like the usual deep-learning default.
    """

    def __init__(self, n_in, n_out, rng, bias=True, name="linear"):
        bound = 1.0 / math.sqrt(n_in)
        self.n_in, self.n_out = n_in, n_out
        self.weight = nd.Tensor(rng.uniform(-bound, bound, size=(n_in, n_out)), requires_grad=True)
        self.bias = (
            nd.Tensor(rng.uniform(-bound, bound, size=(n_out,)), requires_grad=True) if bias else None
        )
        self.name = name

    def __call__(self, x):
        if x.shape[-1] != self.n_in:
            raise DimensionError(f"{self.name}: expected last dim {self.n_in}, got {x.shape}")
        out = nd.matmul(x, self.weight)
        if self.bias is not None:
            out = out + self.bias
        return out

    def named_parameters(self):
        yield f"{self.name}.weight", self.weight
        if self.bias is not None:
            yield f"{self.name}.bias", self.bias


class Module:
    """Minimal parameter registry: subclasses list their layers in ``_layers``."""

    _layers = ()

    def layers(self):
        for attr in self._layers:
            layer = getattr(self, attr, None)
            if layer is not None:
                yield layer

    def named_parameters(self):
        for layer in self.layers():
            yield from layer.named_parameters()

    def parameters(self):
        return [p for _, p in self.named_parameters()]

    def state_dict(self):
        return {name: p.values.copy() for name, p in self.named_parameters()}

    def load_state_dict(self, state):
        own = dict(self.named_parameters())
        missing = set(own) - set(state)
        unexpected = set(state) - set(own)
        if missing or unexpected:
            raise KeyError(f"state mismatch: missing={sorted(missing)} unexpected={sorted(unexpected)}")
        for name, p in own.items():
            arr = np.asarray(state[name], dtype=np.float64)
            if arr.shape != p.shape:
                raise DimensionError(f"{name}: stored shape {arr.shape} != {p.shape}")
            p.values = arr.copy()

    def n_parameters(self):
        return sum(p.size for p in self.parameters())
