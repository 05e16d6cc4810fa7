"""
Fusing classifier features into the forecast
============================================

Three heads read the backbone forecast.  The fine and coarse features
define a channel-by-channel attention map that mixes the temporal
features; the result is added back to the backbone output.
"""

import numpy as np

from hcan.haa import HaaParams, attention_map, feature_heads, haa_forward

rng = np.random.default_rng(2)
T, M, D = 24, 16, 5
p = HaaParams(T, M, 4, 2, rng)

F = rng.normal(size=(D, T))  # backbone forecast for one sample, channel-major
theta, phi, eta = feature_heads(F, p)
A = attention_map(theta, phi).values
np.set_printoptions(precision=3, suppress=True)
print("attention map (rows sum to 1):")
print(A)
print("row sums:", A.sum(axis=1))

y = haa_forward(F, theta, phi, eta, p).values
print("\nforecast shape (T, D):", y.shape)
print("change vs backbone, first channel, first 6 steps:", (y[:6, 0] - F[0, :6]))
