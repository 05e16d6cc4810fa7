"""
Where is the classifier unsure?
===============================

The series steps between four flat bands with short ramps.  Values on the
ramps sit near class boundaries, so the fine classifier should report
more uncertainty there than on the plateaus.
"""

import numpy as np

from hcan import ndgrad as nd
from hcan.config import DatasetConfig, RunConfig
from hcan.pipeline import train
from hcan.synthetic import banded_series

bs = banded_series(2400, 2, seed=0)
L, T = 96, 24
res = train(RunConfig(data=DatasetConfig(lookback=L, horizon=T), epochs=10, lr=1e-3, hidden=64, seed=0), values=bs.values)
d = res.data

preds, unc, true = [], [], []
with nd.no_grad():
    for b in d.test.iter_batches(256):
        e = res.model(b.x).e_fine.values
        preds.append(e.argmax(-1))
        unc.append(4 / (e + 1).sum(-1))
        true.append(b.classes[2])
pred, u, k = map(np.concatenate, (preds, unc, true))

start = d.ranges.with_context(L)["test"][0]
rows = start + L + np.arange(len(d.test))[:, None] + np.arange(T)[None, :]
ramp = bs.ramp[rows]
print(f"fine accuracy: {np.mean(pred == k):.3f}")
print(f"mean u on ramps    : {u[ramp].mean():.3f}")
print(f"mean u on plateaus : {u[~ramp].mean():.3f}")
