"""
Training on a synthetic series
==============================

A small config trains DLinear with and without the auxiliary heads.
"""

from hcan.config import DatasetConfig, RunConfig
from hcan.model import AblationFlags
from hcan.pipeline import evaluate, train
from hcan.synthetic import seasonal_series

values = seasonal_series(1500, 3, seed=0)
base = RunConfig(data=DatasetConfig(lookback=96, horizon=24), hidden=64, epochs=5, lr=1e-3, seed=0)

for label, flags in (("DLinear", AblationFlags.ablation_rows()[0]), ("DLinear + heads", AblationFlags())):
    res = train(base.with_updates(flags=flags), values=values)
    test = evaluate(res.model, res.data.test)
    print(f"{label:16s} best epoch {res.best_epoch}  val mse {res.best_val_mse:.4f}  test mse {test.mse:.4f} mae {test.mae:.4f}")
    for row in res.log:
        terms = ", ".join(f"{k[6:]} {v:.3f}" for k, v in row.items() if k.startswith("train_"))
        print(f"    epoch {row['epoch']}: {terms}")
