"""Training loop, validation-based model selection and evaluation."""

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .. import ndgrad as nd
from ..backbone import make_backbone
from ..errors import ConfigError, TrainingError
from ..hierlabel import HierarchySpec
from ..model import HcanModel
from .data import chrono_split, ett_split, load_csv, prepare
from .losses import total_loss

log = logging.getLogger(__name__)


def seed_streams(seed):
    """Independent generators for backbone init, head init and shuffling.

    Keeping them separate means a bare-backbone run consumes exactly the same
    random numbers as a standalone backbone training loop.
    """
    return (
        np.random.default_rng(seed),
        np.random.default_rng([seed, 1]),
        np.random.default_rng([seed, 2]),
    )


def build_model(cfg, n_channels=None, rngs=None):
    init_rng, head_rng, _ = rngs or seed_streams(cfg.seed)
    backbone = make_backbone(
        cfg.backbone, cfg.data.lookback, cfg.data.horizon, init_rng, kernel_size=cfg.kernel_size
    )
    return HcanModel(backbone, HierarchySpec(cfg.class_counts), cfg.flags, cfg.hidden, head_rng)


def split_ranges(cfg, n_rows):
    d = cfg.data
    if d.split == "ratio":
        return chrono_split(n_rows, d.ratios, d.lookback, d.horizon)
    rows_per_day = 24 if d.split == "ett-hour" else 96
    return ett_split(n_rows, rows_per_day, d.lookback, d.horizon)


def prepare_from_config(cfg, values=None, names=None, normalizer=None, partitions=None):
    if values is None:
        if not cfg.data.path:
            raise ConfigError("no dataset path configured")
        values, names = load_csv(cfg.data.path, cfg.data.columns or None)
    if names is None:
        names = [f"ch{i}" for i in range(values.shape[1])]
    return prepare(
        values,
        names,
        cfg.data.lookback,
        cfg.data.horizon,
        HierarchySpec(cfg.class_counts),
        split_ranges(cfg, values.shape[0]),
        normalize=cfg.data.normalization == "zscore",
        normalizer=normalizer,
        partitions=partitions,
    )


@dataclass
class EvalResult:
    mse: float
    mae: float
    n_windows: int
    predictions: np.ndarray = None
    targets: np.ndarray = None


def predict(model, windows, batch_size=256):
    preds = []
    with nd.no_grad():
        for batch in windows.iter_batches(batch_size):
            preds.append(model(batch.x).y_hat.values)
    return np.concatenate(preds, axis=0)


def evaluate(model, windows, batch_size=256, keep_predictions=False):
    """Element-averaged MSE and MAE over every window of ``windows``."""
    sq = 0.0
    ab = 0.0
    count = 0
    preds, trues = [], []
    with nd.no_grad():
        for batch in windows.iter_batches(batch_size):
            yhat = model(batch.x).y_hat.values
            err = yhat - batch.y
            sq += float(np.sum(err * err))
            ab += float(np.sum(np.abs(err)))
            count += err.size
            if keep_predictions:
                preds.append(yhat)
                trues.append(batch.y)
    res = EvalResult(mse=sq / count, mae=ab / count, n_windows=len(windows))
    if keep_predictions:
        res.predictions = np.concatenate(preds)
        res.targets = np.concatenate(trues)
    return res


@dataclass
class TrainResult:
    model: HcanModel
    config: object
    data: object
    log: list = field(default_factory=list)
    best_epoch: int = -1
    best_val_mse: float = float("inf")
    best_state: dict = None
    final_state: dict = None

    @property
    def epoch_train_losses(self):
        return [row["train_total"] for row in self.log]


def train(cfg, data=None, values=None, names=None, verbose=False):
    """Train per ``cfg``; the returned model holds the best-validation parameters."""
    if data is None:
        data = prepare_from_config(cfg, values=values, names=names)
    init_rng, head_rng, shuffle_rng = seed_streams(cfg.seed)
    model = build_model(cfg, data.n_channels, (init_rng, head_rng, shuffle_rng))
    params = model.parameters()
    state = nd.AdamState.for_params(params, lr=cfg.lr)
    weights = cfg.weights.masked(cfg.flags)
    spec = data.spec

    result = TrainResult(model=model, config=cfg, data=data)
    bad_epochs = 0
    n = len(data.train)
    for epoch in range(cfg.epochs):
        t0 = time.perf_counter()
        w = weights.at_epoch(epoch)
        order = shuffle_rng.permutation(n)
        sums = {}
        n_batches = 0
        for batch in data.train.iter_batches(cfg.batch_size, order):
            out = model(batch.x)
            loss, terms = total_loss(out, batch, w, spec)
            if not np.isfinite(loss.values):
                raise TrainingError(f"non-finite loss in epoch {epoch}", epoch=epoch)
            for p in params:
                p.grad = None
            nd.backward(loss)
            nd.adam_step(params, [p.grad for p in params], state)
            for k, v in terms.items():
                sums[k] = sums.get(k, 0.0) + v
            n_batches += 1
        val = evaluate(model, data.val, cfg.eval_batch_size)
        row = {"epoch": epoch, **{f"train_{k}": v / n_batches for k, v in sums.items()}}
        row.update(val_mse=val.mse, val_mae=val.mae, seconds=time.perf_counter() - t0)
        result.log.append(row)
        msg = f"epoch {epoch}: train {row['train_total']:.5f} val mse {val.mse:.5f} mae {val.mae:.5f}"
        (print if verbose else log.info)(msg)
        if val.mse < result.best_val_mse:
            result.best_val_mse = val.mse
            result.best_epoch = epoch
            result.best_state = model.state_dict()
            bad_epochs = 0
        else:
            bad_epochs += 1
            if cfg.patience > 0 and bad_epochs >= cfg.patience:
                break
    result.final_state = model.state_dict()
    if result.best_state is not None:
        model.load_state_dict(result.best_state)
    return result
