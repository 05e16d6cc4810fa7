"""Data preparation, the composite objective, training and evaluation."""

from .data import (
    Normalizer,
    PreparedData,
    SplitRanges,
    WindowBatch,
    WindowSet,
    chrono_split,
    ett_split,
    load_csv,
    make_windows,
    prepare,
    zscore,
)
from .losses import LossWeights, mse, total_loss
from .snapshot import Snapshot, load_snapshot, save_snapshot
from .train import (
    EvalResult,
    TrainResult,
    build_model,
    evaluate,
    predict,
    prepare_from_config,
    seed_streams,
    train,
)
