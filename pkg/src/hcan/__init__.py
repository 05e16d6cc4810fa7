"""HCAN: hierarchical classification auxiliary network for forecasting."""

from .config import DatasetConfig, RunConfig, load_config, parse_config
from .hierlabel import HierarchySpec, IntervalPartition, build_labels, classify_value, fit_partition
from .model import AblationFlags, HcanModel
from .pipeline import LossWeights, evaluate, train

__version__ = "0.1.0"
