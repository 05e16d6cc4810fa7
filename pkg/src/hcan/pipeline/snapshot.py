"""Versioned single-file snapshots: parameters, normaliser, partitions, config.

The file is an ``.npz`` archive.  Parameters live under ``param/<name>``;
everything else is in a JSON document stored as the ``meta`` byte array.
Loading never unpickles.
"""

import json
import zipfile

import numpy as np

from ..errors import CompatibilityError, SnapshotFormatError
from ..hierlabel import format_partitions, parse_partitions
from .data import Normalizer

FORMAT = "hcan-snapshot"
VERSION = 1


def save_snapshot(path, model, config, normalizer, partitions, names, extra=None):
    meta = {
        "format": FORMAT,
        "version": VERSION,
        "config": config.to_dict(),
        "config_hash": config.hash(),
        "names": list(names),
        "norm_mean": normalizer.mean.tolist(),
        "norm_std": normalizer.std.tolist(),
        "partitions": format_partitions(partitions),
        "extra": extra or {},
    }
    arrays = {f"param/{k}": v for k, v in model.state_dict().items()}
    arrays["meta"] = np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8)
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


class Snapshot:
    def __init__(self, meta, params):
        self.meta = meta
        self.params = params

    @property
    def names(self):
        return self.meta["names"]

    @property
    def normalizer(self):
        return Normalizer(mean=np.array(self.meta["norm_mean"]), std=np.array(self.meta["norm_std"]))

    @property
    def partitions(self):
        return parse_partitions(self.meta["partitions"])

    @property
    def config(self):
        from ..config import config_from_dict

        return config_from_dict(self.meta["config"])

    def restore_model(self, config=None):
        from .train import build_model

        model = build_model(config or self.config, len(self.names))
        try:
            model.load_state_dict(self.params)
        except (KeyError, ValueError) as exc:
            raise CompatibilityError(f"snapshot parameters do not fit the configured model: {exc}") from None
        return model


def load_snapshot(path):
    try:
        with np.load(path, allow_pickle=False) as z:
            if "meta" not in z.files:
                raise SnapshotFormatError(f"{path}: missing metadata record")
            meta = json.loads(z["meta"].tobytes().decode())
            params = {k[len("param/") :]: z[k] for k in z.files if k.startswith("param/")}
    except SnapshotFormatError:
        raise
    except OSError as exc:
        if "No such file" in str(exc):
            raise
        raise SnapshotFormatError(f"{path}: not a readable snapshot ({exc})") from None
    except (ValueError, zipfile.BadZipFile, EOFError, UnicodeDecodeError, KeyError) as exc:
        raise SnapshotFormatError(f"{path}: corrupted snapshot ({exc})") from None
    if not isinstance(meta, dict) or meta.get("format") != FORMAT:
        raise SnapshotFormatError(f"{path}: not an hcan snapshot")
    if meta.get("version") != VERSION:
        raise SnapshotFormatError(f"{path}: unsupported snapshot version {meta.get('version')}")
    return Snapshot(meta, params)
