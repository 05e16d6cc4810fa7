"""``hcan`` command line: train, evaluate, ablate, inspect-partition.

Exit codes: 0 success, 1 usage/config, 2 data or I/O, 3 numeric failure.
"""

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import replace

from .config import load_config
from .errors import (
    CompatibilityError,
    ConfigError,
    DataError,
    DomainError,
    NumericError,
    SnapshotFormatError,
    TrainingError,
    UsageError,
)
from .hierlabel import class_histogram, format_partitions
from .model import AblationFlags
from .pipeline import evaluate, load_snapshot, prepare_from_config, save_snapshot, train
from .pipeline.data import load_csv

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("hcan")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _resolve_config(args):
    cfg = load_config(args.config)
    data = cfg.data
    if data.path and not os.path.isabs(data.path):
        base = os.path.dirname(os.path.abspath(args.config))
        data = replace(data, path=os.path.normpath(os.path.join(base, data.path)))
    updates = {"data": data}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.out is not None:
        updates["out_dir"] = args.out
    return cfg.with_updates(**updates)


def _write_log(path, rows):
    keys = []
    for row in rows:
        keys += [k for k in row if k not in keys]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=keys)
        w.writeheader()
        for row in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})


def _run(cfg, data=None, values=None, names=None):
    res = train(cfg, data=data, values=values, names=names)
    test = evaluate(res.model, res.data.test, cfg.eval_batch_size)
    return res, test


def cmd_train(args):
    cfg = _resolve_config(args)
    os.makedirs(cfg.out_dir, exist_ok=True)
    res, test = _run(cfg)
    data = res.data
    snap = os.path.join(cfg.out_dir, "snapshot.npz")
    save_snapshot(snap, res.model, cfg, data.normalizer, data.partitions, data.names)
    _write_log(os.path.join(cfg.out_dir, "epoch_log.csv"), res.log)
    summary = {
        "test_mse": test.mse,
        "test_mae": test.mae,
        "test_windows": test.n_windows,
        "best_epoch": res.best_epoch,
        "best_val_mse": res.best_val_mse,
        "epochs_run": len(res.log),
        "seed": cfg.seed,
        "config_hash": cfg.hash(),
        "config": cfg.to_dict(),
    }
    with open(os.path.join(cfg.out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2)
    print(f"test mse {test.mse:.6f} mae {test.mae:.6f} (best epoch {res.best_epoch})")
    print(f"wrote {snap}")
    return EXIT_OK


def _snapshot_data(snap, data_path=None):
    cfg = snap.config
    if data_path:
        cfg = cfg.with_updates(data=replace(cfg.data, path=data_path))
    values, names = load_csv(cfg.data.path, cfg.data.columns or None)
    if list(names) != list(snap.names):
        raise CompatibilityError(f"dataset columns {names} do not match snapshot columns {snap.names}")
    data = prepare_from_config(
        cfg, values=values, names=names, normalizer=snap.normalizer, partitions=snap.partitions
    )
    return cfg, data


def cmd_evaluate(args):
    snap = load_snapshot(args.snapshot)
    cfg, data = _snapshot_data(snap, args.data)
    # an explicit --config must describe the same model as the snapshot
    model = snap.restore_model(_resolve_config(args) if args.config else None)
    windows = data.split(args.split)
    res = evaluate(model, windows, cfg.eval_batch_size, keep_predictions=True)
    print(f"{args.split} mse {res.mse!r} mae {res.mae!r} windows {res.n_windows}")
    out_dir = args.out or os.path.dirname(os.path.abspath(args.snapshot))
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"predictions_{args.split}.csv")
    n, T, D = res.predictions.shape
    header = ["window", "step"] + [f"pred_{c}" for c in data.names] + [f"true_{c}" for c in data.names]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i in range(n):
            for t in range(T):
                w.writerow([i, t, *map(repr, res.predictions[i, t].tolist()), *map(repr, res.targets[i, t].tolist())])
    print(f"wrote {path} ({n * T} rows)")
    return EXIT_OK


def cmd_ablate(args):
    base = _resolve_config(args)
    os.makedirs(base.out_dir, exist_ok=True)
    values, names = load_csv(base.data.path, base.data.columns or None)
    rows = []
    for i, flags in enumerate(AblationFlags.ablation_rows()):
        cfg = base.with_updates(flags=flags)
        res, test = _run(cfg, values=values, names=names)
        row = {"row": i, **{k: int(v) for k, v in flags.as_dict().items()}}
        row.update(best_val_mse=res.best_val_mse, test_mse=test.mse, test_mae=test.mae)
        rows.append(row)
        print(f"row {i}: test mse {test.mse:.6f} mae {test.mae:.6f}")
    mses = [r["test_mse"] for r in rows]
    monotone = all(b <= a for a, b in zip(mses, mses[1:]))
    for r in rows:
        r["monotone_trend"] = int(monotone)
    path = os.path.join(base.out_dir, "ablation.csv")
    _write_log(path, rows)
    print(f"monotone non-increasing mse: {'yes' if monotone else 'no'}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_inspect_partition(args):
    if args.snapshot:
        snap = load_snapshot(args.snapshot)
        partitions = snap.partitions
        try:
            _, data = _snapshot_data(snap, args.data)
        except DataError:
            data = None
    else:
        if not args.config:
            raise UsageError("inspect-partition needs --config or --snapshot")
        data = prepare_from_config(_resolve_config(args))
        partitions = data.partitions
    lines = [format_partitions(partitions).rstrip("\n")]
    if data is not None:
        tr = data.train.series
        lines.append("# train-split class histograms: # hist level channel counts...")
        for level in sorted(partitions):
            hist = class_histogram(partitions[level], tr)
            for d, counts in enumerate(hist):
                lines.append(f"# hist {level} {d} " + " ".join(str(int(c)) for c in counts))
    text = "\n".join(lines) + "\n"
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "partitions.txt")
        with open(path, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK


def build_parser():
    p = _Parser(prog="hcan", description="Hierarchical classification auxiliary network for forecasting")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, config_required=True):
        sp.add_argument("--config", required=config_required, help="INI run configuration")
        sp.add_argument("--seed", type=int, help="override train.seed")
        sp.add_argument("--out", help="output directory")

    common(sub.add_parser("train", help="train one configuration"))
    ev = sub.add_parser("evaluate", help="evaluate a snapshot on a split")
    common(ev, config_required=False)
    ev.add_argument("--snapshot", required=True)
    ev.add_argument("--split", choices=("train", "val", "test"), default="test")
    ev.add_argument("--data", help="dataset path (defaults to the one in the snapshot)")
    common(sub.add_parser("ablate", help="run the six cumulative component chains"))
    ip = sub.add_parser("inspect-partition", help="print fitted class boundaries")
    common(ip, config_required=False)
    ip.add_argument("--snapshot")
    ip.add_argument("--data")
    return p


_COMMANDS = {
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "ablate": cmd_ablate,
    "inspect-partition": cmd_inspect_partition,
}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"hcan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return _COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"hcan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TrainingError, NumericError, DomainError, FloatingPointError) as exc:
        print(f"hcan: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, SnapshotFormatError, CompatibilityError, OSError) as exc:
        print(f"hcan: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
