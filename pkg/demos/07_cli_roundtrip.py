"""
The command line, end to end
============================

Write a CSV and an INI file, train, evaluate the snapshot and print the
fitted partitions, all through ``hcan.cli.main``.
"""

import json
import os
import tempfile

from hcan.cli import main
from hcan.synthetic import seasonal_series, write_csv

work = tempfile.mkdtemp(prefix="hcan-demo-")
write_csv(os.path.join(work, "series.csv"), seasonal_series(800, 2, seed=3), ["load", "temp"])
with open(os.path.join(work, "run.ini"), "w") as fh:
    fh.write("[data]\npath = series.csv\nlookback = 48\nhorizon = 12\n\n"
             "[model]\nhidden = 32\n\n[train]\nepochs = 3\nlr = 0.001\n")

out = os.path.join(work, "out")
print("$ hcan train")
main(["train", "--config", os.path.join(work, "run.ini"), "--out", out])
print(sorted(os.listdir(out)))
with open(os.path.join(out, "summary.json")) as fh:
    print("summary test mse:", json.load(fh)["test_mse"])

print("\n$ hcan evaluate")
main(["evaluate", "--snapshot", os.path.join(out, "snapshot.npz")])

print("\n$ hcan inspect-partition")
main(["inspect-partition", "--snapshot", os.path.join(out, "snapshot.npz")])

print("\n$ hcan train with an unknown backbone")
with open(os.path.join(work, "bad.ini"), "w") as fh:
    fh.write("[model]\nbackbone = tcn\n")
print("exit code", main(["train", "--config", os.path.join(work, "bad.ini")]))
