"""
Turning values into hierarchical class labels
=============================================

Each level splits the training values of a channel into K equal-count
intervals.  A value's label is the interval it falls in, plus its offset
from that interval's left edge.  Coarse intervals are unions of fine ones.
"""

import numpy as np

from hcan.hierlabel import HierarchySpec, build_labels, fit_hierarchy, format_partitions

rng = np.random.default_rng(1)
train = np.c_[rng.normal(size=401), rng.exponential(size=401)]

spec = HierarchySpec((1, 2, 4))
parts = fit_hierarchy(train, spec)
print(format_partitions(parts))

# the coarse boundaries are every other fine boundary
print("fine[::2] == coarse:", np.array_equal(parts[2].boundaries[:, ::2], parts[1].boundaries))
print("fine -> coarse map:", spec.parent_map(2))

y = np.array([[-1.2, 0.1], [0.0, 0.7], [2.5, 3.0]])
labels = build_labels(y, spec, parts)
for level in (1, 2):
    k, delta = labels[level]
    print(f"\nlevel {level} classes:\n{k}\noffsets:\n{np.round(delta, 4)}")

# every fine class sits inside the coarse class it maps to
kf, kc = labels[2][0], labels[1][0]
print("\nnested:", np.array_equal(spec.parent_map(2)[kf], kc))
