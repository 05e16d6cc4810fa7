"""
Evidence, belief and uncertainty
================================

Classifier heads emit non-negative evidence.  Adding one gives Dirichlet
parameters; from those follow belief masses, an uncertainty mass and
expected class probabilities.
"""

import numpy as np

from hcan.hcl import convert_fine_to_coarse, hcl_loss
from hcan.uac import dirichlet_stats, kl_to_uniform, relative_regression_loss, ua_loss

for e in ([0.0, 0.0, 0.0, 0.0], [1.0, 1.0, 1.0, 1.0], [20.0, 0.0, 0.0, 0.0]):
    s = dirichlet_stats(np.array(e))
    print(f"evidence {e}: belief {np.round(s.belief.values, 3)} u {s.uncertainty.values[0]:.3f}"
          f" p {np.round(s.prob.values, 3)}")

onehot = np.array([[1.0, 0, 0, 0]])
print("\nua loss, evidence on the right class :", float(ua_loss(dirichlet_stats(np.array([[20.0, 0, 0, 0]])), onehot).values))
print("ua loss, evidence on the wrong class :", float(ua_loss(dirichlet_stats(np.array([[0.0, 20, 0, 0]])), onehot).values))

# the KL term only penalises evidence left on the wrong classes
print("\nKL, no stray evidence   :", float(kl_to_uniform(np.array([[21.0, 1, 1, 1]]), onehot).values))
print("KL, stray evidence      :", float(kl_to_uniform(np.array([[21.0, 6, 1, 1]]), onehot).values))

# offsets are only scored at the true class
pred = np.array([[[0.3, 9.0, -4.0, 2.0]]])
print("\nregression loss:", float(relative_regression_loss(pred, np.array([[0.1]]), onehot[None]).values))

# consistency: average fine evidence into coarse classes, then compare
nest = np.array([0, 0, 1, 1])
fine = np.array([4.0, 2.0, 0.5, 0.5])
print("\nfine evidence averaged into coarse:", convert_fine_to_coarse(fine, nest).values)
print("hcl, consistent coarse head  :", float(hcl_loss(np.array([3.0, 0.5]), fine, nest).values))
print("hcl, contradicting coarse head:", float(hcl_loss(np.array([0.5, 3.0]), fine, nest).values))
