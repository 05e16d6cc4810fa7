"""
Reverse-mode autodiff with hcan.ndgrad
======================================

Tensors wrap float64 arrays and record the ops applied to them.  Calling
``backward`` on a scalar fills ``.grad`` on every leaf that asked for it.
"""

import numpy as np

from hcan import ndgrad as nd
from hcan.ndgrad.special import trigamma

rng = np.random.default_rng(0)

# a tiny least-squares problem: y = x @ w
x = rng.normal(size=(8, 3))
w_true = np.array([[1.5], [-2.0], [0.5]])
y = x @ w_true

w = nd.Tensor(np.zeros((3, 1)), requires_grad=True)
loss = ((nd.matmul(x, w) - y) ** 2).mean()
nd.backward(loss)
print("loss at w=0:", float(loss.values))
print("analytic grad  :", w.grad.ravel())
print("closed form    :", (-2 * x.T @ y / len(y)).ravel())

# every op can be compared against central differences
err = nd.gradcheck(lambda a: nd.softplus(nd.matmul(x, a)).sum(), [rng.normal(size=(3, 1))])
print("\nsoftplus(x @ a) gradcheck, worst relative error:", err)

# special functions used by the evidential losses
print("\ndigamma(1)   =", nd.digamma(np.array([1.0])).values[0], "(minus Euler's gamma)")
print("lgamma(0.5)  =", nd.lgamma(np.array([0.5])).values[0], "(log sqrt(pi) =", np.log(np.sqrt(np.pi)), ")")
print("trigamma(1)  =", trigamma(np.array([1.0]))[0], "(pi^2/6 =", np.pi**2 / 6, ")")

# Adam on the same problem
params = [nd.Tensor(np.zeros((3, 1)), requires_grad=True)]
state = nd.AdamState.for_params(params, lr=0.05)
for step in range(500):
    loss = ((nd.matmul(x, params[0]) - y) ** 2).mean()
    params[0].grad = None
    nd.backward(loss)
    nd.adam_step(params, [params[0].grad], state)
print("\nAdam after 500 steps:", np.round(params[0].values.ravel(), 4), "target", w_true.ravel())
