"""Central finite-difference gradient checking."""

import numpy as np

from .tensor import Tensor, backward


def numeric_grad(fn, arrays, index, h=1e-5):
    """d fn / d arrays[index] by central differences; ``fn`` maps ndarrays to a float."""
    base = [np.array(a, dtype=np.float64, copy=True) for a in arrays]
    target = base[index]
    grad = np.zeros_like(target)
    flat = target.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        fp = fn(*base)
        flat[i] = orig - h
        fm = fn(*base)
        flat[i] = orig
        gflat[i] = (fp - fm) / (2.0 * h)
    return grad


def relative_error(a, b):
    """||a - b|| / max(||a||, ||b||, 1e-12)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    scale = max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)
    return float(np.linalg.norm(a - b) / scale)


def gradcheck(fn, arrays, h=1e-5):
    """Compare backprop gradients of scalar ``fn(*tensors)`` with finite differences.

    Returns the worst relative error across all inputs.
    """
    arrays = [np.asarray(a, dtype=np.float64) for a in arrays]
    tensors = [Tensor(a.copy(), requires_grad=True) for a in arrays]
    out = fn(*tensors)
    backward(out)

    def scalar(*xs):
        return float(fn(*[Tensor(x) for x in xs]).values)

    worst = 0.0
    for i, t in enumerate(tensors):
        analytic = t.grad if t.grad is not None else np.zeros(t.shape)
        numeric = numeric_grad(scalar, arrays, i, h=h)
        worst = max(worst, relative_error(analytic, numeric))
    return worst
