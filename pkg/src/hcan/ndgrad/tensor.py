"""Dense reverse-mode autodiff on float64 numpy arrays.

A ``Tensor`` wraps an array plus, for non-leaf nodes, the parents it was
computed from and a closure that maps the output gradient to parent
gradients.  ``backward()`` walks the graph in reverse topological order and
then releases the closures so intermediate buffers can be collected.
"""

import contextlib

import numpy as np

from ..errors import DimensionError, DomainError, NumericError, UsageError
from . import special

_GRAD_ENABLED = True


@contextlib.contextmanager
def no_grad():
    """Disable graph recording inside the block (evaluation passes)."""
    global _GRAD_ENABLED
    prev = _GRAD_ENABLED
    _GRAD_ENABLED = False
    try:
        yield
    finally:
        _GRAD_ENABLED = prev


def is_grad_enabled():
    return _GRAD_ENABLED


class Tensor:
    """A node in the computation graph.

    ``values`` is a float64 ndarray; ``grad`` is allocated lazily on the first
    accumulation and always has the shape of ``values``.
    """

    __slots__ = ("values", "grad", "requires_grad", "_parents", "_backward", "name")
    __array_priority__ = 100

    def __init__(self, values, requires_grad=False, name=None):
        self.values = np.asarray(values, dtype=np.float64)
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._parents = ()
        self._backward = None
        self.name = name

    def __repr__(self):
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}{flag})"

    @property
    def shape(self):
        return self.values.shape

    @property
    def ndim(self):
        return self.values.ndim

    @property
    def size(self):
        return self.values.size

    @property
    def T(self):
        return transpose(self)

    def numpy(self):
        return self.values

    def item(self):
        return float(self.values)

    def zero_grad(self):
        self.grad = None

    def detach(self):
        return Tensor(self.values)

    def _accumulate(self, g):
        if self.grad is None:
            self.grad = np.array(g, dtype=np.float64, copy=True)
        else:
            self.grad += g

    def backward(self):
        backward(self)

    # operators
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, exponent):
        return power(self, exponent)

    def __matmul__(self, other):
        return matmul(self, other)

    def __rmatmul__(self, other):
        return matmul(other, self)

    def __getitem__(self, index):
        return getitem(self, index)

    def sum(self, axis=None, keepdims=False):
        return tsum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)

    def transpose(self, *axes):
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        return transpose(self, axes or None)


def as_tensor(x):
    return x if isinstance(x, Tensor) else Tensor(x)


def _make(values, parents, backward_fn):
    out = Tensor(values)
    if _GRAD_ENABLED and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = parents
        out._backward = backward_fn
    return out


def _unbroadcast(g, shape):
    """Sum ``g`` down to ``shape`` (reverse of numpy broadcasting)."""
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g.reshape(shape)


def _broadcast_shape(a, b, op):
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError as exc:
        raise DimensionError(f"{op}: cannot broadcast {a.shape} with {b.shape}") from exc


# ---------------------------------------------------------------- elementwise


def add(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a, b, "add")

    def bw(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return _make(a.values + b.values, (a, b), bw)


def sub(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a, b, "sub")

    def bw(g):
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return _make(a.values - b.values, (a, b), bw)


def mul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a, b, "mul")

    def bw(g):
        return _unbroadcast(g * b.values, a.shape), _unbroadcast(g * a.values, b.shape)

    return _make(a.values * b.values, (a, b), bw)


def div(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a, b, "div")
    out_values = a.values / b.values

    def bw(g):
        ga = g / b.values
        gb = -g * out_values / b.values
        return _unbroadcast(ga, a.shape), _unbroadcast(gb, b.shape)

    return _make(out_values, (a, b), bw)


def neg(a):
    a = as_tensor(a)
    return _make(-a.values, (a,), lambda g: (-g,))


def power(a, exponent):
    """``a ** exponent`` for a constant real exponent."""
    a = as_tensor(a)
    p = float(exponent)
    if p == 2.0:
        return _make(a.values * a.values, (a,), lambda g: (2.0 * g * a.values,))
    return _make(a.values**p, (a,), lambda g: (g * p * a.values ** (p - 1.0),))


def square(a):
    return power(a, 2)


def exp(a):
    a = as_tensor(a)
    out_values = np.exp(a.values)
    return _make(out_values, (a,), lambda g: (g * out_values,))


def log(a):
    a = as_tensor(a)
    if np.any(a.values <= 0):
        raise DomainError("log: argument must be > 0")
    return _make(np.log(a.values), (a,), lambda g: (g / a.values,))


def abs(a):
    a = as_tensor(a)
    return _make(np.abs(a.values), (a,), lambda g: (g * np.sign(a.values),))


def clip_min(a, floor):
    """max(a, floor); gradient passes only where a > floor."""
    a = as_tensor(a)
    keep = a.values > floor
    return _make(np.where(keep, a.values, floor), (a,), lambda g: (g * keep,))


def sigmoid_values(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softplus(a):
    """ln(1 + e^x), returning x itself for x > 30."""
    a = as_tensor(a)
    x = a.values
    big = x > 30.0
    out_values = np.where(big, x, np.log1p(np.exp(np.minimum(x, 30.0))))
    return _make(out_values, (a,), lambda g: (g * sigmoid_values(x),))


def digamma(a):
    a = as_tensor(a)
    return _make(special.digamma(a.values), (a,), lambda g: (g * special.trigamma(a.values),))


def lgamma(a):
    a = as_tensor(a)
    return _make(special.lgamma(a.values), (a,), lambda g: (g * special.digamma(a.values),))


# ----------------------------------------------------------------- reductions


def _norm_axis(axis, ndim):
    if axis is None:
        return tuple(range(ndim))
    if isinstance(axis, int):
        axis = (axis,)
    return tuple(ax % ndim for ax in axis)


def tsum(a, axis=None, keepdims=False):
    a = as_tensor(a)
    axes = _norm_axis(axis, a.ndim)
    out_values = a.values.sum(axis=axes, keepdims=keepdims)

    def bw(g):
        if not keepdims:
            g = np.expand_dims(g, axes)
        return (np.broadcast_to(g, a.shape),)

    return _make(out_values, (a,), bw)


def mean(a, axis=None, keepdims=False):
    a = as_tensor(a)
    axes = _norm_axis(axis, a.ndim)
    count = 1
    for ax in axes:
        count *= a.shape[ax]
    out_values = a.values.mean(axis=axes, keepdims=keepdims)

    def bw(g):
        if not keepdims:
            g = np.expand_dims(g, axes)
        return (np.broadcast_to(g / count, a.shape),)

    return _make(out_values, (a,), bw)


# ------------------------------------------------------------------- shaping


def reshape(a, shape):
    a = as_tensor(a)
    try:
        out_values = a.values.reshape(shape)
    except ValueError as exc:
        raise DimensionError(f"reshape: cannot reshape {a.shape} to {shape}") from exc
    return _make(out_values, (a,), lambda g: (g.reshape(a.shape),))


def transpose(a, axes=None):
    """Permute axes; with ``axes=None`` swap the last two."""
    a = as_tensor(a)
    if axes is None:
        if a.ndim < 2:
            return a
        axes = tuple(range(a.ndim - 2)) + (a.ndim - 1, a.ndim - 2)
    axes = tuple(axes)
    inverse = tuple(np.argsort(axes))
    return _make(np.transpose(a.values, axes), (a,), lambda g: (np.transpose(g, inverse),))


def getitem(a, index):
    a = as_tensor(a)

    def bw(g):
        full = np.zeros(a.shape)
        np.add.at(full, index, g)
        return (full,)

    return _make(a.values[index], (a,), bw)


def concat(tensors, axis=-1):
    tensors = [as_tensor(t) for t in tensors]
    ndim = tensors[0].ndim
    ax = axis % ndim
    for t in tensors[1:]:
        if t.ndim != ndim or any(
            t.shape[i] != tensors[0].shape[i] for i in range(ndim) if i != ax
        ):
            raise DimensionError(
                f"concat: incompatible shapes {[t.shape for t in tensors]} on axis {axis}"
            )
    splits = np.cumsum([t.shape[ax] for t in tensors])[:-1]

    def bw(g):
        return tuple(np.split(g, splits, axis=ax))

    return _make(np.concatenate([t.values for t in tensors], axis=ax), tuple(tensors), bw)


# -------------------------------------------------------------------- linalg


def matmul(a, b):
    """Matrix product with numpy batching rules (both operands >= 2-D)."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2:
        raise DimensionError(f"matmul: operands must be at least 2-D, got {a.shape} and {b.shape}")
    if a.shape[-1] != b.shape[-2]:
        raise DimensionError(f"matmul: inner dimensions differ, {a.shape} @ {b.shape}")
    if b.ndim == 2 and a.ndim > 2:
        # fold batch axes into one GEMM; the weight gradient is then a single a^T g
        k, n = b.shape
        a2 = a.values.reshape(-1, k)
        out_values = (a2 @ b.values).reshape(a.shape[:-1] + (n,))

        def bw2(g):
            g2 = g.reshape(-1, n)
            return (g2 @ b.values.T).reshape(a.shape), a2.T @ g2

        return _make(out_values, (a, b), bw2)
    try:
        out_values = np.matmul(a.values, b.values)
    except ValueError as exc:
        raise DimensionError(f"matmul: batch dimensions differ, {a.shape} @ {b.shape}") from exc

    def bw(g):
        ga = np.matmul(g, np.swapaxes(b.values, -1, -2))
        gb = np.matmul(np.swapaxes(a.values, -1, -2), g)
        return _unbroadcast(ga, a.shape), _unbroadcast(gb, b.shape)

    return _make(out_values, (a, b), bw)


def softmax(a, axis=-1):
    a = as_tensor(a)
    x = a.values
    if np.any(np.isnan(x)):
        raise NumericError("softmax: NaN in input")
    if a.ndim == 0:
        raise DimensionError("softmax: needs at least one axis")
    if not -a.ndim <= axis < a.ndim:
        raise DimensionError(f"softmax: axis {axis} out of range for shape {a.shape}")
    shifted = x - x.max(axis=axis, keepdims=True)
    ex = np.exp(shifted)
    s = ex / ex.sum(axis=axis, keepdims=True)

    def bw(g):
        return (s * (g - (g * s).sum(axis=axis, keepdims=True)),)

    return _make(s, (a,), bw)


# ------------------------------------------------------------------ backward


def _topo_order(root):
    order = []
    seen = set()
    stack = [(root, False)]
    while stack:
        node, done = stack.pop()
        if done:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in reversed(node._parents):
            if parent.requires_grad and id(parent) not in seen:
                stack.append((parent, False))
    return order


def backward(root):
    """Accumulate d(root)/d(node) into ``.grad`` of every requires_grad ancestor.

    Leaves keep their gradients (accumulating across calls); interior nodes
    are unlinked afterwards so the graph can be garbage collected.
    """
    if root.size != 1:
        raise UsageError(f"backward() needs a scalar root, got shape {root.shape}")
    if not root.requires_grad:
        return
    order = _topo_order(root)
    grads = {id(root): np.ones(root.shape)}
    for node in reversed(order):
        g = grads.pop(id(node), None)
        if g is None:
            continue
        if node._backward is None:
            node._accumulate(g)
            continue
        node.grad = g
        for parent, pg in zip(node._parents, node._backward(g)):
            if not parent.requires_grad:
                continue
            key = id(parent)
            if key in grads:
                grads[key] = grads[key] + pg
            else:
                grads[key] = pg
    for node in order:
        if node._backward is not None:
            node._parents = ()
            node._backward = None
