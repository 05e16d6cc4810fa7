"""Minimal float64 reverse-mode autodiff used by every hcan loss and layer."""

from .optim import Adam, AdamState, adam_step
from .tensor import (
    Tensor,
    abs,
    add,
    as_tensor,
    backward,
    clip_min,
    concat,
    digamma,
    div,
    exp,
    getitem,
    is_grad_enabled,
    lgamma,
    log,
    matmul,
    mean,
    mul,
    neg,
    no_grad,
    power,
    reshape,
    softmax,
    softplus,
    square,
    sub,
    transpose,
    tsum,
)
from .gradcheck import gradcheck, numeric_grad, relative_error

__all__ = [
    "Adam",
    "AdamState",
    "Tensor",
    "abs",
    "adam_step",
    "add",
    "as_tensor",
    "backward",
    "clip_min",
    "concat",
    "digamma",
    "div",
    "exp",
    "getitem",
    "gradcheck",
    "is_grad_enabled",
    "lgamma",
    "log",
    "matmul",
    "mean",
    "mul",
    "neg",
    "no_grad",
    "numeric_grad",
    "power",
    "relative_error",
    "reshape",
    "softmax",
    "softplus",
    "square",
    "sub",
    "transpose",
    "tsum",
]
