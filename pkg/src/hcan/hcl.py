"""Hierarchical consistency between fine and coarse evidence."""

import numpy as np

from . import ndgrad as nd
from .errors import ConfigError, DimensionError

LOG_FLOOR = 1e-12


def averaging_matrix(nesting, n_coarse=None):
    """(K_f, K_c) matrix whose column g averages the fine classes with parent g."""
    nesting = np.asarray(nesting, dtype=np.int64)
    if n_coarse is None:
        n_coarse = int(nesting.max()) + 1
    counts = np.bincount(nesting, minlength=n_coarse)
    if np.any(counts == 0):
        empty = np.flatnonzero(counts == 0).tolist()
        raise ConfigError(f"coarse classes {empty} have no fine members")
    mat = np.zeros((nesting.size, n_coarse))
    mat[np.arange(nesting.size), nesting] = 1.0 / counts[nesting]
    return mat


def convert_fine_to_coarse(e_fine, nesting, n_coarse=None):
    """Mean of the fine evidence within each coarse group: (..., K_f) -> (..., K_c)."""
    e_fine = nd.as_tensor(e_fine)
    nesting = np.asarray(nesting)
    if nesting.size != e_fine.shape[-1]:
        raise DimensionError(
            f"nesting map covers {nesting.size} fine classes, evidence has {e_fine.shape[-1]}"
        )
    avg = nd.Tensor(averaging_matrix(nesting, n_coarse))
    if e_fine.ndim == 1:
        return nd.matmul(e_fine.reshape(1, -1), avg).reshape(-1)
    return nd.matmul(e_fine, avg)


def symmetric_kl(a, b, axis=-1):
    """0.5 KL(softmax a || softmax b) + 0.5 KL(softmax b || softmax a), mean over positions.

    Written as 0.5 * sum (p - q)(log p - log q): algebraically the same sum,
    but every term is non-negative and the expression is exactly symmetric.
    """
    p = nd.softmax(a, axis=axis)
    q = nd.softmax(b, axis=axis)
    lp = nd.log(nd.clip_min(p, LOG_FLOOR))
    lq = nd.log(nd.clip_min(q, LOG_FLOOR))
    return (0.5 * ((p - q) * (lp - lq)).sum(axis=axis)).mean()


def hcl_loss(e_coarse, e_fine, nesting):
    """Consistency loss between coarse evidence and the converted fine evidence."""
    e_coarse = nd.as_tensor(e_coarse)
    converted = convert_fine_to_coarse(e_fine, nesting, n_coarse=e_coarse.shape[-1])
    if converted.shape != e_coarse.shape:
        raise DimensionError(f"coarse evidence {e_coarse.shape} vs converted {converted.shape}")
    return symmetric_kl(e_coarse, converted)
