"""Evidential (Dirichlet) uncertainty-aware classification losses.

Evidence tensors carry the class axis last: ``(..., K)``.  Every loss is
mean-reduced over all leading positions (batch, timestep, channel).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import ndgrad as nd
from .errors import ContractViolation, DimensionError, LabelError


@dataclass
class DirichletStats:
    evidence: nd.Tensor
    alpha: nd.Tensor
    strength: nd.Tensor  # S, shape (..., 1)
    belief: nd.Tensor
    uncertainty: nd.Tensor  # u, shape (..., 1)
    prob: nd.Tensor

    @property
    def n_classes(self):
        return self.alpha.shape[-1]


def dirichlet_stats(evidence):
    """alpha = e + 1, S = sum(alpha), b = e / S, u = K / S, p = alpha / S."""
    e = nd.as_tensor(evidence)
    if np.any(e.values < 0):
        raise ContractViolation("evidence must be non-negative")
    K = e.shape[-1]
    alpha = e + 1.0
    S = alpha.sum(axis=-1, keepdims=True)
    return DirichletStats(
        evidence=e,
        alpha=alpha,
        strength=S,
        belief=e / S,
        uncertainty=float(K) / S,
        prob=alpha / S,
    )


def _check_onehot(onehot, shape):
    o = np.asarray(onehot.values if isinstance(onehot, nd.Tensor) else onehot, dtype=np.float64)
    if o.shape != tuple(shape):
        raise LabelError(f"one-hot shape {o.shape} does not match evidence shape {tuple(shape)}")
    if not np.all((o == 0) | (o == 1)) or not np.all(o.sum(axis=-1) == 1):
        raise LabelError("one-hot labels must have exactly one 1 per position")
    return o


def ua_loss(stats, onehot):
    """Uncertainty-weighted digamma loss.

    Per position: sum_k (1 - b_k) o_k (psi(S) - psi(alpha_k)), which reduces
    to (1 - b_true)(psi(S) - psi(alpha_true)).
    """
    o = _check_onehot(onehot, stats.alpha.shape)
    # gather the true class first so digamma runs on (..., 1) only
    alpha_true = (stats.alpha * o).sum(axis=-1, keepdims=True)
    b_true = (stats.belief * o).sum(axis=-1, keepdims=True)
    # S > alpha_true so the gap is positive; for huge evidence it cancels to
    # a few ulps and can round below zero
    gap = nd.clip_min(nd.digamma(stats.strength) - nd.digamma(alpha_true), 0.0)
    per_pos = (1.0 - b_true) * gap
    return per_pos.mean()


def kl_to_uniform(alpha, onehot):
    """KL[Dir(alpha_tilde) || Dir(1)] with the true-class evidence removed.

    alpha_tilde = o + (1 - o) * alpha, then the closed form
    lnG(S~) - lnG(K) - sum lnG(a~_k) + sum (a~_k - 1)(psi(a~_k) - psi(S~)).
    """
    alpha = nd.as_tensor(alpha)
    o = _check_onehot(onehot, alpha.shape)
    K = alpha.shape[-1]
    at = o + (1.0 - o) * alpha
    St = at.sum(axis=-1, keepdims=True)
    log_norm = nd.lgamma(St).sum(axis=-1) - math.lgamma(K) - nd.lgamma(at).sum(axis=-1)
    digamma_term = ((at - 1.0) * (nd.digamma(at) - nd.digamma(St))).sum(axis=-1)
    # the divergence is >= 0; near alpha_tilde = 1 the terms cancel to rounding noise
    return nd.clip_min(log_norm + digamma_term, 0.0).mean()


def relative_regression_loss(delta_pred, delta_true, onehot):
    """Squared offset error at the true class only, mean over positions."""
    delta_pred = nd.as_tensor(delta_pred)
    delta_true = np.asarray(delta_true, dtype=np.float64)
    if delta_pred.shape[:-1] != delta_true.shape:
        raise DimensionError(
            f"relative predictions {delta_pred.shape} do not match targets {delta_true.shape}"
        )
    o = _check_onehot(onehot, delta_pred.shape)
    err = delta_pred - delta_true[..., None]
    return (o * err * err).sum(axis=-1).mean()


@dataclass
class UacLossTerms:
    """Loss terms of one hierarchy level plus the weights that combine them."""

    ua: object = 0.0
    kl: object = 0.0
    reg: object = 0.0
    lambda_ua: float = 1.0
    lambda_kl: float = 1.0

    @property
    def uac(self):
        return self.lambda_ua * self.ua + self.lambda_kl * self.kl


def level_terms(evidence, delta_pred, classes, offsets, lambda_ua=1.0, lambda_kl=1.0, with_reg=True):
    """All loss terms for one level from raw head outputs and labels."""
    K = evidence.shape[-1]
    o = (np.asarray(classes)[..., None] == np.arange(K)).astype(np.float64)
    stats = dirichlet_stats(evidence)
    terms = UacLossTerms(
        ua=ua_loss(stats, o),
        kl=kl_to_uniform(stats.alpha, o),
        lambda_ua=lambda_ua,
        lambda_kl=lambda_kl,
    )
    if with_reg:
        terms.reg = relative_regression_loss(delta_pred, offsets, o)
    return terms


def hierarchy_loss(fine, coarse=None, alpha_reg=1.0):
    """L_UAC^f + a L_REG^f + L_UAC^c + a L_REG^c; ``coarse`` may be None."""
    total = fine.uac + alpha_reg * fine.reg
    if coarse is not None:
        total = total + coarse.uac + alpha_reg * coarse.reg
    return total
