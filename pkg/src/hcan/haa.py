"""Feature heads, evidential classifier heads and hierarchy-aware attention.

Shapes (leading batch axes omitted): backbone feature ``F`` is ``(D, T)``;
the fine, coarse and temporal features are ``(D, M)``; evidence and
relative predictions are ``(T, D, K)``; the prediction is ``(T, D)``.
"""

from dataclasses import dataclass

import numpy as np

from . import ndgrad as nd
from .errors import DimensionError, NumericError
from .nn import Linear, Module


class HaaParams(Module):
    """All HCAN parameters downstream of the backbone.

    ``k_coarse=None`` drops the coarse classifier (fine-only ablation rows);
    ``fusion`` selects attention (``"haa"``) or the concatenation baseline
    (``"concat"``) used by the ablation rows without attention.
    """

    _layers = (
        "head_fine",
        "head_coarse",
        "head_temporal",
        "evidence_fine",
        "delta_fine",
        "evidence_coarse",
        "delta_coarse",
        "attn_proj",
        "out_proj",
        "concat_proj",
    )

    def __init__(self, horizon, hidden, k_fine, k_coarse, rng, fusion="haa"):
        T, M = horizon, hidden
        self.horizon, self.hidden = T, M
        self.k_fine, self.k_coarse = k_fine, k_coarse
        self.fusion = fusion
        use_coarse = k_coarse is not None
        self.head_fine = Linear(T, M, rng, name="head_fine")
        self.head_coarse = Linear(T, M, rng, name="head_coarse") if (use_coarse or fusion == "haa") else None
        self.head_temporal = Linear(T, M, rng, name="head_temporal") if fusion == "haa" else None
        self.evidence_fine = Linear(M, T * k_fine, rng, name="evidence_fine")
        self.delta_fine = Linear(M, T * k_fine, rng, name="delta_fine")
        self.evidence_coarse = Linear(M, T * k_coarse, rng, name="evidence_coarse") if use_coarse else None
        self.delta_coarse = Linear(M, T * k_coarse, rng, name="delta_coarse") if use_coarse else None
        if fusion == "haa":
            self.attn_proj = Linear(M, T, rng, name="attn_proj")
            self.out_proj = Linear(T, T, rng, name="out_proj")
            self.concat_proj = None
        elif fusion == "concat":
            n_feat = 2 if use_coarse else 1
            self.attn_proj = self.out_proj = None
            self.concat_proj = Linear(T + n_feat * M, T, rng, name="concat_proj")
        else:
            raise ValueError(f"unknown fusion {fusion!r}")


def _check_feature(F, horizon):
    if F.ndim < 2 or F.shape[-1] != horizon:
        raise DimensionError(f"backbone feature must be (..., D, {horizon}), got {F.shape}")


def feature_heads(F, params):
    """(fine theta, coarse phi, temporal eta); absent heads come back as None."""
    F = nd.as_tensor(F)
    _check_feature(F, params.horizon)
    theta = params.head_fine(F)
    phi = params.head_coarse(F) if params.head_coarse is not None else None
    eta = params.head_temporal(F) if params.head_temporal is not None else None
    return theta, phi, eta


def _to_time_major(z, T, K):
    """(..., D, T*K) -> (..., T, D, K)."""
    lead = z.shape[:-2]
    D = z.shape[-2]
    z = z.reshape(lead + (D, T, K))
    n = len(lead)
    return z.transpose(tuple(range(n)) + (n + 1, n, n + 2))


def classifier_heads(theta, phi, params):
    """Evidence (softplus) and relative predictions for each classifier level.

    Returns ``(e_fine, delta_fine, e_coarse, delta_coarse)``; coarse entries are
    None when the coarse classifier is disabled.
    """
    T = params.horizon
    if theta.shape[-1] != params.hidden:
        raise DimensionError(f"fine feature must have last dim {params.hidden}, got {theta.shape}")
    e_f = _to_time_major(nd.softplus(params.evidence_fine(theta)), T, params.k_fine)
    d_f = _to_time_major(params.delta_fine(theta), T, params.k_fine)
    if params.evidence_coarse is None:
        return e_f, d_f, None, None
    if phi is None or phi.shape[-1] != params.hidden:
        raise DimensionError("coarse classifier needs a (..., D, M) coarse feature")
    e_c = _to_time_major(nd.softplus(params.evidence_coarse(phi)), T, params.k_coarse)
    d_c = _to_time_major(params.delta_coarse(phi), T, params.k_coarse)
    return e_f, d_f, e_c, d_c


def attention_map(theta, phi):
    """Row-softmaxed channel-by-channel map softmax(theta phi^T), (..., D, D)."""
    logits = nd.matmul(theta, nd.transpose(phi))
    if np.any(np.isnan(logits.values)):
        raise NumericError("NaN in attention logits")
    return nd.softmax(logits, axis=-1)


def haa_forward(F, theta, phi, eta, params):
    """Y = W_f(W (A eta) + F) + b, returned time-major (..., T, D)."""
    F = nd.as_tensor(F)
    _check_feature(F, params.horizon)
    A = attention_map(theta, phi)
    Z = nd.matmul(A, eta)
    fused = params.attn_proj(Z) + F
    return nd.transpose(params.out_proj(fused))


def concat_forward(F, theta, phi, params):
    """Ablation fusion without attention: Linear([F, theta, (phi)]) -> (..., T, D)."""
    F = nd.as_tensor(F)
    _check_feature(F, params.horizon)
    parts = [F, theta] if phi is None or params.evidence_coarse is None else [F, theta, phi]
    return nd.transpose(params.concat_proj(nd.concat(parts, axis=-1)))


@dataclass
class HcanOutputs:
    y_hat: nd.Tensor
    e_fine: object = None
    delta_fine: object = None
    e_coarse: object = None
    delta_coarse: object = None
    attention: object = None
