"""Composite training objective: hierarchy + consistency + forecast MSE."""

from dataclasses import asdict, dataclass, replace

from .. import ndgrad as nd
from ..errors import ConfigError
from ..hcl import hcl_loss
from ..uac import hierarchy_loss, level_terms


@dataclass(frozen=True)
class LossWeights:
    lambda_ua: float = 1.0
    lambda_kl: float = 1.0
    alpha_reg: float = 1.0
    beta: float = 0.1
    gamma: float = 1.0
    kl_anneal_epochs: int = 10

    def __post_init__(self):
        for k, v in asdict(self).items():
            if v < 0:
                raise ConfigError(f"loss weight {k} must be >= 0, got {v}")

    def at_epoch(self, epoch):
        """Weights in effect during ``epoch`` (0-based): lambda_kl ramps up linearly."""
        if self.kl_anneal_epochs <= 0:
            return self
        ramp = min(1.0, epoch / self.kl_anneal_epochs)
        return replace(self, lambda_kl=self.lambda_kl * ramp)

    def masked(self, flags):
        """Zero the weights of components switched off by ablation flags."""
        return replace(
            self,
            alpha_reg=self.alpha_reg if flags.enable_reg else 0.0,
            beta=self.beta if flags.enable_hcl else 0.0,
        )


def mse(pred, target):
    err = pred - target
    return (err * err).mean()


def total_loss(outputs, batch, weights, spec):
    """Return ``(loss, terms)`` where ``terms`` maps names to float values.

    Heads missing from ``outputs`` (ablation) and zero-weighted terms are left
    out of the graph entirely, so the bare-backbone case is plain MSE.
    """
    terms = {}
    total = None
    fine_lv, coarse_lv = spec.fine_level, spec.coarse_level
    if outputs.e_fine is not None:
        fine = level_terms(
            outputs.e_fine,
            outputs.delta_fine,
            batch.classes[fine_lv],
            batch.offsets[fine_lv],
            weights.lambda_ua,
            weights.lambda_kl,
            with_reg=weights.alpha_reg > 0,
        )
        coarse = None
        if outputs.e_coarse is not None:
            coarse = level_terms(
                outputs.e_coarse,
                outputs.delta_coarse,
                batch.classes[coarse_lv],
                batch.offsets[coarse_lv],
                weights.lambda_ua,
                weights.lambda_kl,
                with_reg=weights.alpha_reg > 0,
            )
        hier = hierarchy_loss(fine, coarse, weights.alpha_reg)
        for tag, lv in (("fine", fine), ("coarse", coarse)):
            if lv is None:
                continue
            terms[f"ua_{tag}"] = _val(lv.ua)
            terms[f"kl_{tag}"] = _val(lv.kl)
            terms[f"reg_{tag}"] = _val(lv.reg)
        terms["hier"] = _val(hier)
        total = hier
        if coarse is not None and weights.beta > 0:
            nesting = spec.nesting_between(fine_lv, coarse_lv)
            h = hcl_loss(outputs.e_coarse, outputs.e_fine, nesting)
            terms["hcl"] = _val(h)
            total = total + weights.beta * h
    m = mse(outputs.y_hat, batch.y)
    terms["mse"] = _val(m)
    if weights.gamma > 0:
        scaled = m if weights.gamma == 1.0 else weights.gamma * m
        total = scaled if total is None else total + scaled
    if total is None:
        total = nd.Tensor(0.0)
    terms["total"] = _val(total)
    return total, terms


def _val(x):
    return float(x.values) if isinstance(x, nd.Tensor) else float(x)
