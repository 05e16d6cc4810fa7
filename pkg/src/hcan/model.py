"""Backbone + HCAN assembly under the ablation flags."""

from dataclasses import asdict, dataclass, fields

from . import ndgrad as nd
from .errors import ConfigError
from .haa import HaaParams, HcanOutputs, attention_map, classifier_heads, concat_forward, feature_heads, haa_forward
from .hierlabel import HierarchySpec
from .nn import Module


@dataclass(frozen=True)
class AblationFlags:
    """Component switches; each one requires all the earlier ones."""

    enable_uac_fine: bool = True
    enable_reg: bool = True
    enable_hierarchy: bool = True
    enable_hcl: bool = True
    enable_haa: bool = True

    def __post_init__(self):
        chain = [getattr(self, f.name) for f in fields(self)]
        for i in range(1, len(chain)):
            if chain[i] and not chain[i - 1]:
                raise ConfigError(
                    f"ablation flag {fields(self)[i].name} requires {fields(self)[i - 1].name}"
                )

    @property
    def any(self):
        return self.enable_uac_fine

    def as_dict(self):
        return asdict(self)

    @classmethod
    def ablation_rows(cls):
        """The six cumulative component chains, from bare backbone to full HCAN."""
        names = [f.name for f in fields(cls)]
        return [cls(**{n: i < depth for i, n in enumerate(names)}) for depth in range(len(names) + 1)]


class HcanModel(Module):
    """Backbone followed (optionally) by the hierarchical classification heads."""

    _layers = ("backbone", "heads")

    def __init__(self, backbone, spec, flags, hidden, rng):
        self.backbone = backbone
        self.spec = spec if isinstance(spec, HierarchySpec) else HierarchySpec(spec)
        self.flags = flags
        self.heads = None
        if not flags.any:
            return
        fine = self.spec.fine_level
        if fine is None:
            raise ConfigError("HCAN components need at least one level with K > 1")
        k_fine = self.spec.class_counts[fine]
        k_coarse = None
        if flags.enable_hierarchy:
            coarse = self.spec.coarse_level
            if coarse is None:
                raise ConfigError("hierarchy flag needs two levels with K > 1")
            k_coarse = self.spec.class_counts[coarse]
        self.heads = HaaParams(
            backbone.horizon,
            hidden,
            k_fine,
            k_coarse,
            rng,
            fusion="haa" if flags.enable_haa else "concat",
        )

    def forward(self, x, with_attention=False):
        F = self.backbone(x)
        if self.heads is None:
            return HcanOutputs(y_hat=nd.transpose(F))
        theta, phi, eta = feature_heads(F, self.heads)
        e_f, d_f, e_c, d_c = classifier_heads(theta, phi, self.heads)
        attn = None
        if self.flags.enable_haa:
            y_hat = haa_forward(F, theta, phi, eta, self.heads)
            if with_attention:
                with nd.no_grad():
                    attn = attention_map(theta, phi).values
        else:
            y_hat = concat_forward(F, theta, phi, self.heads)
        return HcanOutputs(y_hat=y_hat, e_fine=e_f, delta_fine=d_f, e_coarse=e_c, delta_coarse=d_c, attention=attn)

    __call__ = forward
