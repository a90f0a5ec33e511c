"""U-Net phase refiner.

The network sees a phase hologram normalized to (-1, 1], predicts a
bounded correction, and returns the wrapped sum, so an untrained network
is exactly the identity: the head convolution starts at zero, making the
initial refined hologram equal its input. Three pooling stages take a
256-pixel input to a 32x32 bottleneck; channels double per stage from 8
to 64. All convolutions are 3x3, stride 1, zero padded; upsampling is
nearest-neighbor followed by a convolution.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import torch
import torch.nn.functional as F
from torch import nn

from .errors import GeometryError

__all__ = ["UNetSpec", "PhaseRefiner", "build_unet", "wrap_normalized"]

_log = logging.getLogger(__name__)


@dataclass(frozen=True)
class UNetSpec:
    """Network geometry.

    Parameters
    ----------
    input_size : int
        Nominal square input size in pixels; must be divisible by
        2**pool_stages. The network is fully convolutional, so any input
        satisfying the same divisibility runs too.
    base_channels : int
        Channels at full resolution; doubles per pooling stage.
    pool_stages : int
        Number of 2x poolings between the input and the bottleneck.
    """

    input_size: int = 256
    base_channels: int = 8
    pool_stages: int = 3

    def __post_init__(self):
        if self.pool_stages < 1:
            raise GeometryError(f"pool_stages must be >= 1, got {self.pool_stages}")
        if self.base_channels < 1:
            raise GeometryError(f"base_channels must be >= 1, got {self.base_channels}")
        factor = 2**self.pool_stages
        if self.input_size < factor or self.input_size % factor:
            raise GeometryError(
                f"input_size must be a positive multiple of {factor}, got {self.input_size}"
            )

    @property
    def bottleneck_channels(self) -> int:
        return self.base_channels * 2**self.pool_stages


def wrap_normalized(x: torch.Tensor) -> torch.Tensor:
    """Wrap normalized phase into (-1, 1]; gradient is 1 almost
    everywhere.

    Values already inside the interval pass through bit-exactly, so a
    refiner whose residual head is still zero reproduces its input
    without rounding drift.
    """
    wrapped = 1.0 - torch.remainder(1.0 - x, 2.0)
    return torch.where((x > -1.0) & (x <= 1.0), x, wrapped)


def _double_conv(c_in: int, c_out: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(c_in, c_out, 3, padding=1),
        nn.ReLU(inplace=True),
        nn.Conv2d(c_out, c_out, 3, padding=1),
        nn.ReLU(inplace=True),
    )


class PhaseRefiner(nn.Module):
    """U-Net over normalized phase with an identity-leaning residual head.

    Input and output are (B, 1, H, W) with values in (-1, 1] (phase over
    pi). The output is wrap(input + tanh(head)), a correction bounded to
    one half-turn either way.
    """

    def __init__(self, spec: UNetSpec = UNetSpec()):
        super().__init__()
        self.spec = spec
        ch = [spec.base_channels * 2**i for i in range(spec.pool_stages + 1)]
        self.encoders = nn.ModuleList()
        prev = 1
        for c in ch[:-1]:
            self.encoders.append(_double_conv(prev, c))
            prev = c
        self.bottleneck = _double_conv(ch[-2], ch[-1])
        self.upconvs = nn.ModuleList()
        self.decoders = nn.ModuleList()
        for c_hi, c_lo in zip(ch[:0:-1], ch[-2::-1]):
            self.upconvs.append(nn.Conv2d(c_hi, c_lo, 3, padding=1))
            self.decoders.append(_double_conv(2 * c_lo, c_lo))
        self.head = nn.Conv2d(ch[0], 1, 3, padding=1)
        nn.init.zeros_(self.head.weight)
        nn.init.zeros_(self.head.bias)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.ndim != 4 or x.shape[1] != 1:
            raise GeometryError(f"input must be (B, 1, H, W), got {tuple(x.shape)}")
        factor = 2**self.spec.pool_stages
        if x.shape[-2] % factor or x.shape[-1] % factor:
            raise GeometryError(
                f"input size {tuple(x.shape[-2:])} is not divisible by {factor}"
            )
        skips = []
        h = x
        for encoder in self.encoders:
            h = encoder(h)
            skips.append(h)
            h = F.max_pool2d(h, 2)
        h = self.bottleneck(h)
        for upconv, decoder, skip in zip(self.upconvs, self.decoders, reversed(skips)):
            h = upconv(F.interpolate(h, scale_factor=2, mode="nearest"))
            h = decoder(torch.cat([h, skip], dim=1))
        return wrap_normalized(x + torch.tanh(self.head(h)))


def build_unet(spec: UNetSpec = UNetSpec(), seed: int = 0) -> PhaseRefiner:
    """Deterministically initialized refiner.

    The same (spec, seed) always yields identical parameters; the head
    stays zero-initialized so the fresh network is the identity. Parameter
    count and per-layer shapes go to the module logger.
    """
    with torch.random.fork_rng():
        torch.manual_seed(seed)
        model = PhaseRefiner(spec)
    total = sum(p.numel() for p in model.parameters())
    _log.info("refiner: %d parameters (%s)", total, spec)
    for name, p in model.named_parameters():
        _log.debug("  %s: %s", name, tuple(p.shape))
    return model
