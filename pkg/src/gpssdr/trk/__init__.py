from .carrier import CarrierMethod, gen_carrier
from .channel import Channel, ChannelPhase, TrackingConfig
from .loops import (dll_discriminator, fll_discriminator, pll_discriminator)

__all__ = [
    "CarrierMethod", "gen_carrier", "Channel", "ChannelPhase",
    "TrackingConfig", "dll_discriminator", "pll_discriminator",
    "fll_discriminator",
]
