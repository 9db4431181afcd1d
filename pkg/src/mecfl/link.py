"""Uplink rate model (OFDMA).

Each user sees a spectral base rate

    R_i = bandwidth * log2(1 + p_i * g_i / n0)

and receives the fractions ``uplink_offload`` / ``uplink_weight`` of it for
dataset offloading and weight upload. The two transmissions never run at
the same time, so the rates are memoryless functions; sequencing them is
the orchestrator's job.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError
from .types import AllocationState, SystemConfig, UserProfile


def base_rate(user: UserProfile, cfg: SystemConfig) -> float:
    """Full-bandwidth achievable rate of one user, bit/s."""
    snr = user.transmit_power * user.channel_gain / cfg.noise_power
    return cfg.bandwidth_hz * math.log2(1.0 + snr)


def offload_rate(user: UserProfile, alloc: AllocationState, cfg: SystemConfig) -> float:
    """Rate available for dataset offloading: the user's share of R_i."""
    return alloc.uplink_offload[user.id] * base_rate(user, cfg)


def upload_rate(user: UserProfile, alloc: AllocationState, cfg: SystemConfig) -> float:
    """Rate available for weight upload: the user's share of R_i."""
    return alloc.uplink_weight[user.id] * base_rate(user, cfg)


@dataclass(frozen=True)
class LinkRates:
    """Rates of one user under a given allocation, bit/s."""

    base_rate: float
    offload_rate: float
    upload_rate: float

    def __post_init__(self):
        if not (math.isfinite(self.base_rate) and self.base_rate > 0):
            raise ValidationError(f"LinkRates: base_rate must be > 0, got {self.base_rate!r}")
        for name in ("offload_rate", "upload_rate"):
            value = getattr(self, name)
            if not (0.0 <= value <= self.base_rate):
                raise ValidationError(f"LinkRates: {name} must lie in [0, base_rate]")


def link_rates(user: UserProfile, alloc: AllocationState, cfg: SystemConfig) -> LinkRates:
    rate = base_rate(user, cfg)
    return LinkRates(
        base_rate=rate,
        offload_rate=alloc.uplink_offload[user.id] * rate,
        upload_rate=alloc.uplink_weight[user.id] * rate,
    )
