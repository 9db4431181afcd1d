"""Time and energy accounting for one communication round.

Sizes are carried in bytes and converted to bits only where they meet a
rate (rates are bit/s). The size of a dataset and of the weight vector are
linear models: ``bytes_per_sample * samples`` and
``bytes_per_weight_element * dim``.

A zero divisor (CPU share, bandwidth share) under a nonzero numerator
raises :class:`DegenerateDivisor` rather than producing ``inf``; when the
numerator is exactly zero the whole term is 0.

The module keeps two layers: scalar kernels (``training_time``,
``transmit_time``, ...) that broadcast over numpy arrays and carry no
guards, and the per-user operations built on top of them.
"""

from __future__ import annotations

from .errors import DegenerateDivisor
from .link import base_rate
from .types import AllocationState, ModelState, SystemConfig, UserProfile

BITS_PER_BYTE = 8.0


# --------------------------------------------------------------------------
# broadcasting kernels (no degeneracy guards; used by oracles as well)
# --------------------------------------------------------------------------

def training_time(data_bytes, cycles_per_byte, cpu_share, cpu_hz):
    """data_bytes * cycles_per_byte / (cpu_share * cpu_hz), seconds."""
    return data_bytes * cycles_per_byte / (cpu_share * cpu_hz)


def training_energy(capacitance, data_bytes, cycles_per_byte, cpu_share, cpu_hz):
    """capacitance * cycles * (effective frequency)^2, joules."""
    return capacitance * data_bytes * cycles_per_byte * (cpu_share * cpu_hz) ** 2


def transmit_time(payload_bytes, share, rate_bps):
    """8 * payload_bytes / (share * rate_bps), seconds."""
    return BITS_PER_BYTE * payload_bytes / (share * rate_bps)


def transmit_energy(power_w, payload_bytes, share, rate_bps):
    """Transmit power integrated over the transmission time, joules."""
    return power_w * transmit_time(payload_bytes, share, rate_bps)


def dataset_bytes(user: UserProfile, cfg: SystemConfig) -> float:
    return cfg.bytes_per_sample * user.dataset_size


def weights_bytes(model: ModelState, cfg: SystemConfig) -> float:
    return cfg.bytes_per_weight_element * model.dim


# --------------------------------------------------------------------------
# per-user operations
# --------------------------------------------------------------------------

def local_time(user: UserProfile, alloc: AllocationState, model: ModelState,
               cfg: SystemConfig) -> float:
    """Local training time plus weight-upload time of one user.

    (1 - delta) * data_bytes * cycles_per_byte / (gamma * cpu_hz)
        + 8 * weight_bytes / (uplink_weight * R_i)
    """
    i = user.id
    kept_bytes = (1.0 - alloc.delta[i]) * dataset_bytes(user, cfg)
    train = 0.0
    if kept_bytes > 0.0:
        if alloc.gamma[i] <= 0.0:
            raise DegenerateDivisor(f"user {i}: gamma=0 with local data to train on")
        train = training_time(kept_bytes, cfg.cycles_per_byte, alloc.gamma[i], user.cpu_hz)
    if alloc.uplink_weight[i] <= 0.0:
        raise DegenerateDivisor(f"user {i}: zero uplink share for the weight upload")
    upload = transmit_time(weights_bytes(model, cfg), alloc.uplink_weight[i],
                           base_rate(user, cfg))
    return train + upload


def local_energy(user: UserProfile, alloc: AllocationState, model: ModelState,
                 cfg: SystemConfig) -> float:
    """Local training energy plus weight-upload energy of one user.

    capacitance * (1 - delta) * data_bytes * cycles_per_byte * (gamma * cpu_hz)^2
        + p_i * 8 * weight_bytes / (uplink_weight * R_i)
    """
    i = user.id
    kept_bytes = (1.0 - alloc.delta[i]) * dataset_bytes(user, cfg)
    compute = training_energy(cfg.chip_capacitance, kept_bytes, cfg.cycles_per_byte,
                              alloc.gamma[i], user.cpu_hz)
    if alloc.uplink_weight[i] <= 0.0:
        raise DegenerateDivisor(f"user {i}: zero uplink share for the weight upload")
    upload = transmit_energy(user.transmit_power, weights_bytes(model, cfg),
                             alloc.uplink_weight[i], base_rate(user, cfg))
    return compute + upload


def offload_energy(user: UserProfile, alloc: AllocationState, cfg: SystemConfig) -> float:
    """Energy spent transmitting the offloaded dataset slice; 0 when delta=0."""
    i = user.id
    if alloc.delta[i] <= 0.0:
        return 0.0
    if alloc.uplink_offload[i] <= 0.0:
        raise DegenerateDivisor(f"user {i}: delta>0 needs a positive offload share")
    return transmit_energy(user.transmit_power,
                           alloc.delta[i] * dataset_bytes(user, cfg),
                           alloc.uplink_offload[i], base_rate(user, cfg))


def _offload_time(user: UserProfile, alloc: AllocationState, cfg: SystemConfig) -> float:
    i = user.id
    if alloc.delta[i] <= 0.0:
        return 0.0
    if alloc.uplink_offload[i] <= 0.0:
        raise DegenerateDivisor(f"user {i}: delta>0 needs a positive offload share")
    return transmit_time(alloc.delta[i] * dataset_bytes(user, cfg),
                         alloc.uplink_offload[i], base_rate(user, cfg))


def _edge_compute_time(users, alloc: AllocationState, cfg: SystemConfig) -> float:
    offloaded = sum(alloc.delta[u.id] * dataset_bytes(u, cfg) for u in users)
    return offloaded * cfg.cycles_per_byte / cfg.edge_cpu_hz


def edge_time_total(users, alloc: AllocationState, cfg: SystemConfig) -> float:
    """Slowest dataset offload plus the pooled edge training time.

    max_i{delta_i * data_bytes_i * 8 / (uplink_offload_i * R_i)}
        + sum_i{delta_i * data_bytes_i} * cycles_per_byte / edge_cpu_hz
    """
    slowest = max(_offload_time(u, alloc, cfg) for u in users)
    return slowest + _edge_compute_time(users, alloc, cfg)


def edge_time_user(index: int, users, alloc: AllocationState, cfg: SystemConfig) -> float:
    """One user's own offload time plus the shared edge training time.

    The max over users of this quantity equals ``edge_time_total`` exactly.
    """
    user = users[index]
    if user.id != index:
        raise ValueError(f"users[{index}] has id {user.id}; ids must equal positions")
    return _offload_time(user, alloc, cfg) + _edge_compute_time(users, alloc, cfg)


def total_time(users, alloc: AllocationState, model: ModelState, cfg: SystemConfig) -> float:
    """Synchronous round time: slowest of all local paths and the edge path."""
    slowest_local = max(local_time(u, alloc, model, cfg) for u in users)
    return max(slowest_local, edge_time_total(users, alloc, cfg))


def total_energy(user: UserProfile, alloc: AllocationState, model: ModelState,
                 cfg: SystemConfig) -> float:
    """Per-round energy of one user: local training/upload plus offloading."""
    return local_energy(user, alloc, model, cfg) + offload_energy(user, alloc, cfg)
