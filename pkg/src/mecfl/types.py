"""Core value types: system constants, user profiles, allocations, models, metrics.

All types are frozen dataclasses and every array field is made read-only at
construction, so instances are immutable value objects that can be shared
across workers without synchronization. Invalid states cannot be built:
constructors validate their invariants and raise :class:`ValidationError`
(or a subclass) on violation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OutOfRange, SumExceedsOne, ValidationError

# Absolute slack used when comparing allocations against box/simplex bounds.
CONSTRAINT_ATOL = 1e-9


def _require_positive(owner: str, **named: float) -> None:
    for name, value in named.items():
        if not math.isfinite(value) or value <= 0:
            raise ValidationError(f"{owner}: {name} must be finite and > 0, got {value!r}")


def _frozen_array(obj, name: str, value, dtype=float) -> np.ndarray:
    arr = np.array(value, dtype=dtype)
    arr.flags.writeable = False
    object.__setattr__(obj, name, arr)
    return arr


@dataclass(frozen=True)
class SystemConfig:
    """Global constants shared by every user and the edge server.

    Values without an obviously physical default (noise power, cycles per
    byte, chip capacitance, score weights) are documented assumptions and
    can all be overridden through the config file or keyword arguments.
    """

    bandwidth_hz: float = 20e6           # total uplink bandwidth of the access point
    noise_power: float = 1e-9            # additive white Gaussian noise power (W)
    edge_cpu_hz: float = 16e9            # edge server CPU rate (cycles/s)
    cycles_per_byte: float = 100.0       # CPU cycles needed to train on one byte
    chip_capacitance: float = 1e-28      # effective switched capacitance of user CPUs
    loss_weight: float = 1.0             # scales test loss in the reported weighted score
    time_weight: float = 1.0             # scales round time in the reported weighted score
    convergence_tol: float = 1e-3        # threshold for both per-round stop tests
    multiplier_increment: float = 0.05   # step added to the offload multiplier on an energy violation
    bytes_per_sample: float = 784.0      # linear dataset-size model: bytes per sample
    bytes_per_weight_element: float = 8.0  # linear model-size model: bytes per weight entry
    local_epochs: int = 5
    learning_rate: float = 0.05
    batch_size: int = 32
    rng_seed: int = 0

    def __post_init__(self):
        _require_positive(
            "SystemConfig",
            bandwidth_hz=self.bandwidth_hz,
            noise_power=self.noise_power,
            edge_cpu_hz=self.edge_cpu_hz,
            cycles_per_byte=self.cycles_per_byte,
            chip_capacitance=self.chip_capacitance,
            multiplier_increment=self.multiplier_increment,
            bytes_per_sample=self.bytes_per_sample,
            bytes_per_weight_element=self.bytes_per_weight_element,
            learning_rate=self.learning_rate,
        )
        # +inf is a legal tolerance (stop after the first comparable round)
        if not self.convergence_tol > 0:
            raise ValidationError("SystemConfig: convergence_tol must be > 0")
        if self.loss_weight < 0 or self.time_weight < 0:
            raise ValidationError("SystemConfig: score weights must be >= 0")
        if self.local_epochs < 0:
            raise ValidationError("SystemConfig: local_epochs must be >= 0")
        if self.batch_size < 1:
            raise ValidationError("SystemConfig: batch_size must be >= 1")


@dataclass(frozen=True)
class UserProfile:
    """Physical state of one mobile user; fixed for a whole experiment."""

    id: int
    transmit_power: float   # W
    channel_gain: float     # dimensionless uplink channel gain
    cpu_hz: float           # CPU resources available for local training (cycles/s)
    energy_budget: float    # J the user may spend in one communication round
    dataset_size: int       # samples held locally

    def __post_init__(self):
        if self.id < 0:
            raise ValidationError(f"UserProfile: id must be >= 0, got {self.id}")
        _require_positive(
            f"UserProfile[{self.id}]",
            transmit_power=self.transmit_power,
            channel_gain=self.channel_gain,
            cpu_hz=self.cpu_hz,
            energy_budget=self.energy_budget,
        )
        if self.dataset_size < 1:
            raise ValidationError(f"UserProfile[{self.id}]: dataset_size must be >= 1")


@dataclass(frozen=True)
class AllocationState:
    """Decision variables of one round, one entry per user.

    ``delta`` is the offloaded dataset fraction, ``gamma`` the local CPU
    fraction, ``uplink_offload``/``uplink_weight`` the bandwidth shares for
    dataset offloading and weight upload, and the two multiplier vectors
    weight the proportional bandwidth allocation.
    """

    delta: np.ndarray
    gamma: np.ndarray
    uplink_offload: np.ndarray
    uplink_weight: np.ndarray
    lambda_offload: np.ndarray
    lambda_local: np.ndarray

    _FIELDS = ("delta", "gamma", "uplink_offload", "uplink_weight",
               "lambda_offload", "lambda_local")

    def __post_init__(self):
        arrays = [_frozen_array(self, name, getattr(self, name)) for name in self._FIELDS]
        n = arrays[0].size
        for name, arr in zip(self._FIELDS, arrays):
            if arr.ndim != 1 or arr.size != n:
                raise ValidationError(f"AllocationState: {name} must be 1-d of length {n}")
        if n == 0:
            raise ValidationError("AllocationState: at least one user required")
        validate_allocation(self, n)

    @property
    def n_users(self) -> int:
        return self.delta.size

    @classmethod
    def uniform(cls, n_users: int, delta=0.0, gamma=1.0, multiplier=0.5) -> "AllocationState":
        """Allocation with equal bandwidth shares and constant per-user values."""
        share = np.full(n_users, 1.0 / n_users)
        return cls(
            delta=np.full(n_users, float(delta)),
            gamma=np.full(n_users, float(gamma)),
            uplink_offload=share,
            uplink_weight=share.copy(),
            lambda_offload=np.full(n_users, float(multiplier)),
            lambda_local=np.full(n_users, 1.0 - float(multiplier)),
        )


def validate_allocation(alloc: AllocationState, n_users: int) -> AllocationState:
    """Check an allocation against its box and simplex constraints.

    Returns the input unchanged when every invariant holds; raises
    :class:`OutOfRange` or :class:`SumExceedsOne` otherwise. Comparisons
    use an absolute slack of ``CONSTRAINT_ATOL``.
    """
    for name in AllocationState._FIELDS:
        arr = getattr(alloc, name)
        if arr.size != n_users:
            raise ValidationError(
                f"AllocationState: {name} has length {arr.size}, expected {n_users}"
            )
        if not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise ValidationError(f"AllocationState: {name}[{bad}] is not finite")
    for name in ("delta", "gamma", "uplink_offload", "uplink_weight"):
        arr = getattr(alloc, name)
        bad = np.flatnonzero((arr < -CONSTRAINT_ATOL) | (arr > 1.0 + CONSTRAINT_ATOL))
        if bad.size:
            i = int(bad[0])
            raise OutOfRange(i, name, float(arr[i]))
    for name in ("lambda_offload", "lambda_local"):
        arr = getattr(alloc, name)
        bad = np.flatnonzero(arr < -CONSTRAINT_ATOL)
        if bad.size:
            i = int(bad[0])
            raise OutOfRange(i, name, float(arr[i]))
    for name in ("uplink_offload", "uplink_weight"):
        total = float(getattr(alloc, name).sum())
        if total > 1.0 + CONSTRAINT_ATOL:
            raise SumExceedsOne(name, total - 1.0)
    return alloc


@dataclass(frozen=True)
class ModelState:
    """Model weights plus the dataset-size bookkeeping used for aggregation.

    ``local_weights`` has one row per user; ``local_trainset_sizes`` counts
    the samples each user actually trained on this round, while
    ``edge_trainset_size`` counts the pooled offloaded samples trained at
    the edge.
    """

    local_weights: np.ndarray       # (n_users, dim)
    edge_weights: np.ndarray        # (dim,)
    global_weights: np.ndarray      # (dim,)
    dataset_sizes: np.ndarray       # full local dataset sizes, samples
    local_trainset_sizes: np.ndarray
    edge_trainset_size: int

    def __post_init__(self):
        local = _frozen_array(self, "local_weights", self.local_weights)
        edge = _frozen_array(self, "edge_weights", self.edge_weights)
        glob = _frozen_array(self, "global_weights", self.global_weights)
        sizes = _frozen_array(self, "dataset_sizes", self.dataset_sizes, dtype=np.int64)
        kept = _frozen_array(self, "local_trainset_sizes", self.local_trainset_sizes, dtype=np.int64)
        if local.ndim != 2:
            raise ValidationError("ModelState: local_weights must be 2-d (n_users, dim)")
        n_users, dim = local.shape
        if edge.shape != (dim,) or glob.shape != (dim,):
            raise ValidationError("ModelState: all weight vectors must share one dimension")
        if sizes.shape != (n_users,) or kept.shape != (n_users,):
            raise ValidationError("ModelState: size bookkeeping must have one entry per user")
        if np.any(sizes < 1):
            raise ValidationError("ModelState: dataset sizes must be >= 1")
        if np.any(kept < 0) or np.any(kept > sizes):
            raise ValidationError("ModelState: local trainset sizes must lie in [0, dataset size]")
        if self.edge_trainset_size < 0:
            raise ValidationError("ModelState: edge_trainset_size must be >= 0")

    @property
    def n_users(self) -> int:
        return self.local_weights.shape[0]

    @property
    def dim(self) -> int:
        return self.global_weights.size

    @classmethod
    def initial(cls, n_users: int, dim: int, dataset_sizes) -> "ModelState":
        """All-zero weights; every sample still counted as local."""
        sizes = np.asarray(dataset_sizes, dtype=np.int64)
        return cls(
            local_weights=np.zeros((n_users, dim)),
            edge_weights=np.zeros(dim),
            global_weights=np.zeros(dim),
            dataset_sizes=sizes,
            local_trainset_sizes=sizes.copy(),
            edge_trainset_size=0,
        )


@dataclass(frozen=True)
class RoundMetrics:
    """Per-round outputs: times, energies, losses, and the weighted score."""

    t_local: np.ndarray   # seconds, per user
    t_edge: float
    t_total: float
    e_total: np.ndarray   # joules, per user
    train_loss: float
    test_loss: float
    weighted_score: float

    def __post_init__(self):
        t_local = _frozen_array(self, "t_local", self.t_local)
        e_total = _frozen_array(self, "e_total", self.e_total)
        if np.any(t_local < 0) or np.any(e_total < 0):
            raise ValidationError("RoundMetrics: times and energies must be >= 0")
        # numpy scalars are coerced so downstream serialization sees plain floats
        for name in ("t_edge", "t_total", "train_loss", "test_loss", "weighted_score"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.t_edge < 0 or self.t_total < 0:
            raise ValidationError("RoundMetrics: times must be >= 0")


def project_unit_interval(x: float) -> float:
    """Clamp a finite real onto [0, 1]."""
    x = float(x)
    if not math.isfinite(x):
        raise ValidationError(f"project_unit_interval: input must be finite, got {x!r}")
    return min(max(x, 0.0), 1.0)
