"""Closed-form time and energy model for partial computation offloading.

A task of ``data_bits`` input bits is split by an offloading ratio
``ratio`` in [0, 1]: that fraction of the bits is transmitted uplink to
the edge server, the rest is executed on the device CPU. The edge side
is treated as free (unconstrained server), so the cost of a task is the
local CPU energy plus the uplink transmission energy. Transmit power is
the Shannon inversion of the link's spectral efficiency, which makes
every quantity here an explicit closed form of the inputs.

Total energy is affine in the offloading ratio; ``affine_coefficients``
exposes that decomposition so optimizers and oracles can reason about
corner optima without re-evaluating the full model.
"""

from __future__ import annotations

from dataclasses import dataclass


class InfeasibleLinkError(ValueError):
    """Raised when bits must be transmitted over a zero-rate link."""


def _check_ratio(ratio: float) -> None:
    if not 0.0 <= ratio <= 1.0:
        raise ValueError(f"offloading ratio must be in [0, 1], got {ratio}")


def _check_se(se: float) -> None:
    if se < 0.0:
        raise ValueError(f"spectral efficiency must be >= 0, got {se}")


@dataclass(frozen=True)
class TaskSpec:
    """One computational task: input size in bits and CPU cycles per bit."""

    data_bits: float
    cycles_per_bit: float

    def __post_init__(self) -> None:
        if self.data_bits <= 0:
            raise ValueError(f"data_bits must be > 0, got {self.data_bits}")
        if self.cycles_per_bit <= 0:
            raise ValueError(f"cycles_per_bit must be > 0, got {self.cycles_per_bit}")


@dataclass(frozen=True)
class DeviceSpec:
    """One mobile device and its uplink.

    cpu_hz        CPU clock rate in Hz
    energy_coeff  chip energy coefficient in J*s^2/cycle
    bandwidth_hz  uplink bandwidth allocated to this device, Hz
    noise_var     additive white Gaussian noise variance at the receiver, W
    channel_gain  flat channel gain in (0, 1]; near 1 for low-fading paths
    """

    cpu_hz: float
    energy_coeff: float
    bandwidth_hz: float
    noise_var: float
    channel_gain: float = 1.0

    def __post_init__(self) -> None:
        for name in ("cpu_hz", "energy_coeff", "bandwidth_hz", "noise_var", "channel_gain"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.channel_gain > 1.0:
            raise ValueError(f"channel_gain must be <= 1, got {self.channel_gain}")


@dataclass(frozen=True)
class EnergyBreakdown:
    """Per-task time and energy components, all nonnegative.

    t_total = t_local + t_off and e_total = e_local + e_off by construction.
    """

    t_local: float
    t_off: float
    t_total: float
    e_local: float
    e_off: float
    e_total: float


def local_time(task: TaskSpec, device: DeviceSpec, ratio: float) -> float:
    """Seconds to execute the non-offloaded fraction on the device CPU."""
    _check_ratio(ratio)
    return task.cycles_per_bit * (1.0 - ratio) * task.data_bits / device.cpu_hz


def local_energy(task: TaskSpec, device: DeviceSpec, ratio: float) -> float:
    """Joules consumed by local execution of the non-offloaded fraction."""
    _check_ratio(ratio)
    return (
        device.energy_coeff
        * task.cycles_per_bit
        * device.cpu_hz**2
        * (1.0 - ratio)
        * task.data_bits
    )


def tx_power(se: float, device: DeviceSpec) -> float:
    """Transmit power (W) needed to sustain spectral efficiency ``se``.

    Inverts rate = W * log2(1 + p*h/sigma^2) at the target efficiency:
    p = (2^se - 1) * sigma^2 / h. Zero efficiency needs zero power.
    """
    _check_se(se)
    return (2.0**se - 1.0) * device.noise_var / device.channel_gain


def uplink_rate(device: DeviceSpec, se: float) -> float:
    """Uplink rate in bits/s: bandwidth times spectral efficiency."""
    _check_se(se)
    return device.bandwidth_hz * se


def offload_time(task: TaskSpec, device: DeviceSpec, se: float, ratio: float) -> float:
    """Seconds to transmit the offloaded fraction of the task's bits.

    A ratio of 0 transmits nothing and costs 0 s regardless of the link;
    a positive ratio over a zero-efficiency link is infeasible.
    """
    _check_ratio(ratio)
    _check_se(se)
    if ratio == 0.0:
        return 0.0
    if se == 0.0:
        raise InfeasibleLinkError("cannot offload over a link with zero spectral efficiency")
    return ratio * task.data_bits / (device.bandwidth_hz * se)


def offload_energy(task: TaskSpec, device: DeviceSpec, se: float, ratio: float) -> float:
    """Joules spent transmitting the offloaded fraction: power times airtime."""
    return tx_power(se, device) * offload_time(task, device, se, ratio)


def total_time(task: TaskSpec, device: DeviceSpec, se: float, ratio: float) -> float:
    """Local execution time plus transmission time (no overlap assumed)."""
    return local_time(task, device, ratio) + offload_time(task, device, se, ratio)


def total_energy(task: TaskSpec, device: DeviceSpec, se: float, ratio: float) -> EnergyBreakdown:
    """Full time/energy breakdown of a task at the given offloading ratio."""
    t_loc = local_time(task, device, ratio)
    t_off = offload_time(task, device, se, ratio)
    e_loc = local_energy(task, device, ratio)
    e_off = offload_energy(task, device, se, ratio)
    return EnergyBreakdown(
        t_local=t_loc,
        t_off=t_off,
        t_total=t_loc + t_off,
        e_local=e_loc,
        e_off=e_off,
        e_total=e_loc + e_off,
    )


def affine_coefficients(task: TaskSpec, device: DeviceSpec, se: float) -> tuple[float, float]:
    """Coefficients (full_offload_j, full_local_j) of the energy line.

    Total energy at ratio l equals full_offload_j * l + full_local_j * (1 - l)
    for every l in [0, 1]: the first coefficient is the energy of shipping
    the whole task uplink, the second that of computing it all locally.
    """
    _check_se(se)
    if se == 0.0:
        raise InfeasibleLinkError("affine decomposition undefined for a zero-rate link")
    full_offload = (
        (2.0**se - 1.0)
        * (device.noise_var / device.channel_gain)
        * task.data_bits
        / (device.bandwidth_hz * se)
    )
    full_local = device.energy_coeff * task.cycles_per_bit * device.cpu_hz**2 * task.data_bits
    return full_offload, full_local
