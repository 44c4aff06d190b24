"""Network geometry and channel realizations for a two-tier HetNet.

One macro BS sits at the origin; the pico BSs are spread evenly on a ring.
Users are dropped area-uniformly over the macro disk and every (BS, user)
link gets an independent Rayleigh power gain on top of distance path loss.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MIN_DISTANCE_M = 1.0


class ConfigError(ValueError):
    """Raised when a scenario or experiment configuration is invalid.

    ``field`` names the offending key so callers can report it.
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message
        self.errors = [(field, message)]


def dbm_to_watt(dbm):
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)


@dataclass(frozen=True)
class ScenarioConfig:
    """Physical parameters of one HetNet deployment.

    Defaults are the reference simulation setup: 10 MHz, -127 dBm/Hz noise,
    46/30 dBm macro/pico power, 100 kbit/s minimum rate, exponent 3.5.
    """

    num_users: int = 40
    num_bs: int = 5
    macro_radius: float = 167.0
    pico_ring_radius: float = 120.0
    bandwidth_hz: float = 1e7
    noise_psd_dbm_hz: float = -127.0
    mbs_power_dbm: float = 46.0
    pbs_power_dbm: float = 30.0
    r_min_bps: float = 1e5
    pathloss_exponent: float = 3.5
    seed: int = 0

    def __post_init__(self):
        if int(self.num_bs) != self.num_bs or self.num_bs < 2:
            raise ConfigError("num_bs", f"must be an integer >= 2, got {self.num_bs}")
        if int(self.num_users) != self.num_users or self.num_users < self.num_bs:
            raise ConfigError(
                "num_users",
                f"must be an integer >= num_bs ({self.num_bs}), got {self.num_users}",
            )
        for name in ("macro_radius", "pico_ring_radius", "bandwidth_hz", "r_min_bps",
                     "pathloss_exponent"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ConfigError(name, f"must be strictly positive, got {value}")
        for name in ("noise_psd_dbm_hz", "mbs_power_dbm", "pbs_power_dbm"):
            if not np.isfinite(getattr(self, name)):
                raise ConfigError(name, "must be finite")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ConfigError("seed", f"must be an unsigned 64-bit integer, got {self.seed}")

    @property
    def powers_watt(self) -> np.ndarray:
        """Transmit power per BS in watts, index 0 being the macro BS."""
        p = np.full(self.num_bs, float(dbm_to_watt(self.pbs_power_dbm)))
        p[0] = dbm_to_watt(self.mbs_power_dbm)
        return p

    @property
    def noise_psd_watt_hz(self) -> float:
        return float(dbm_to_watt(self.noise_psd_dbm_hz))


@dataclass(frozen=True)
class Topology:
    bs_positions: np.ndarray  # (B, 2), metres; row 0 is the macro BS
    user_positions: np.ndarray  # (N, 2), metres

    @property
    def num_bs(self) -> int:
        return self.bs_positions.shape[0]

    @property
    def num_users(self) -> int:
        return self.user_positions.shape[0]

    def distances(self) -> np.ndarray:
        """B x N BS-user distances, clamped below at ``MIN_DISTANCE_M``."""
        diff = self.bs_positions[:, None, :] - self.user_positions[None, :, :]
        return np.maximum(np.hypot(diff[..., 0], diff[..., 1]), MIN_DISTANCE_M)


@dataclass(frozen=True)
class Scenario:
    """Everything the association algorithms need for one drop.

    Holds linear-unit copies of the config quantities next to the sampled
    ``gains`` (B x N channel power gains).
    """

    config: ScenarioConfig
    topology: Topology
    gains: np.ndarray
    powers: np.ndarray = field(init=False)
    noise_psd: float = field(init=False)

    def __post_init__(self):
        g = np.asarray(self.gains, dtype=float)
        if g.shape != (self.config.num_bs, self.config.num_users):
            raise ValueError(f"gains shape {g.shape} does not match config")
        if not (np.all(np.isfinite(g)) and np.all(g > 0)):
            raise ValueError("gains must be finite and strictly positive")
        object.__setattr__(self, "gains", g)
        object.__setattr__(self, "powers", self.config.powers_watt)
        object.__setattr__(self, "noise_psd", self.config.noise_psd_watt_hz)

    @property
    def num_bs(self) -> int:
        return self.config.num_bs

    @property
    def num_users(self) -> int:
        return self.config.num_users

    @property
    def bandwidth(self) -> float:
        return self.config.bandwidth_hz

    @property
    def r_min(self) -> float:
        return self.config.r_min_bps

    @classmethod
    def from_gains(cls, gains, config: ScenarioConfig | None = None, **overrides) -> "Scenario":
        """Wrap an explicit gain matrix, e.g. a hand-crafted test instance.

        The topology is a placeholder (all users at the origin) since only the
        gains enter the radio model.
        """
        gains = np.asarray(gains, dtype=float)
        b, n = gains.shape
        if config is None:
            config = ScenarioConfig(num_users=n, num_bs=b, **overrides)
        topo = Topology(ring_positions(b, config.pico_ring_radius), np.zeros((n, 2)))
        return cls(config, topo, gains)


def drop_rng(seed: int, drop: int) -> np.random.Generator:
    """Independent PCG64 stream for drop ``drop`` of a run seeded with ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(drop,))))


def ring_positions(num_bs: int, ring_radius: float) -> np.ndarray:
    angles = 2.0 * np.pi * np.arange(num_bs - 1) / (num_bs - 1)
    pos = np.zeros((num_bs, 2))
    pos[1:, 0] = ring_radius * np.cos(angles)
    pos[1:, 1] = ring_radius * np.sin(angles)
    return pos


def build_topology(config: ScenarioConfig, rng: np.random.Generator) -> Topology:
    """Place the BSs deterministically and drop users uniformly over the macro disk."""
    radius = config.macro_radius * np.sqrt(rng.random(config.num_users))
    theta = 2.0 * np.pi * rng.random(config.num_users)
    users = np.column_stack([radius * np.cos(theta), radius * np.sin(theta)])
    return Topology(ring_positions(config.num_bs, config.pico_ring_radius), users)


def sample_gains(topology: Topology, pathloss_exponent: float,
                 rng: np.random.Generator) -> np.ndarray:
    """Rayleigh-faded power gains ``|h|^2`` with ``h ~ CN(0, d^-exponent)``."""
    mean = topology.distances() ** (-pathloss_exponent)
    h = (rng.standard_normal(mean.shape) + 1j * rng.standard_normal(mean.shape)) * np.sqrt(mean / 2.0)
    return np.abs(h) ** 2


def make_scenario(config: ScenarioConfig, drop: int = 0) -> Scenario:
    """Topology and gains for one drop, reproducible from ``(config.seed, drop)``."""
    rng = drop_rng(config.seed, drop)
    topo = build_topology(config, rng)
    return Scenario(config, topo, sample_gains(topo, config.pathloss_exponent, rng))
