"""Scenario parameters and their linear-power view."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .errors import ConfigError


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to draw one network drop.

    Distances are in meters, powers in dBm, channel constants in dB.
    """

    cell_radius_m: float = 500.0
    num_cellular: int = 4
    num_d2d: int = 8
    d2d_max_dist_m: float = 20.0
    bs_power_dbm: float = 46.0
    d2d_power_dbm: float = 23.0
    noise_dbm: float = -114.0
    pathloss_exp: float = 3.5
    pathloss_const_db: float = -30.0
    shadowing_sigma_db: float = 8.0
    fading_enabled: bool = False
    min_dist_m: float = 1.0
    seed: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        checks = [
            ("cell_radius_m", self.cell_radius_m > 0, "cell_radius_m > 0"),
            ("d2d_max_dist_m", self.d2d_max_dist_m > 0, "d2d_max_dist_m > 0"),
            ("num_cellular", self.num_cellular >= 0, "num_cellular >= 0"),
            ("num_d2d", self.num_d2d >= 0, "num_d2d >= 0"),
            (
                "num_cellular",
                self.num_d2d == 0 or self.num_cellular >= 1,
                "num_cellular >= 1 when num_d2d >= 1",
            ),
            ("pathloss_exp", self.pathloss_exp > 0, "pathloss_exp > 0"),
            ("shadowing_sigma_db", self.shadowing_sigma_db >= 0, "shadowing_sigma_db >= 0"),
            ("min_dist_m", self.min_dist_m > 0, "min_dist_m > 0"),
            ("seed", self.seed >= 0, "seed >= 0"),
        ]
        for name, ok, rule in checks:
            if not ok:
                raise ConfigError(f"{name}={getattr(self, name)!r} violates {rule}")

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def field_types(cls) -> dict:
        return {f.name: f.type for f in dataclasses.fields(cls)}


@dataclass(frozen=True)
class PowerProfile:
    bs_power_w: float
    d2d_power_w: float
    noise_w: float

    def __post_init__(self):
        for name in ("bs_power_w", "d2d_power_w", "noise_w"):
            value = getattr(self, name)
            if not value > 0:
                raise ConfigError(f"{name}={value!r} violates {name} > 0")

    @classmethod
    def from_config(cls, config: ScenarioConfig) -> "PowerProfile":
        return cls(
            bs_power_w=dbm_to_watt(config.bs_power_dbm),
            d2d_power_w=dbm_to_watt(config.d2d_power_dbm),
            noise_w=dbm_to_watt(config.noise_dbm),
        )
