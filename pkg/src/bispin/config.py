"""Run configuration: flat INI-style sections with strict key checking.

Four sections configure a run; every key has a default reproducing the
measurement configuration, so an absent file or empty section is valid.
Unknown sections or keys are rejected rather than ignored.  All frequencies
are in Hz, fields in tesla, lengths in meters, times in seconds.

    [spin]
    electron_spin = 0.5
    nuclear_spin = 4.5
    hyperfine_hz = 1.4754e9
    g_electron = 2.0003
    gamma_nuclear_hz_per_t = 6.963e6
    bohr_magneton_j_per_t = 9.2740100783e-24
    planck_h_j_s = 6.62607015e-34
    hbar_j_s = 1.054571817e-34

    [geometry]
    center_width_m = 30e-6
    gap_width_m = 17.4e-6
    ground_width_m = 200e-6
    film_thickness_m = 100e-9
    drive_current_a = 1.0
    current_profile = edge          ; or: uniform
    filaments_per_strip = 400

    [implant]
    strip_width_m = 9e-6
    strip_length_m = 1.6e-3
    depth_min_m = 0.0
    depth_max_m = 100e-9
    gap_side = left                 ; or: right
    lateral_center_m = auto         ; or an explicit x coordinate
    n_lateral = 32
    n_depth = 8

    [drive]
    b1_dielectric_t = 1.79e-4
    b1_cpw_scale = 0.0138
    phase_rad = 1.5707963267948966   ; pi/2: equal circular mixture
    tau_pi_s = 100e-9
    g_drive = 2.0003
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass

import numpy as np

from .echomodel import DriveConfig
from .fieldmap import CPWGeometry, ImplantRegion
from .spincore import PhysicalConstants, SpinSystem


class ConfigError(ValueError):
    """Invalid run configuration file."""


# Defaults of the measurement configuration: matched drive amplitudes with
# the CPW scale chosen so the scaled mean gap field equals the homogeneous
# amplitude, both near the maximum of the echo response for a 100 ns pulse.
# The default phase pi/2 is the equal circular mixture, which excites both
# doublet members equally; 0 or pi selects one member.
DEFAULT_B1_DIELECTRIC_T = 1.79e-4
DEFAULT_B1_CPW_SCALE = 0.0138
DEFAULT_PHASE_RAD = 0.5 * np.pi

_SCHEMA = {
    "spin": {"electron_spin", "nuclear_spin", "hyperfine_hz", "g_electron",
             "gamma_nuclear_hz_per_t", "bohr_magneton_j_per_t",
             "planck_h_j_s", "hbar_j_s"},
    "geometry": {"center_width_m", "gap_width_m", "ground_width_m",
                 "film_thickness_m", "drive_current_a", "current_profile",
                 "filaments_per_strip"},
    "implant": {"strip_width_m", "strip_length_m", "depth_min_m", "depth_max_m",
                "gap_side", "lateral_center_m", "n_lateral", "n_depth"},
    "drive": {"b1_dielectric_t", "b1_cpw_scale", "phase_rad", "tau_pi_s",
              "g_drive"},
}


@dataclass(frozen=True)
class RunConfig:
    spin: SpinSystem
    geometry: CPWGeometry
    implant: ImplantRegion
    drive: DriveConfig
    n_lateral: int = 32
    n_depth: int = 8


def default_config() -> RunConfig:
    constants = PhysicalConstants()
    return RunConfig(
        spin=SpinSystem(constants=constants),
        geometry=CPWGeometry(),
        implant=ImplantRegion(),
        drive=DriveConfig(b1_dielectric_t=DEFAULT_B1_DIELECTRIC_T,
                          b1_cpw_scale=DEFAULT_B1_CPW_SCALE,
                          phase_rad=DEFAULT_PHASE_RAD,
                          constants=constants),
    )


class _Section:
    """One parsed section with typed, consumed-on-read access."""

    def __init__(self, name: str, items: dict[str, str]):
        self.name = name
        self.items = items

    def _get(self, key: str):
        return self.items.pop(key, None)

    def floatval(self, key: str, default: float) -> float:
        raw = self._get(key)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"[{self.name}] {key} = {raw!r} is not a number") from None

    def intval(self, key: str, default: int) -> int:
        raw = self._get(key)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"[{self.name}] {key} = {raw!r} is not an integer") from None

    def strval(self, key: str, default: str, choices: tuple[str, ...]) -> str:
        raw = self._get(key)
        if raw is None:
            return default
        if raw not in choices:
            raise ConfigError(f"[{self.name}] {key} = {raw!r}; expected one of {choices}")
        return raw


def load_config(path: str | None) -> RunConfig:
    """Parse a config file (or return pure defaults when path is None)."""
    if path is None:
        return default_config()
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"),
                                       interpolation=None)
    try:
        with open(path, "r") as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc

    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}] "
                              f"(known: {sorted(_SCHEMA)})")
        unknown = set(parser[section]) - _SCHEMA[section]
        if unknown:
            raise ConfigError(f"unknown key(s) in [{section}]: {sorted(unknown)} "
                              f"(known: {sorted(_SCHEMA[section])})")

    def section(name: str) -> _Section:
        items = dict(parser[name]) if parser.has_section(name) else {}
        return _Section(name, items)

    spin_sec = section("spin")
    codata = PhysicalConstants()
    constants = PhysicalConstants(
        bohr_magneton=spin_sec.floatval("bohr_magneton_j_per_t", codata.bohr_magneton),
        planck_h=spin_sec.floatval("planck_h_j_s", codata.planck_h),
        hbar=spin_sec.floatval("hbar_j_s", codata.hbar))
    try:
        spin = SpinSystem(
            electron_spin=spin_sec.floatval("electron_spin", 0.5),
            nuclear_spin=spin_sec.floatval("nuclear_spin", 4.5),
            hyperfine_hz=spin_sec.floatval("hyperfine_hz", 1.4754e9),
            g_electron=spin_sec.floatval("g_electron", 2.0003),
            gamma_nuclear_hz_per_t=spin_sec.floatval("gamma_nuclear_hz_per_t", 6.963e6),
            constants=constants)

        geo_sec = section("geometry")
        geometry = CPWGeometry(
            center_width=geo_sec.floatval("center_width_m", 30e-6),
            gap_width=geo_sec.floatval("gap_width_m", 17.4e-6),
            ground_width=geo_sec.floatval("ground_width_m", 200e-6),
            film_thickness=geo_sec.floatval("film_thickness_m", 100e-9),
            drive_current_total=geo_sec.floatval("drive_current_a", 1.0),
            current_profile=geo_sec.strval("current_profile", "edge",
                                           ("edge", "uniform")),
            filaments_per_strip=geo_sec.intval("filaments_per_strip", 400))

        imp_sec = section("implant")
        lateral_raw = imp_sec.items.pop("lateral_center_m", "auto")
        if lateral_raw == "auto":
            lateral_center = None
        else:
            try:
                lateral_center = float(lateral_raw)
            except ValueError:
                raise ConfigError(f"[implant] lateral_center_m = {lateral_raw!r} "
                                  "must be a number or 'auto'") from None
        n_lateral = imp_sec.intval("n_lateral", 32)
        n_depth = imp_sec.intval("n_depth", 8)
        implant = ImplantRegion(
            strip_width=imp_sec.floatval("strip_width_m", 9e-6),
            strip_length=imp_sec.floatval("strip_length_m", 1.6e-3),
            depth_min=imp_sec.floatval("depth_min_m", 0.0),
            depth_max=imp_sec.floatval("depth_max_m", 100e-9),
            gap_side=imp_sec.strval("gap_side", "left", ("left", "right")),
            lateral_center=lateral_center)

        drive_sec = section("drive")
        drive = DriveConfig(
            b1_dielectric_t=drive_sec.floatval("b1_dielectric_t", DEFAULT_B1_DIELECTRIC_T),
            b1_cpw_scale=drive_sec.floatval("b1_cpw_scale", DEFAULT_B1_CPW_SCALE),
            phase_rad=drive_sec.floatval("phase_rad", DEFAULT_PHASE_RAD),
            tau_pi_s=drive_sec.floatval("tau_pi_s", 100e-9),
            g_drive=drive_sec.floatval("g_drive", spin.g_electron),
            constants=constants)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"invalid configuration value: {exc}") from exc

    return RunConfig(spin=spin, geometry=geometry, implant=implant, drive=drive,
                     n_lateral=n_lateral, n_depth=n_depth)
