"""Scenario files: flat TOML key/value pairs with units in the key names.

Every key is optional except ``seed`` (which may also come from the command
line). Defaults reproduce the synchronized-source swapping experiment, so
the built-in ``paper`` preset is just the defaults.

Example::

    seed = 42
    source1_visibility = 0.9
    filter_fwhm_nm = 2.8
    pump2_fwhm_fs = 70.0
"""

from __future__ import annotations

import dataclasses
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .chsh import ChshSettings
from .laser_sync import CavityPair, KerrCoupling, PulseShape
from .swapping import BsmSpec, SourceSpec
from .wavepacket import FilterSpec

PRESETS = ("paper",)


class ScenarioError(ValueError):
    """Invalid scenario; ``field`` names the offending key when known."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


@dataclass(frozen=True)
class Scenario:
    seed: Optional[int] = None
    source1_visibility: float = 0.9
    source2_visibility: float = 0.9
    filter_center_nm: float = 788.0
    filter_fwhm_nm: float = 2.8
    pump1_shape: str = "gaussian"
    pump1_fwhm_fs: float = 60.0
    pump2_shape: str = "gaussian"
    pump2_fwhm_fs: float = 70.0
    repetition_rate_mhz: float = 81.0
    sync_detuning_fs: float = 0.0
    sync_kappa_fs: float = 25.0
    sync_width_fs: float = 50.0
    sync_noise_rms_fs: float = 1.0
    sync_rounds: int = 100_000
    jitter_override_fs: Optional[float] = None
    overlap_override: Optional[float] = None
    theta1_deg: float = -22.5
    theta1p_deg: float = -67.5
    theta4_deg: float = 0.0
    theta4p_deg: float = 45.0
    photon1_basis_deg: float = 45.0
    theta4_step_deg: float = 5.0
    events_per_setting: int = 300
    accidental_fraction: float = 0.0
    output_dir: str = "out"

    # Module-level views of the parameters.
    @property
    def sources(self) -> SourceSpec:
        return SourceSpec(self.source1_visibility, self.source2_visibility)

    @property
    def filter(self) -> FilterSpec:
        return FilterSpec(self.filter_center_nm, self.filter_fwhm_nm)

    @property
    def pump1(self) -> PulseShape:
        return PulseShape(self.pump1_shape, self.pump1_fwhm_fs)

    @property
    def pump2(self) -> PulseShape:
        return PulseShape(self.pump2_shape, self.pump2_fwhm_fs)

    @property
    def cavities(self) -> CavityPair:
        return CavityPair(self.repetition_rate_mhz, self.sync_detuning_fs)

    @property
    def coupling(self) -> KerrCoupling:
        return KerrCoupling(self.sync_kappa_fs, self.sync_width_fs)

    @property
    def chsh_settings(self) -> ChshSettings:
        return ChshSettings(self.theta1_deg, self.theta1p_deg, self.theta4_deg, self.theta4p_deg)

    def theta4_grid(self) -> list[float]:
        n = int(round(180.0 / self.theta4_step_deg))
        return [i * self.theta4_step_deg for i in range(n + 1)]

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


_FIELDS = {f.name: f for f in dataclasses.fields(Scenario)}
_FLOAT_FIELDS = {n for n, f in _FIELDS.items() if f.type in ("float", "Optional[float]")}
_INT_FIELDS = {"seed", "sync_rounds", "events_per_setting"}
_STR_FIELDS = {"pump1_shape", "pump2_shape", "output_dir"}


def _coerce(name: str, value: Any) -> Any:
    if name in _INT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ScenarioError(f"expected an integer, got {value!r}", name)
        return value
    if name in _FLOAT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ScenarioError(f"expected a number, got {value!r}", name)
        value = float(value)
        if not math.isfinite(value):
            raise ScenarioError("must be finite", name)
        return value
    if name in _STR_FIELDS and not isinstance(value, str):
        raise ScenarioError(f"expected a string, got {value!r}", name)
    return value


# (field, predicate, message) checks applied after type coercion.
_RULES = [
    ("seed", lambda v: v is not None, "required (set it in the file or pass --seed)"),
    ("seed", lambda v: v is None or 0 <= v < 2**64, "must be an unsigned 64-bit integer"),
    ("source1_visibility", lambda v: 0 <= v <= 1, "must lie in [0, 1]"),
    ("source2_visibility", lambda v: 0 <= v <= 1, "must lie in [0, 1]"),
    ("filter_center_nm", lambda v: v > 0, "must be positive"),
    ("filter_fwhm_nm", lambda v: v > 0, "must be positive"),
    ("pump1_shape", lambda v: v in ("gaussian", "sech2"), "must be 'gaussian' or 'sech2'"),
    ("pump2_shape", lambda v: v in ("gaussian", "sech2"), "must be 'gaussian' or 'sech2'"),
    ("pump1_fwhm_fs", lambda v: v > 0, "must be positive"),
    ("pump2_fwhm_fs", lambda v: v > 0, "must be positive"),
    ("repetition_rate_mhz", lambda v: v > 0, "must be positive"),
    ("sync_kappa_fs", lambda v: v >= 0, "must be non-negative"),
    ("sync_width_fs", lambda v: v > 0, "must be positive"),
    ("sync_noise_rms_fs", lambda v: v >= 0, "must be non-negative"),
    ("sync_rounds", lambda v: v >= 100, "must be at least 100"),
    ("jitter_override_fs", lambda v: v is None or v >= 0, "must be non-negative"),
    ("overlap_override", lambda v: v is None or 0 <= v <= 1, "must lie in [0, 1]"),
    ("theta4_step_deg", lambda v: 0 < v <= 30, "must lie in (0, 30]"),
    ("events_per_setting", lambda v: v >= 10, "must be at least 10"),
    ("accidental_fraction", lambda v: 0 <= v <= 1, "must lie in [0, 1]"),
]


def validate(s: Scenario) -> Scenario:
    for name, ok, msg in _RULES:
        if not ok(getattr(s, name)):
            raise ScenarioError(msg, name)
    try:
        s.filter  # narrow-band check lives on FilterSpec
    except ValueError as exc:
        raise ScenarioError(str(exc), "filter_fwhm_nm") from None
    return s


def scenario_from_dict(data: dict[str, Any], overrides: dict[str, Any] | None = None) -> Scenario:
    merged = dict(data)
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    unknown = sorted(set(merged) - set(_FIELDS))
    if unknown:
        raise ScenarioError(f"unknown key(s): {', '.join(unknown)}", unknown[0])
    kwargs = {k: _coerce(k, v) for k, v in merged.items()}
    return validate(Scenario(**kwargs))


def load_scenario(path: str | Path, overrides: dict[str, Any] | None = None) -> Scenario:
    """Read and validate a scenario file, or the name of a built-in preset.

    ``overrides`` (e.g. the command-line ``--seed``) replace file values;
    ``None`` entries are ignored.

    Raises:
        ScenarioError: on TOML syntax errors (message carries line and column)
            or on invalid / unknown fields (``field`` is set).
    """
    if str(path) in PRESETS:
        return scenario_from_dict({}, overrides)
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {p}: {exc.strerror}") from None
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"parse error in {p}: {exc}") from None
    nested = [k for k, v in data.items() if isinstance(v, dict)]
    if nested:
        raise ScenarioError("scenario files are flat; tables are not allowed", nested[0])
    return scenario_from_dict(data, overrides)
