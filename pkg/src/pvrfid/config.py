"""Flat dotted-key configuration: parsing, defaults, and model builders.

The format is deliberately dumb: one `key = value` per line, `#` comments,
no sections or nesting.  Units ride on the key names (`_uA`, `_V`, `_F`,
`_dbm`, ...) so a value can never be mistaken for a different scale, and a
file diff always shows exactly which quantity moved.
"""

from __future__ import annotations

from importlib import resources

from .ic import ICProfile, MeasurementSchedule
from .link import LinkConfig
from .pv import DiodeModel, fit_single_diode
from .simulator import LightProfile, Scenario
from .sizing import SizingRequest
from .storage import CapacitorModel


class ConfigError(Exception):
    """Unparseable line, unknown key, or a bad value."""


# key -> kind; kinds: float, int, float_list
SCHEMA = {
    "pv.jsc_mA_cm2": "float",
    "pv.voc_V": "float",
    "pv.ff": "float",
    "pv.area_cm2": "float",
    "pv.n_series": "int",
    "pv.iv_points": "int",
    "pv.harvest_suns": "float_list",
    "ic.i_sleep_uA": "float",
    "ic.i_ready_uA": "float",
    "ic.i_measure_uA": "float",
    "ic.t_measure_ms": "float",
    "ic.v_threshold_V": "float",
    "ic.v_max_V": "float",
    "ic.sens_passive_dbm": "float",
    "ic.sens_assisted_dbm": "float",
    "ic.demand_rates_per_hour": "float_list",
    "cap.capacitance_F": "float",
    "cap.v_max_V": "float",
    "cap.leak_R_ohm": "float",
    "cap.leak_uA": "float",
    "link.eirp_dbm": "float",
    "link.tag_gain_dbi": "float",
    "link.reader_gain_dbi": "float",
    "link.tau": "float",
    "link.pol_loss_db": "float",
    "link.mod_loss_db": "float",
    "link.reader_sens_dbm": "float",
    "link.freq_hz": "float",
    "sim.duration_s": "float",
    "sim.dt_s": "float",
    "sim.initial_V": "float",
    "sim.light_suns": "float",
    "sim.light_on_s": "float",
    "sim.rate_per_hour": "float",
    "sim.photocurrent_scale": "float",
    "sizing.target": "float",
    "sizing.sweep_caps_F": "float_list",
    "sizing.sweep_leaks_uA": "float_list",
    "sizing.area_grid_cm2": "float_list",
    "sizing.cap_grid_F": "float_list",
    "sizing.leak_uA": "float",
    "sizing.rate_per_hour": "float",
    "sizing.light_suns": "float",
    "sizing.light_hours": "float",
    "sizing.area_cost_per_cm2": "float",
    "sizing.cap_cost_per_F": "float",
}


class Config:
    """Typed view over the flat key/value map; compares by content."""

    def __init__(self, values: dict):
        missing = [k for k in SCHEMA if k not in values]
        if missing:
            raise ConfigError(f"missing keys: {', '.join(missing)}")
        self._values = {k: values[k] for k in SCHEMA}

    def __getitem__(self, key):
        try:
            return self._values[key]
        except KeyError:
            raise ConfigError(f"unknown config key {key!r}") from None

    def __eq__(self, other):
        return isinstance(other, Config) and self._values == other._values

    def __hash__(self):
        return hash(tuple(sorted((k, str(v)) for k, v in self._values.items())))

    def items(self):
        return self._values.items()

    def with_overrides(self, overrides: dict) -> "Config":
        merged = dict(self._values)
        for key, value in overrides.items():
            if key not in SCHEMA:
                raise ConfigError(f"unknown config key {key!r}")
            merged[key] = value
        return Config(merged)


def _coerce(key: str, text: str, lineno: int):
    kind = SCHEMA[key]
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "float_list":
            parts = [p.strip() for p in text.split(",")]
            return tuple(float(p) for p in parts if p)
    except ValueError:
        raise ConfigError(
            f"line {lineno}: cannot parse {text!r} as {kind} for {key}") from None
    raise ConfigError(f"unsupported kind {kind} for {key}")


def _suffix_hint(key: str) -> str | None:
    """If key matches a known key up to its unit suffix, name the expected key."""
    base = key.rsplit("_", 1)[0] if "_" in key else key
    for known in SCHEMA:
        known_base = known.rsplit("_", 1)[0] if "_" in known else known
        if base == known_base and key != known:
            return known
    return None


def _parse_text(text: str, base: dict | None = None) -> dict:
    values = dict(base) if base else {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in SCHEMA:
            hint = _suffix_hint(key)
            if hint:
                raise ConfigError(
                    f"line {lineno}: unit suffix mismatch: {key!r} should be {hint!r}")
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        values[key] = _coerce(key, value, lineno)
    return values


def default_config() -> Config:
    """The bundled defaults; every other config starts from these."""
    text = resources.files("pvrfid.data").joinpath("defaults.cfg").read_text("utf-8")
    return Config(_parse_text(text))


def parse_config(path: str | None) -> Config:
    """Defaults overlaid with the file at path; path None means defaults."""
    cfg = default_config()
    if path is None:
        return cfg
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return Config(_parse_text(text, base=dict(cfg.items())))


def _format_value(kind: str, value) -> str:
    if kind == "int":
        return str(value)
    if kind == "float":
        return repr(float(value))
    return ", ".join(repr(float(v)) for v in value)


def dump_config(cfg: Config) -> str:
    """Canonical text that re-parses to an equal Config."""
    lines = [f"{key} = {_format_value(SCHEMA[key], value)}"
             for key, value in cfg.items()]
    return "\n".join(lines) + "\n"


# model builders


def build_pv(cfg: Config) -> DiodeModel:
    return fit_single_diode(jsc=cfg["pv.jsc_mA_cm2"],
                            voc=cfg["pv.voc_V"],
                            ff=cfg["pv.ff"],
                            area=cfg["pv.area_cm2"],
                            n_series=cfg["pv.n_series"])


def build_ic(cfg: Config) -> ICProfile:
    # dividing by the exact powers of ten keeps e.g. 30 uA equal to the
    # literal 30e-6 to the last bit
    return ICProfile(i_sleep=cfg["ic.i_sleep_uA"] / 1e6,
                     i_ready=cfg["ic.i_ready_uA"] / 1e6,
                     i_measure=cfg["ic.i_measure_uA"] / 1e6,
                     t_measure=cfg["ic.t_measure_ms"] / 1e3,
                     v_threshold=cfg["ic.v_threshold_V"],
                     v_max=cfg["ic.v_max_V"],
                     sens_passive=cfg["ic.sens_passive_dbm"],
                     sens_assisted=cfg["ic.sens_assisted_dbm"])


def build_cap(cfg: Config) -> CapacitorModel:
    r = cfg["cap.leak_R_ohm"]
    if r > 0:
        if cfg["cap.leak_uA"] != 0:
            raise ConfigError(
                "set cap.leak_uA only with cap.leak_R_ohm = 0; the two leak "
                "models are exclusive")
        return CapacitorModel(capacitance=cfg["cap.capacitance_F"],
                              v_max=cfg["cap.v_max_V"],
                              leak_resistance_ohm=r)
    return CapacitorModel(capacitance=cfg["cap.capacitance_F"],
                          v_max=cfg["cap.v_max_V"],
                          leak_current_a=cfg["cap.leak_uA"] / 1e6)


def build_link(cfg: Config) -> LinkConfig:
    return LinkConfig(eirp=cfg["link.eirp_dbm"],
                      tag_gain=cfg["link.tag_gain_dbi"],
                      reader_antenna_gain=cfg["link.reader_gain_dbi"],
                      tau=cfg["link.tau"],
                      polarization_loss=cfg["link.pol_loss_db"],
                      modulation_loss=cfg["link.mod_loss_db"],
                      reader_sensitivity=cfg["link.reader_sens_dbm"],
                      frequency=cfg["link.freq_hz"])


def build_schedule(cfg: Config) -> MeasurementSchedule:
    return MeasurementSchedule(rate_per_hour=cfg["sim.rate_per_hour"])


def build_scenario(cfg: Config, duration: float | None = None,
                   dt: float | None = None) -> Scenario:
    duration = cfg["sim.duration_s"] if duration is None else duration
    light_end = min(cfg["sim.light_on_s"], duration)
    if light_end > 0 and cfg["sim.light_suns"] > 0:
        light = LightProfile.window(light_end, cfg["sim.light_suns"])
    else:
        light = LightProfile.dark()
    return Scenario(pv=build_pv(cfg),
                    cap=build_cap(cfg),
                    ic=build_ic(cfg),
                    schedule=build_schedule(cfg),
                    light=light,
                    duration=duration,
                    dt=cfg["sim.dt_s"] if dt is None else dt,
                    initial_v=cfg["sim.initial_V"],
                    photocurrent_scale=cfg["sim.photocurrent_scale"])


def build_sizing_request(cfg: Config) -> SizingRequest:
    hours = cfg["sizing.light_hours"]
    suns = cfg["sizing.light_suns"]
    if hours > 0 and suns > 0:
        light = LightProfile.window(hours * 3600.0, suns)
    else:
        light = LightProfile.dark()
    base = build_pv(cfg)
    # per-unit-area cell: photocurrent of one cm^2 at the module voltage
    from dataclasses import replace
    base = replace(base, isc=base.isc / cfg["pv.area_cm2"])
    return SizingRequest(
        base_cell=base,
        ic=build_ic(cfg),
        schedule=MeasurementSchedule(rate_per_hour=cfg["sizing.rate_per_hour"]),
        light=light,
        target_availability=cfg["sizing.target"],
        area_grid=tuple(cfg["sizing.area_grid_cm2"]),
        cap_grid=tuple(cfg["sizing.cap_grid_F"]),
        leak_current_a=cfg["sizing.leak_uA"] / 1e6,
        area_cost=cfg["sizing.area_cost_per_cm2"],
        cap_cost=cfg["sizing.cap_cost_per_F"])
