"""Scenario files: YAML with unit-suffixed fields.

Every quantity carries its unit in the key name. Where two units are common
either spelling is accepted, but not both at once::

    carrier_frequency_ghz | carrier_frequency_hz
    propagation_speed_m_per_s            (optional, default 3e8)
    refractive_index                     (optional, default 1.4)
    num_antennas
    waveguide_length_m
    height_m
    region_m: [D_x, D_y]
    min_spacing_wavelengths | min_spacing_m
    feed_x_m                             (optional, default 0)
    power_budget_dbm | power_budget_w
    noise_power_dbm | noise_power_w      (scalar, or one entry per IR)
    sinr_floor_db | sinr_floor_linear
    energy_floor_uw | energy_floor_w
    receivers:
      information: [[x, y], ...]         explicit ground coordinates, or
      energy: [[x, y], ...]
      sampler: {seed: 7, information: 2, energy: 2}   uniform over the region

:func:`serialize_scenario` always writes the SI spellings with
shortest-repr floats, so ``scenario_from_dict(serialize_scenario(s)) == s``.
"""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import yaml

from .channel import PhysicalConstants
from .errors import ScenarioError
from .system import Scenario, sample_receivers

DEFAULT_SCENARIO = Path(__file__).with_name("data") / "default_scenario.yaml"

# (alternatives as (key, converter)); the first alternative is the SI spelling
_UNITS = {
    "carrier_frequency": (("carrier_frequency_hz", float), ("carrier_frequency_ghz", lambda v: v * 1e9)),
    "min_spacing": (("min_spacing_m", float), ("min_spacing_wavelengths", None)),
    "power_budget": (("power_budget_w", float), ("power_budget_dbm", lambda v: dbm_to_watts(v))),
    "noise_power": (("noise_power_w", float), ("noise_power_dbm", lambda v: dbm_to_watts(v))),
    "sinr_floor": (("sinr_floor_linear", float), ("sinr_floor_db", lambda v: db_to_linear(v))),
    "energy_floor": (("energy_floor_w", float), ("energy_floor_uw", lambda v: v * 1e-6)),
}
_PLAIN = {
    "propagation_speed_m_per_s": False,
    "refractive_index": False,
    "num_antennas": True,
    "waveguide_length_m": True,
    "height_m": True,
    "region_m": True,
    "feed_x_m": False,
    "receivers": True,
}


def dbm_to_watts(dbm: float) -> float:
    return 10 ** ((dbm - 30) / 10)


def watts_to_dbm(watts: float) -> float:
    return 10 * math.log10(watts) + 30 if watts > 0 else -math.inf


def db_to_linear(db: float) -> float:
    return 10 ** (db / 10)


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"expected a number, got {value!r}", path)
    if not math.isfinite(value):
        raise ScenarioError("must be finite", path)
    return float(value)


def _convert(value, conv, path):
    if isinstance(value, list) and conv is not None:
        return tuple(conv(_number(v, f"{path}[{i}]")) for i, v in enumerate(value))
    v = _number(value, path)
    return conv(v) if conv is not None else v


def _unit_field(data, name, required, path_prefix=""):
    present = [(key, conv) for key, conv in _UNITS[name] if key in data]
    if len(present) > 1:
        keys = " and ".join(k for k, _ in present)
        raise ScenarioError(f"give only one of {keys}", path_prefix + present[1][0])
    if not present:
        if required:
            names = " or ".join(k for k, _ in _UNITS[name])
            raise ScenarioError(f"missing field (expected {names})", path_prefix + _UNITS[name][0][0])
        return None, None
    key, conv = present[0]
    return key, _convert(data[key], conv, path_prefix + key)


def _points(value, path):
    if not isinstance(value, list):
        raise ScenarioError("expected a list of [x, y] or [x, y, z] points", path)
    out = []
    for i, p in enumerate(value):
        if not isinstance(p, list) or len(p) not in (2, 3):
            raise ScenarioError("expected [x, y] or [x, y, z]", f"{path}[{i}]")
        out.append(tuple(_number(c, f"{path}[{i}][{j}]") for j, c in enumerate(p)))
    return out


def _count(value, path):
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ScenarioError("expected an integer >= 1", path)
    return value


def _receivers(data, region):
    path = "receivers"
    if not isinstance(data, dict):
        raise ScenarioError("expected a mapping", path)
    unknown = set(data) - {"information", "energy", "sampler"}
    if unknown:
        raise ScenarioError("unknown field", f"{path}.{sorted(unknown)[0]}")
    if "sampler" in data:
        if "information" in data or "energy" in data:
            raise ScenarioError("give either a sampler or explicit receivers", f"{path}.sampler")
        spec = data["sampler"]
        sp = f"{path}.sampler"
        if not isinstance(spec, dict):
            raise ScenarioError("expected a mapping", sp)
        unknown = set(spec) - {"seed", "information", "energy"}
        if unknown:
            raise ScenarioError("unknown field", f"{sp}.{sorted(unknown)[0]}")
        for key in ("seed", "information", "energy"):
            if key not in spec:
                raise ScenarioError("missing field", f"{sp}.{key}")
        seed = spec["seed"]
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise ScenarioError("expected a non-negative integer", f"{sp}.seed")
        rng = np.random.default_rng(seed)
        irs = sample_receivers(rng, _count(spec["information"], f"{sp}.information"), region)
        ers = sample_receivers(rng, _count(spec["energy"], f"{sp}.energy"), region)
        return irs, ers
    for key in ("information", "energy"):
        if key not in data:
            raise ScenarioError("missing field", f"{path}.{key}")
    return (_points(data["information"], f"{path}.information"),
            _points(data["energy"], f"{path}.energy"))


def scenario_from_dict(data) -> Scenario:
    """Build a validated :class:`Scenario` from parsed YAML data."""
    if not isinstance(data, dict):
        raise ScenarioError("scenario file must be a mapping", "<root>")
    known = set(_PLAIN) | {key for alts in _UNITS.values() for key, _ in alts}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ScenarioError("unknown field", unknown[0])
    for key, required in _PLAIN.items():
        if required and key not in data:
            raise ScenarioError("missing field", key)

    _, fc = _unit_field(data, "carrier_frequency", True)
    if isinstance(fc, tuple):
        raise ScenarioError("expected a number", "carrier_frequency")
    speed = _number(data.get("propagation_speed_m_per_s", 3e8), "propagation_speed_m_per_s")
    n_eff = _number(data.get("refractive_index", 1.4), "refractive_index")
    try:
        consts = PhysicalConstants(fc, speed, n_eff)
    except ValueError as exc:
        raise ScenarioError(str(exc), "carrier_frequency") from exc

    region = data["region_m"]
    if not isinstance(region, list) or len(region) != 2:
        raise ScenarioError("expected [D_x, D_y]", "region_m")
    region = tuple(_number(v, f"region_m[{i}]") for i, v in enumerate(region))

    fields = {}
    for name in ("power_budget", "noise_power", "sinr_floor", "energy_floor", "min_spacing"):
        key, value = _unit_field(data, name, name != "min_spacing")
        if key is None:
            continue
        if isinstance(value, tuple) and name != "noise_power":
            raise ScenarioError("expected a number", key)
        if key == "min_spacing_wavelengths":
            value = value * consts.wavelength
        fields[name] = value

    m = data["num_antennas"]
    if isinstance(m, bool) or not isinstance(m, int):
        raise ScenarioError("expected an integer", "num_antennas")
    irs, ers = _receivers(data["receivers"], region)
    try:
        return Scenario(
            irs=irs, ers=ers, consts=consts, num_antennas=m, region=region,
            waveguide_length=_number(data["waveguide_length_m"], "waveguide_length_m"),
            height=_number(data["height_m"], "height_m"),
            feed_x=_number(data.get("feed_x_m", 0.0), "feed_x_m"),
            **fields,
        )
    except ScenarioError as exc:
        raise ScenarioError(str(exc).split(": ", 1)[-1], _file_path(exc.path)) from exc
    except (TypeError, ValueError) as exc:
        raise ScenarioError(str(exc), "<root>") from exc


def _file_path(field_name):
    # map Scenario attribute paths back to file keys
    head, sep, rest = (field_name or "").partition("[")
    key = {
        "irs": "receivers.information", "ers": "receivers.energy",
        "waveguide_length": "waveguide_length_m", "height": "height_m",
        "region": "region_m", "feed_x": "feed_x_m", "min_spacing": "min_spacing_m",
        "power_budget": "power_budget_w", "noise_power": "noise_power_w",
        "sinr_floor": "sinr_floor_linear", "energy_floor": "energy_floor_w",
    }.get(head, head)
    return key + sep + rest


def parse_scenario(path) -> Scenario:
    """Read and validate a scenario file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc.strerror}", "<file>") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"invalid YAML in {path}: {exc}", "<file>") from exc
    return scenario_from_dict(data)


def load_default_scenario() -> Scenario:
    return parse_scenario(DEFAULT_SCENARIO)


def serialize_scenario(s: Scenario) -> dict:
    """SI-unit mapping that parses back to an identical scenario."""
    c = s.consts
    return {
        "carrier_frequency_hz": c.carrier_frequency,
        "propagation_speed_m_per_s": c.propagation_speed,
        "refractive_index": c.refractive_index,
        "num_antennas": s.num_antennas,
        "waveguide_length_m": s.waveguide_length,
        "height_m": s.height,
        "region_m": list(s.region),
        "min_spacing_m": s.min_spacing,
        "feed_x_m": s.feed_x,
        "power_budget_w": s.power_budget,
        "noise_power_w": list(s.noise_power),
        "sinr_floor_linear": s.sinr_floor,
        "energy_floor_w": s.energy_floor,
        "receivers": {
            "information": [list(p) for p in s.irs],
            "energy": [list(p) for p in s.ers],
        },
    }


def dump_scenario(s: Scenario) -> str:
    return yaml.safe_dump(serialize_scenario(s), sort_keys=False)
