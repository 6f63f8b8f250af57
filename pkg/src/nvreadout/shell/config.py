"""Fail-closed INI configuration for the command-line pipelines.

Every section and key is declared in ``SCHEMA``. Unknown sections or keys,
unparsable values and missing required keys are all reported together as a
ConfigError before any computation starts. Keys absent from a present
section fall back to their documented default, and the fallback is
recorded so reports can state where every input came from.
"""

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

REQUIRED = object()


@dataclass(frozen=True)
class Key:
    kind: str  # "float", "int", "bool", "str", "path" or "choice"
    default: object = REQUIRED
    unit: str = "dimensionless"
    choices: tuple = ()
    minimum: float | None = None
    strict_minimum: bool = False


SCHEMA = {
    "run": {
        "seed": Key("int", 0, unit="-"),
    },
    "rates": {
        "k_e": Key("float", 111.0, "MHz", minimum=0),
        "k_f": Key("float", 111.0, "MHz", minimum=0),
        "k_s": Key("float", 1.79, "MHz", minimum=0),
        "k_0": Key("float", 5.80, "MHz", minimum=0),
        "k_m": Key("float", 1.35, "MHz", minimum=0),
        "mixing_variant": Key("choice", "radiative", "-", choices=("radiative", "nonradiative")),
    },
    "init": {
        "mode": Key("choice", "ideal", "-", choices=("ideal", "polarized", "pumped")),
        "p": Key("float", 0.8, minimum=0),
        "pump_duration_us": Key("float", 2.0, "us", minimum=0),
        "dark_wait_us": Key("float", 1.0, "us", minimum=0),
    },
    "simulate": {
        "duration_ns": Key("float", 3000.0, "ns", minimum=0, strict_minimum=True),
        "step_ns": Key("float", 1.0, "ns", minimum=0, strict_minimum=True),
        "gate_start_ns": Key("float", 0.0, "ns", minimum=0),
        "gate_width_ns": Key("float", 250.0, "ns", minimum=0, strict_minimum=True),
        "lifetime_off_ns": Key("float", 9.0, "ns", minimum=0, strict_minimum=True),
        "lifetime_on_ns": Key("float", 8.0, "ns", minimum=0, strict_minimum=True),
        "include_mixing_photons": Key("bool", False, "-"),
    },
    "fit": {
        "model": Key(
            "choice",
            REQUIRED,
            "-",
            choices=("lorentzian", "gaussian", "gaussian2", "odmr", "rabi",
                     "double_exponential", "saturation"),
        ),
        "data": Key("path", REQUIRED, "-"),
    },
    "rates_fit": {
        "trace0": Key("path", REQUIRED, "-"),
        "trace1": Key("path", REQUIRED, "-"),
        "k_f_fixed": Key("float", 111.0, "MHz", minimum=0, strict_minimum=True),
        "fit_scale": Key("bool", False, "-"),
        "compare_variants": Key("bool", True, "-"),
    },
    "spectrum": {
        "data": Key("path", REQUIRED, "-"),
    },
    "cavity": {
        "q_factor": Key("float", 2021.0, minimum=0, strict_minimum=True),
        "mode_volume": Key("float", 0.35, "(lambda/n)^3", minimum=0, strict_minimum=True),
        "wavelength_nm": Key("float", 637.4, "nm", minimum=0, strict_minimum=True),
        "emitter_fwhm_ghz": Key("float", 360.0, "GHz", minimum=0, strict_minimum=True),
        "zpl_fraction": Key("float", 0.021, minimum=0, strict_minimum=True),
        "refractive_index": Key("float", 2.4, minimum=0, strict_minimum=True),
    },
    "collection": {
        "table": Key("path", REQUIRED, "-"),
        "k_x": Key("float", 0.24, minimum=0),
        "k_y": Key("float", 0.24, minimum=0),
        "k_z": Key("float", 0.52, minimum=0),
        "gamma_mhz": Key("float", 111.0, "MHz", minimum=0, strict_minimum=True),
        "wavelength_off_nm": Key("float", 640.8, "nm", minimum=0, strict_minimum=True),
        "wavelength_on_nm": Key("float", 637.4, "nm", minimum=0, strict_minimum=True),
        "purcell_off_x": Key("float", 1.0, minimum=0),
        "purcell_off_y": Key("float", 1.0, minimum=0),
        "purcell_off_z": Key("float", 1.0, minimum=0),
        "purcell_on_x": Key("float", 1.0, minimum=0),
        "purcell_on_y": Key("float", 1.0 + 0.224 / 0.24, minimum=0),
        "purcell_on_z": Key("float", 1.0, minimum=0),
    },
    "scenario": {
        "lifetime_factor": Key("float", 1.13, minimum=0, strict_minimum=True),
        "collection_factor_zpl": Key("float", 0.87, minimum=0, strict_minimum=True),
        "collection_factor_broadband": Key("float", 0.97, minimum=0, strict_minimum=True),
        "zpl_fraction_off": Key("float", 0.021, minimum=0, strict_minimum=True),
        "zpl_fraction_on": Key("float", 0.183, minimum=0, strict_minimum=True),
        "contrast_ratio": Key("float", 0.959, minimum=0, strict_minimum=True),
        "contrast_off": Key("float", 0.042),
    },
    "mc": {
        "n0": Key("float", 100.0, "counts", minimum=0),
        "n1": Key("float", 64.0, "counts", minimum=0),
        "trials": Key("int", 1_000_000, "-", minimum=1000),
    },
    "tune": {
        "current_nm": Key("float", 634.0, "nm", minimum=0, strict_minimum=True),
        "target_nm": Key("float", 637.4, "nm", minimum=0, strict_minimum=True),
        "red_rate_nm_per_h": Key("float", 1.8, "nm/h", minimum=0, strict_minimum=True),
        "blue_sensitivity": Key("float", 2.4, "nm/nm", minimum=0, strict_minimum=True),
    },
}

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


class ConfigError(ValueError):
    """Configuration problems; ``messages`` lists one entry per offending field."""

    def __init__(self, messages):
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


@dataclass
class RunConfig:
    """Validated configuration values with per-key provenance."""

    values: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    base_dir: Path = Path(".")

    def has(self, section):
        return section in self.values

    def get(self, section, key):
        return self.values[section][key]

    def section(self, section):
        return self.values[section]

    def source(self, section, key):
        return self.provenance[(section, key)]

    def unit(self, section, key):
        return SCHEMA[section][key].unit


def _convert(raw, entry, base_dir):
    text = raw.strip()
    if entry.kind == "float":
        value = float(text)
        if not math.isfinite(value):
            raise ValueError("must be finite")
    elif entry.kind == "int":
        value = int(text)
    elif entry.kind == "bool":
        low = text.lower()
        if low in _TRUE:
            value = True
        elif low in _FALSE:
            value = False
        else:
            raise ValueError("expected true or false")
    elif entry.kind == "choice":
        value = text.lower()
        if value not in entry.choices:
            raise ValueError(f"expected one of {', '.join(entry.choices)}")
    elif entry.kind == "path":
        value = Path(text)
        if not value.is_absolute():
            value = base_dir / value
        if not value.is_file():
            raise ValueError(f"file not found: {value}")
    else:
        value = text
    if entry.minimum is not None and entry.kind in ("float", "int"):
        if value < entry.minimum or (entry.strict_minimum and value == entry.minimum):
            op = ">" if entry.strict_minimum else ">="
            raise ValueError(f"must be {op} {entry.minimum}")
    return value


def parse_config(text, base_dir="."):
    """Parse and validate configuration text; raises ConfigError."""
    base_dir = Path(base_dir)
    parser = configparser.ConfigParser(
        interpolation=None, comment_prefixes=("#", ";"), inline_comment_prefixes=None,
        strict=True, default_section="\0",
    )
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"syntax: {exc}"]) from None

    errors = []
    cfg = RunConfig(base_dir=base_dir)
    for section in parser.sections():
        if section not in SCHEMA:
            errors.append(f"[{section}]: unknown section")
            continue
        schema = SCHEMA[section]
        values = {}
        for key, raw in parser.items(section):
            if key not in schema:
                errors.append(f"[{section}] {key}: unknown key")
                continue
            try:
                values[key] = _convert(raw, schema[key], base_dir)
            except ValueError as exc:
                errors.append(f"[{section}] {key}: {exc}")
                continue
            cfg.provenance[(section, key)] = "config"
        for key, entry in schema.items():
            if key in values or (section, key) in cfg.provenance:
                continue
            if entry.default is REQUIRED:
                errors.append(f"[{section}] {key}: required")
                continue
            values[key] = entry.default
            cfg.provenance[(section, key)] = "default"
        cfg.values[section] = values
    if errors:
        raise ConfigError(errors)
    return cfg


def load_config(path):
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, base_dir=path.parent)


def require_sections(cfg, command, sections):
    missing = [s for s in sections if not cfg.has(s)]
    if missing:
        raise ConfigError(
            [f"[{s}]: section required by '{command}' is missing" for s in missing]
        )
