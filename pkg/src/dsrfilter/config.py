"""Run configuration: sectioned ``key = value`` text with unit-suffixed keys.

Example::

    [spec]
    n = 3
    f0_hz = 1.5e9
    fbw = 0.06

    [cell]
    l_line_h = 7.4e-9
    c_gap_f = 0.9e-12
"""
from __future__ import annotations

import configparser
from pathlib import Path

from .errors import ConfigError

SCHEMA = {
    "spec": {
        "n": int, "f0_hz": float, "fbw": float, "z0_ohm": float, "g": float, "convention": str,
    },
    "cell": {
        "topology": str, "n": int, "z0_ohm": float, "synth_report": str,
        "l_line_h": float, "c_gap_f": float, "c_coup_f": float,
        "l_strip_half_h": float, "c_patch_f": float,
        "cm_l_line_h": float, "cm_c_gap_f": float, "c1_f": float,
    },
    "sweep": {"f_start_hz": float, "f_stop_hz": float, "points": int},
    "fit": {
        "target": str, "mode": str, "free": str, "max_evals": int, "restarts": int,
        "mag_weight": float, "phase_weight": float, "rel_lower": float, "rel_upper": float,
        **{f"{p}_{side}": float
           for p in ("l_line_h", "c_gap_f", "c_coup_f", "l_strip_half_h", "c_patch_f", "c1_f")
           for side in ("min", "max")},
    },
    "output": {
        "dir": str, "prefix": str, "csv": bool, "touchstone": bool, "s4p": bool, "svg": bool,
        "format": str, "unit": str, "threshold_db": float,
    },
}

_BOOL = {"1": True, "true": True, "yes": True, "on": True,
         "0": False, "false": False, "no": False, "off": False}


def _convert(section, key, raw, typ):
    try:
        if typ is bool:
            return _BOOL[raw.strip().lower()]
        if typ is int:
            return int(raw)
        return typ(raw.strip())
    except (KeyError, ValueError):
        raise ConfigError(f"[{section}] {key}: cannot read {raw!r} as {typ.__name__}")


def parse_config(text: str) -> dict:
    """Parse and validate configuration text into ``{section: {key: value}}``."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    out = {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        keys = SCHEMA[section]
        vals = {}
        for key, raw in cp.items(section):
            if key not in keys:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            v = _convert(section, key, raw, keys[key])
            if key.endswith("_hz") and not v > 0:
                raise ConfigError(f"[{section}] {key} must be > 0")
            vals[key] = v
        out[section] = vals
    return out


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    cfg = parse_config(text)
    cfg["_base"] = str(Path(path).resolve().parent)
    return cfg


def resolve_path(cfg: dict, p: str) -> Path:
    path = Path(p)
    if not path.is_absolute() and "_base" in cfg:
        path = Path(cfg["_base"]) / path
    return path


def require(cfg: dict, section: str) -> dict:
    if section not in cfg:
        raise ConfigError(f"missing [{section}] section")
    return cfg[section]


def format_section(name: str, values: dict) -> str:
    lines = [f"[{name}]"]
    for k, v in values.items():
        lines.append(f"{k} = {v:.12g}" if isinstance(v, float) else f"{k} = {v}")
    return "\n".join(lines) + "\n"
