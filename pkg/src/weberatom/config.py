"""Run configuration: sectioned key-value files with strict validation.

A run file is INI-shaped with five sections::

    [setup]   physical constants of the atom/laser pair
    [beam]    beam selection and irradiance
    [cloud]   initial ensemble sampling
    [sim]     integrator and force-model switches
    [output]  artifact destination and recording cadence

Every key has a default, so the empty file is a valid configuration (it
reproduces the low-irradiance splitting scenario).  Unknown sections or
keys are hard errors carrying the offending line number — a typo must
never silently fall back to a default.  ``parse_config(emit_config(c))``
returns a config equal to ``c``.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, replace

from .beams import BeamSpec
from .dynamics import (
    CloudConfig,
    DEFAULT_CADENCE,
    DEFAULT_T_MAX,
    DEFAULT_TOL,
)
from .units import PhysicalSetup


class ConfigError(ValueError):
    """Raised for any malformed or invalid configuration text.

    ``line`` is the 1-based line number the problem was traced to, or 0
    when no specific line applies (e.g. programmatic construction).
    """

    def __init__(self, message, line=0):
        self.line = int(line)
        prefix = f"line {line}: " if line else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class SimSettings:
    """Integrator and force-model choices (the [sim] section)."""

    t_max: float = DEFAULT_T_MAX
    tol: float = DEFAULT_TOL
    grid: bool = True
    force_denominator: str = "as_printed"
    x_window: tuple | None = None

    def __post_init__(self):
        if self.t_max <= 0.0:
            raise ValueError("t_max must be positive")
        if not 1e-12 <= self.tol <= 1e-4:
            raise ValueError("tol must lie in [1e-12, 1e-4]")
        if self.force_denominator not in ("as_printed", "standard"):
            raise ValueError(
                "force_denominator must be 'as_printed' or 'standard'")
        if self.x_window is not None:
            lo, hi = self.x_window
            if not lo < hi:
                raise ValueError("x_window must be 'none' or lo < hi")


@dataclass(frozen=True)
class OutputSettings:
    """Artifact destination and trajectory recording cadence."""

    directory: str = "runs"
    cadence: float = DEFAULT_CADENCE
    formats: str = "csv"

    def __post_init__(self):
        if not self.directory:
            raise ValueError("directory must be non-empty")
        if self.cadence <= 0.0:
            raise ValueError("cadence must be positive")
        if self.formats != "csv":
            raise ValueError("formats: only 'csv' is supported")


@dataclass(frozen=True)
class RunConfig:
    setup: PhysicalSetup = PhysicalSetup()
    beam: BeamSpec = BeamSpec()
    cloud: CloudConfig = CloudConfig()
    sim: SimSettings = SimSettings()
    output: OutputSettings = OutputSettings()


# -- value codecs ---------------------------------------------------------


def _parse_float(text):
    return float(text)


def _parse_int(text):
    return int(text, 0)


def _parse_seed(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise ValueError("seed must fit in 64 unsigned bits")
    return value


_BOOL_WORDS = {"true": True, "on": True, "yes": True, "1": True,
               "false": False, "off": False, "no": False, "0": False}


def _parse_bool(text):
    try:
        return _BOOL_WORDS[text.strip().lower()]
    except KeyError:
        raise ValueError(f"expected a boolean, got {text!r}") from None


def _parse_complex(text):
    return complex(text.replace(" ", ""))


def _parse_pair(text):
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != 2:
        raise ValueError(f"expected 'low, high', got {text!r}")
    return (float(parts[0]), float(parts[1]))


def _parse_window(text):
    if text.strip().lower() == "none":
        return None
    return _parse_pair(text)


def _parse_str(text):
    return text.strip()


def _fmt(value):
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    if isinstance(value, complex):
        return repr(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


# section -> key -> parser; key order here is the emission order
_SCHEMA = {
    "setup": {
        "transition_wavelength": _parse_float,
        "laser_wavelength": _parse_float,
        "gamma": _parse_float,
        "atom_mass": _parse_float,
        "gravity": _parse_float,
    },
    "beam": {
        "parity": _parse_str,
        "order_a": _parse_float,
        "kz_fraction": _parse_float,
        "amp_te": _parse_complex,
        "amp_tm": _parse_complex,
        "irradiance": _parse_float,
        "amplitude_scale": _parse_float,
    },
    "cloud": {
        "n_atoms": _parse_int,
        "x0": _parse_float,
        "y_band": _parse_pair,
        "z_band": _parse_pair,
        "speed_x": _parse_float,
        "perp_ratio_cap": _parse_float,
        "temperature_equiv": _parse_float,
        "seed": _parse_seed,
    },
    "sim": {
        "t_max": _parse_float,
        "tol": _parse_float,
        "grid": _parse_bool,
        "force_denominator": _parse_str,
        "x_window": _parse_window,
    },
    "output": {
        "directory": _parse_str,
        "cadence": _parse_float,
        "formats": _parse_str,
    },
}

_SECTION_TYPES = {
    "setup": PhysicalSetup,
    "beam": BeamSpec,
    "cloud": CloudConfig,
    "sim": SimSettings,
    "output": OutputSettings,
}

_SECTION_RE = re.compile(r"^\s*\[(?P<name>[^\]]*)\]")
_KEY_RE = re.compile(r"^\s*(?P<key>[^\s=:;#\[][^=:]*?)\s*[=:]")


def _line_map(text):
    """Map (section, key) and (section,) to the 1-based line of first use."""
    lines = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith(("#", ";")):
            continue
        m = _SECTION_RE.match(raw)
        if m:
            section = m.group("name").strip().lower()
            lines.setdefault((section,), lineno)
            continue
        m = _KEY_RE.match(raw)
        if m and section is not None:
            lines.setdefault((section, m.group("key").strip().lower()), lineno)
    return lines


def parse_config(text):
    """Parse configuration text, apply defaults, and validate.

    Returns a fully resolved :class:`RunConfig`.  Raises
    :class:`ConfigError` (with a line number wherever one is known) on
    unknown sections/keys, unparseable values, or constraint violations.
    """
    parser = configparser.ConfigParser(interpolation=None, strict=True,
                                       empty_lines_in_values=False)
    try:
        parser.read_string(text, source="<config>")
    except configparser.Error as exc:
        lineno = getattr(exc, "lineno", 0)
        if not lineno:
            # ParsingError carries a list of (lineno, line) instead
            errors = getattr(exc, "errors", None)
            if errors:
                lineno = errors[0][0]
        raise ConfigError(str(exc.message if hasattr(exc, "message") else exc),
                          line=lineno) from None

    where = _line_map(text)
    sections = {}
    for section in parser.sections():
        name = section.lower()
        if name not in _SCHEMA:
            raise ConfigError(
                f"unknown section [{section}]; expected one of "
                + ", ".join(sorted(_SCHEMA)),
                line=where.get((name,), 0))
        schema = _SCHEMA[name]
        values = {}
        for key in parser.options(section):
            line = where.get((name, key), where.get((name,), 0))
            if key not in schema:
                raise ConfigError(
                    f"unknown key '{key}' in [{name}]; expected one of "
                    + ", ".join(schema), line=line)
            raw = parser.get(section, key)
            try:
                values[key] = schema[key](raw)
            except ValueError as exc:
                raise ConfigError(f"[{name}] {key}: {exc}", line=line) from None
        sections[name] = values

    built = {}
    for name, cls in _SECTION_TYPES.items():
        values = sections.get(name, {})
        try:
            built[name] = cls(**values)
        except ValueError as exc:
            # attribute the failure to the key named in the message if any
            line = where.get((name,), 0)
            for key in values:
                if key in str(exc):
                    line = where.get((name, key), line)
                    break
            raise ConfigError(f"[{name}]: {exc}", line=line) from None
    return RunConfig(**built)


def parse_config_file(path):
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())


def emit_config(config):
    """Render a config to text with every field explicit and round-trip safe.

    All floats use ``repr`` so re-parsing reproduces bit-identical values;
    ``parse_config(emit_config(c)) == c``.
    """
    chunks = []
    for name in _SCHEMA:
        part = getattr(config, name)
        chunks.append(f"[{name}]")
        for key in _SCHEMA[name]:
            chunks.append(f"{key} = {_fmt(getattr(part, key))}")
        chunks.append("")
    return "\n".join(chunks)


def config_as_dict(config):
    """Nested plain-type dict of the resolved config (for run metadata)."""
    out = {}
    for name in _SCHEMA:
        part = getattr(config, name)
        out[name] = {key: _fmt(getattr(part, key)) for key in _SCHEMA[name]}
    return out


def with_overrides(config, seed=None, out_dir=None):
    """Apply command-line overrides; flags win over file values."""
    if seed is not None:
        config = replace(config, cloud=replace(config.cloud, seed=int(seed)))
    if out_dir is not None:
        config = replace(config,
                         output=replace(config.output, directory=str(out_dir)))
    return config


__all__ = [
    "ConfigError", "RunConfig", "SimSettings", "OutputSettings",
    "parse_config", "parse_config_file", "emit_config", "config_as_dict",
    "with_overrides",
]
