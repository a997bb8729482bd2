"""Config-file ingestion for the CLI.

Run configs are INI-style files: line-oriented key = value pairs under
section headers, with expressions carried as quoted strings:

    [problem]
    a = 0.5
    u0 = 1
    T = 1
    h = "t/gamma(0.5)"

    [solver]
    n_grid = 129
    tol = 1e-10

    [check]
    r = 1.0
    t_box = -4, 6

    [probe]
    inits = "1" "1+x" "1-x" "2"

    [mvt]
    function = "1+x^2"
    a = 0.5
    x = 1.0

Numeric coercion and bounds checking happen in the request models, not
here; this module only structures the text.
"""

import configparser
import shlex

__all__ = ["load_config", "unquote", "split_inits", "parse_t_box", "ConfigError"]


class ConfigError(ValueError):
    pass


def load_config(path: str) -> dict[str, dict[str, str]]:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep key case
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path!r}: {exc}") from exc
    return {section: dict(parser.items(section)) for section in parser.sections()}


def unquote(value: str) -> str:
    value = value.strip()
    if len(value) >= 2 and value[0] == value[-1] and value[0] in "'\"":
        return value[1:-1]
    return value


def split_inits(value: str) -> list[str]:
    """Split a list of quoted initial-guess expressions."""
    try:
        return shlex.split(value)
    except ValueError as exc:
        raise ConfigError(f"malformed inits list: {exc}") from exc


def parse_t_box(value: str) -> tuple[float, float]:
    parts = value.split(",")
    if len(parts) != 2:
        raise ConfigError(f"t_box must be 'lo, hi', got {value!r}")
    try:
        return (float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise ConfigError(f"t_box must be numeric: {exc}") from exc
