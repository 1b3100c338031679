"""
Settings
========

Resolution of run settings from built-in defaults, a JSON settings file,
environment variables and command-line flags, in increasing precedence.
"""

import json
import logging
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping, Optional

from evaluation import Strategy


logger = logging.getLogger(__name__)

# Environment variable for each setting that can come from the environment.
ENV_VARS = {
    "fuel": "PCFH_FUEL",
    "strategy": "PCFH_STRATEGY",
    "strict_zero": "PCFH_STRICT_ZERO",
    "jobs": "PCFH_JOBS",
}

SETTINGS_FILE_NAME = ".pcfh.json"

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off", ""}


class ConfigError(ValueError):
    """Raised for settings values that cannot be used."""


@dataclass(frozen=True)
class Settings:
    fuel: int = 10_000
    strategy: Strategy = Strategy.LEFT
    strict_zero: bool = False
    jobs: int = 1
    check_steps: bool = False


def settings_paths(cwd: Optional[Path] = None, home: Optional[Path] = None) -> list[Path]:
    """Candidate settings files, first existing one wins."""
    cwd = Path.cwd() if cwd is None else cwd
    home = Path.home() if home is None else home
    return [cwd / SETTINGS_FILE_NAME, home / SETTINGS_FILE_NAME]


def _coerce(name: str, raw: Any, source: str) -> Any:
    try:
        if name in ("fuel", "jobs"):
            if isinstance(raw, bool):
                raise ValueError(raw)
            value = int(raw)
            if value < 0 or (name == "jobs" and value < 1):
                raise ValueError(raw)
            return value
        if name == "strategy":
            return Strategy(str(raw).lower())
        if name in ("strict_zero", "check_steps"):
            if isinstance(raw, bool):
                return raw
            text = str(raw).strip().lower()
            if text in _TRUE:
                return True
            if text in _FALSE:
                return False
            raise ValueError(raw)
    except ValueError:
        raise ConfigError(f"invalid value {raw!r} for {name} in {source}") from None
    raise ConfigError(f"unknown setting {name!r} in {source}")


def read_settings_file(path: Path) -> dict[str, Any]:
    """
    Read a JSON settings file.

    Args:
        path: File holding a JSON object keyed by setting name

    Returns:
        The coerced values found in the file

    Raises:
        ConfigError: when the file is unreadable, not an object or holds bad values
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read settings from {path}: {e}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"settings file {path} must hold a JSON object")
    known = {f.name for f in fields(Settings)}
    values = {}
    for name, raw in data.items():
        if name not in known:
            raise ConfigError(f"unknown setting {name!r} in {path}")
        values[name] = _coerce(name, raw, str(path))
    return values


def load_settings(
    config_path: Optional[Path] = None,
    environ: Optional[Mapping[str, str]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    search_paths: Optional[list[Path]] = None,
) -> Settings:
    """
    Resolve settings.

    Args:
        config_path: Explicit settings file; must exist when given
        environ: Environment to read (defaults to ``os.environ``)
        overrides: Values from command-line flags; None entries are ignored
        search_paths: Settings files tried when ``config_path`` is None

    Returns:
        The resolved Settings
    """
    environ = os.environ if environ is None else environ
    settings = Settings()

    if config_path is not None:
        settings = replace(settings, **read_settings_file(config_path))
        logger.debug("settings file %s", config_path)
    else:
        for path in settings_paths() if search_paths is None else search_paths:
            if path.exists():
                settings = replace(settings, **read_settings_file(path))
                logger.debug("settings file %s", path)
                break

    from_env = {}
    for name, var in ENV_VARS.items():
        if var in environ:
            from_env[name] = _coerce(name, environ[var], f"${var}")
    settings = replace(settings, **from_env)

    if overrides:
        flags = {
            name: _coerce(name, raw, "command line")
            for name, raw in overrides.items()
            if raw is not None
        }
        settings = replace(settings, **flags)
    return settings
