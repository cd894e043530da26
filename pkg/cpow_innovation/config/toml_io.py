"""Reading and writing the TOML configuration dialect."""

import sys
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Union

import tomli_w

from cpow_innovation.errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

PathLike = Union[str, Path]


def load_toml(path: PathLike) -> Dict[str, Any]:
    """Load a TOML document.

    Raises:
        ConfigError: If the file is missing or not valid TOML
    """
    path = Path(path)
    try:
        with path.open("rb") as handle:
            return tomllib.load(handle)
    except FileNotFoundError as exc:
        raise ConfigError(f"Config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"Invalid TOML in {path}: {exc}") from exc


def dump_toml(data: Mapping[str, Any], path: PathLike) -> Path:
    """Write a mapping as TOML, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as handle:
        tomli_w.dump(_plain(data), handle)
    return path


def check_keys(table: Mapping[str, Any], allowed: Iterable[str], table_name: str) -> None:
    """Reject keys that a settings table does not know about."""
    unknown = sorted(set(table) - set(allowed))
    if unknown:
        valid = ", ".join(sorted(allowed))
        raise ConfigError(
            f"Unknown key(s) {', '.join(unknown)} in [{table_name}]. Valid keys are: {valid}"
        )


def _plain(value: Any) -> Any:
    # tomli_w only accepts builtin containers and scalars
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items() if v is not None}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "item") and callable(value.item):
        return value.item()
    return value
