"""Configuration files: TOML dialect and typed settings."""

from cpow_innovation.config.toml_io import check_keys, dump_toml, load_toml

__all__ = ["check_keys", "dump_toml", "load_toml"]
