"""
Configuration Loader
YAML defaults + CLI overrides, validated into RunConfig; every failure names its dotted key
"""

import json
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv
from loguru import logger
from pydantic import ValidationError

from core.models import RunConfig

DEFAULT_CONFIG_PATH = Path(__file__).parent.parent / "config" / "config.yaml"
OUTPUT_ROOT_ENV = "MERGE_LAB_OUTPUT_ROOT"

# YAML sections that map onto top-level RunConfig fields
_LIFTED = {
    "output": {"dir": "output_dir", "excel_report": "excel_report"},
    "logging": {"level": "log_level"},
}


class ConfigError(ValueError):
    """Invalid configuration; `key` is the dotted path of the offending entry"""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


def _lift_sections(data: Dict[str, Any]) -> Dict[str, Any]:
    data = dict(data)
    for section, fields in _LIFTED.items():
        block = data.pop(section, None)
        if block is None:
            continue
        if not isinstance(block, dict):
            raise ConfigError(section, "expected a mapping")
        for name, value in block.items():
            if name not in fields:
                raise ConfigError(f"{section}.{name}", "unknown key")
            data[fields[name]] = value
    return data


def set_dotted(data: Dict[str, Any], key: str, value: Any):
    """Assign `value` at a dotted path, creating intermediate mappings"""
    parts = key.split(".")
    node = data
    for part in parts[:-1]:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigError(key, f"{part} is not a section")
        node = child
    node[parts[-1]] = value


def validate(data: Dict[str, Any]) -> RunConfig:
    try:
        return RunConfig.model_validate(_lift_sections(data))
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(p) for p in first["loc"]) or "<root>"
        logger.error(f"Invalid configuration at {key}: {first['msg']}")
        raise ConfigError(key, first["msg"]) from e


def load_config(path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Read YAML (the packaged defaults when path is None), apply dotted overrides, validate"""
    config_path = Path(path) if path else DEFAULT_CONFIG_PATH
    data: Dict[str, Any] = {}
    if config_path.exists():
        try:
            with open(config_path, "r") as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError("<file>", f"{config_path} is not valid YAML: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError("<root>", f"{config_path} must hold a mapping")
        logger.debug(f"Loaded configuration from {config_path}")
    elif path:
        raise ConfigError("<file>", f"{config_path} does not exist")
    else:
        logger.warning(f"Default config {config_path} not found, using built-in defaults")

    data = _lift_sections(data)
    for key, value in (overrides or {}).items():
        if value is not None:
            set_dotted(data, key, value)
    return validate(data)


def default_output_root() -> str:
    load_dotenv()
    return os.environ.get(OUTPUT_ROOT_ENV, "outputs")


def resolve_output_dir(config: RunConfig) -> Path:
    if config.output_dir:
        return Path(config.output_dir)
    return Path(default_output_root()) / f"{config.mode}_seed{config.seed}"


def flatten(data: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    flat: Dict[str, Any] = {}
    for key, value in data.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten(value, f"{dotted}."))
        else:
            flat[dotted] = value
    return flat


def manifest_lines(config: RunConfig, extra: Optional[Dict[str, Any]] = None) -> list:
    flat = flatten(config.model_dump(mode="json"))
    flat.update(extra or {})
    lines = []
    for key in sorted(flat):
        value = flat[key]
        text = value if isinstance(value, str) else json.dumps(value)
        lines.append(f"{key}={text}")
    return lines


def write_manifest(config: RunConfig, path: Path, extra: Optional[Dict[str, Any]] = None) -> Path:
    """Flat sorted key=value echo of the resolved configuration"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(manifest_lines(config, extra)) + "\n")
    return path
