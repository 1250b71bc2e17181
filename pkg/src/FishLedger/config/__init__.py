# src/FishLedger/config/__init__.py

import copy
import os
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Optional, Union

import yaml
from dotenv import load_dotenv
from jsonschema import Draft7Validator

from ..core.base import ConfigError
from .schema import CONFIG_SCHEMA

CONFIG_ENV = "FISHLEDGER_CONFIG"
HOME_ENV = "FISHLEDGER_HOME"
DEFAULT_HOME = ".fishledger"
CONFIG_DIR = Path(__file__).parent


def deep_merge(base: Dict[str, Any], override: Mapping[str, Any]) -> Dict[str, Any]:
    """Merge ``override`` into a copy of ``base``; lists are replaced."""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _node_line(node: Optional[yaml.Node], path: Iterable[Any]) -> Optional[int]:
    """1-based line of the YAML node at ``path``, or the closest ancestor."""
    if node is None:
        return None
    for part in path:
        child = None
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                if key_node.value == part:
                    child = value_node
                    break
        elif isinstance(node, yaml.SequenceNode) and isinstance(part, int):
            if 0 <= part < len(node.value):
                child = node.value[part]
        if child is None:
            break
        node = child
    return node.start_mark.line + 1


def validate_config(config: Dict[str, Any], source: Optional[str] = None) -> None:
    """Validate configuration against schema.

    Args:
        config: Configuration dictionary to validate
        source: YAML text the configuration came from, used for line numbers

    Raises:
        ConfigError: If configuration is invalid
    """
    errors = sorted(Draft7Validator(CONFIG_SCHEMA).iter_errors(config), key=lambda e: list(e.path))
    if not errors:
        return
    error = errors[0]
    line = None
    if source is not None:
        try:
            line = _node_line(yaml.compose(source), error.absolute_path)
        except yaml.YAMLError:
            line = None
    location = "/".join(str(p) for p in error.absolute_path) or "<root>"
    raise ConfigError(f"Configuration validation failed at {location}: {error.message}", line)


def get_default_config() -> Dict[str, Any]:
    """Get default configuration."""
    with open(CONFIG_DIR / "default_config.yaml", "r", encoding="utf-8") as f:
        return yaml.safe_load(f)


def bundled_config(name: str) -> Path:
    """Path of a configuration shipped with the package, e.g. ``one_orderer``."""
    path = CONFIG_DIR / f"{Path(name).stem.replace('-', '_')}.yaml"
    if not path.exists():
        raise ConfigError(f"no bundled configuration named {name!r}")
    return path


def _parse_yaml(text: str, origin: str) -> Dict[str, Any]:
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as e:
        mark = e.problem_mark or e.context_mark
        line = mark.line + 1 if mark is not None else None
        raise ConfigError(f"Error parsing {origin}: {e.problem or e}", line) from e
    except yaml.YAMLError as e:
        raise ConfigError(f"Error parsing {origin}: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{origin} must contain a mapping at the top level", 1)
    return data


def load_config(
    config_file: Optional[Union[str, Path]] = None, validate_schema: bool = True
) -> Dict[str, Any]:
    """Load and validate configuration.

    The user file is deep-merged over the defaults. Without an explicit
    file, ``FISHLEDGER_CONFIG`` is consulted (``.env`` files included).

    Args:
        config_file: Path to configuration file
        validate_schema: Whether to validate against schema

    Returns:
        Configuration dictionary

    Raises:
        ConfigError: With the offending line number when known
    """
    load_dotenv()
    config = get_default_config()
    config_file = config_file or os.environ.get(CONFIG_ENV)
    if not config_file:
        return config

    config_path = Path(config_file)
    if not config_path.exists():
        # Bundled names such as "one-orderer" resolve to packaged configs
        try:
            config_path = bundled_config(config_path.name)
        except ConfigError:
            raise ConfigError(f"Configuration file not found: {config_file}") from None
    source = config_path.read_text(encoding="utf-8")
    user_config = _parse_yaml(source, config_path.name)
    if validate_schema:
        validate_config(user_config, source)
    merged = deep_merge(config, user_config)
    if validate_schema:
        validate_config(merged)
    return merged


def data_home(home: Optional[Union[str, Path]] = None) -> Path:
    """Data directory: explicit argument, ``FISHLEDGER_HOME`` or ``./.fishledger``."""
    load_dotenv()
    return Path(home or os.environ.get(HOME_ENV) or DEFAULT_HOME)


__all__ = [
    "CONFIG_ENV",
    "HOME_ENV",
    "bundled_config",
    "data_home",
    "deep_merge",
    "get_default_config",
    "load_config",
    "validate_config",
]
