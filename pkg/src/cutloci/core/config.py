"""Configuration management for CUTLOCI."""

import copy
import json
from pathlib import Path
from typing import Any, Iterable, Optional

import yaml

from cutloci.core.errors import ArtifactIOError, ConfigValidationError
from cutloci.core.validator import validate_schema
from cutloci.schemas.config import RunConfig

USER_CONFIG_PATH = Path.home() / ".cutloci" / "config.yaml"
PROJECT_CONFIG_NAME = ".cutloci.yaml"

_TETRAHEDRON = [
    [0.5773502691896258, 0.5773502691896258, 0.5773502691896258],
    [0.5773502691896258, -0.5773502691896258, -0.5773502691896258],
    [-0.5773502691896258, 0.5773502691896258, -0.5773502691896258],
    [-0.5773502691896258, -0.5773502691896258, 0.5773502691896258],
]

PRESETS: dict[str, dict[str, Any]] = {
    "sphere": {
        "input": {"generator": {"kind": "sphere", "radius": 1.0, "subdivisions": 4}},
        "sources": {"points": [[0.0, 0.0, 1.0]]},
        "solver": {"m": 50.0},
        "lambdas": [0.1],
    },
    # vertex 0 of the generated torus is (R + r, 0, 0) on the outer equator
    "torus": {
        "input": {"generator": {"kind": "torus", "major": 2.0, "minor": 1.0, "nu": 128, "nv": 64}},
        "sources": {"vertices": [0]},
        "solver": {"m": 50.0},
        "lambdas": [0.1],
    },
    "torus-p2": {
        "input": {"generator": {"kind": "torus", "major": 2.0, "minor": 1.0, "nu": 64, "nv": 32}},
        "sources": {"vertices": [0]},
        "element": {"order": 2, "g": 6},
        "solver": {"m": 50.0},
        "lambdas": [0.1],
    },
    "sphere-voronoi": {
        "input": {"generator": {"kind": "sphere", "radius": 1.0, "subdivisions": 4}},
        "sources": {"points": _TETRAHEDRON},
        "solver": {"m": 50.0},
        "lambdas": [0.05],
    },
}


def deep_merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    """Recursively merge ``override`` into a copy of ``base``; non-dict values replace."""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def read_config_file(config_path: Path) -> dict[str, Any]:
    """
    Load a YAML or JSON config file into a dict.

    Raises:
        ArtifactIOError: If the file cannot be read
        ConfigValidationError: If it does not parse to a mapping
    """
    try:
        content = config_path.read_text(encoding="utf-8")
    except OSError as e:
        raise ArtifactIOError(f"Cannot read config file {config_path}: {e}") from e
    try:
        if config_path.suffix == ".json":
            data = json.loads(content)
        else:
            data = yaml.safe_load(content)
    except (yaml.YAMLError, json.JSONDecodeError) as e:
        raise ConfigValidationError(f"Cannot parse config file {config_path}: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigValidationError(f"Config file {config_path} must contain a mapping at top level")
    return data


def _set_dotted(target: dict[str, Any], dotted: str, value: Any) -> None:
    keys = dotted.split(".")
    node = target
    for key in keys[:-1]:
        child = node.get(key)
        if not isinstance(child, dict):
            child = {}
            node[key] = child
        node = child
    node[keys[-1]] = value


def parse_overrides(args: Iterable[str]) -> dict[str, Any]:
    """
    Turn ``--a.b value`` / ``--a.b=value`` tokens into a nested dict.

    Values are parsed as YAML scalars or flow lists (``50``, ``1e-3``,
    ``[0.05, 0.1]``, ``null``). A flag with no value means ``true``.

    Raises:
        ConfigValidationError: On a token that is not an override flag
    """
    tokens = list(args)
    result: dict[str, Any] = {}
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if not token.startswith("--") or len(token) == 2:
            raise ConfigValidationError(f"Unexpected argument '{token}'; overrides look like --solver.m 50")
        key = token[2:]
        if "=" in key:
            key, raw = key.split("=", 1)
            i += 1
        elif i + 1 < len(tokens) and not tokens[i + 1].startswith("--"):
            raw = tokens[i + 1]
            i += 2
        else:
            raw = "true"
            i += 1
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError as e:
            raise ConfigValidationError(f"Cannot parse value {raw!r} for --{key}: {e}") from e
        _set_dotted(result, key.replace("-", "_"), value)
    return result


def load_config(
    config_file: Optional[Path] = None,
    preset: Optional[str] = None,
    overrides: Optional[dict[str, Any]] = None,
    user_config: Optional[Path] = USER_CONFIG_PATH,
    project_dir: Optional[Path] = None,
) -> RunConfig:
    """
    Load configuration from hierarchy: overrides > --config file > project config > user config > preset.

    Args:
        config_file: Explicit YAML or JSON file
        preset: Name of a built-in preset used as the base layer
        overrides: Nested dict from ``parse_overrides``
        user_config: User-level file (skipped when missing or None)
        project_dir: Directory searched for ``.cutloci.yaml`` (cwd when None)

    Returns:
        Validated RunConfig

    Raises:
        ConfigValidationError: Unknown preset or invalid merged configuration
    """
    data: dict[str, Any] = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigValidationError(f"Unknown preset '{preset}'; choose one of {sorted(PRESETS)}")
        data = copy.deepcopy(PRESETS[preset])

    if user_config is not None and user_config.exists():
        data = deep_merge(data, read_config_file(user_config))

    project_path = (project_dir or Path.cwd()) / PROJECT_CONFIG_NAME
    if project_path.exists():
        data = deep_merge(data, read_config_file(project_path))

    if config_file is not None:
        data = deep_merge(data, read_config_file(Path(config_file)))

    if overrides:
        data = deep_merge(data, overrides)

    return validate_schema(data, RunConfig)


def save_config(config: RunConfig, path: Path, format: str = "yaml") -> Path:
    """
    Save configuration to file.

    Args:
        config: Configuration to write
        path: Path to save config file
        format: Format to save as ('yaml' or 'json')
    """
    data = config.model_dump(mode="json", exclude_none=True)
    if format == "yaml":
        content = yaml.safe_dump(data, default_flow_style=False, sort_keys=False)
    else:
        content = json.dumps(data, indent=2)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8")
    except OSError as e:
        raise ArtifactIOError(f"Cannot write config file {path}: {e}") from e
    return path
