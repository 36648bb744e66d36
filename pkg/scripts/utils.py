"""Utility functions for configuration management and validation."""

import copy
import importlib
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"
SETTINGS_PATH = CONFIG_DIR / "settings.yaml"
TEMPLATE_PATH = CONFIG_DIR / "template_settings.yaml"

DEFAULT_SETTINGS: Dict[str, Any] = {
    "seed": 0,
    "field": "q",
    "workers": 4,
    "cache_dir": "~/.cache/pgl2-invariants",
    "reports_dir": "./reports",
    "log_dir": "~/logs/pgl2-invariants",
    "database_path": "./reports/checks.duckdb",
    "caps": {
        "memory_bytes": 8 * 2**30,
        "seconds_per_check": 7200,
    },
    "full_coefficient_limit": 2**20,
    "expand_verify_limit": 2**13,
    "sampling_prime": 2_147_483_647,
    "sample_margin": 32,
    "spanning_cap": 200_000,
    "straighten_step_cap": 10**7,
}

REQUIRED_PACKAGES = ["yaml", "sympy", "numpy", "pydantic", "jsonschema", "dateutil"]
OPTIONAL_PACKAGES = ["duckdb"]


def load_yaml(path: str | Path) -> Dict[str, Any]:
    """Read a YAML settings file; an empty file reads as ``{}``.

    Raises:
        FileNotFoundError: If the file doesn't exist
        yaml.YAMLError: If the YAML syntax is invalid (the message names the file)
    """
    path = Path(path).expanduser()
    if not path.is_file():
        raise FileNotFoundError(f"Settings file not found: {path.absolute()}\n"
                                f"Copy from template: cp {TEMPLATE_PATH} {path}")
    try:
        return yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as e:
        raise yaml.YAMLError(f"Invalid YAML syntax in {path}:\n{e}") from e


def _merge(defaults: Dict[str, Any], given: Dict[str, Any], where: str,
           warn: bool = True) -> Dict[str, Any]:
    merged = copy.deepcopy(defaults)
    for key, value in given.items():
        if key not in defaults:
            raise ValueError(
                f"Unknown setting '{where}{key}' in settings file.\n"
                f"See {TEMPLATE_PATH} for the accepted keys."
            )
        if isinstance(defaults[key], dict):
            if not isinstance(value, dict):
                raise ValueError(f"Setting '{where}{key}' must be a mapping")
            merged[key] = _merge(defaults[key], value, f"{where}{key}.", warn)
        else:
            merged[key] = value
    for key in defaults:
        if key not in given and warn:
            print(f"[!] Warning: '{where}{key}' not found in settings, "
                  f"using default {defaults[key]!r}")
    return merged


def get_settings(path: Optional[str | Path] = None, quiet: bool = False) -> Dict[str, Any]:
    """Load settings from config/settings.yaml (or ``path``) merged over the defaults.

    A missing default file is not an error: the built-in defaults are used.
    Environment variables override the file: PGL2_INVARIANTS_CACHE_DIR sets
    ``cache_dir``.

    Raises:
        FileNotFoundError: If an explicitly given ``path`` does not exist
        ValueError: On unknown keys or malformed sections
    """
    if path is None and not SETTINGS_PATH.exists():
        if not quiet:
            print(f"[!] Warning: {SETTINGS_PATH} not found, using built-in defaults")
            print(f"    Copy from template: cp {TEMPLATE_PATH} {SETTINGS_PATH}")
        settings = copy.deepcopy(DEFAULT_SETTINGS)
    else:
        given = load_yaml(path or SETTINGS_PATH)
        if not isinstance(given, dict):
            raise ValueError(f"Settings file {path or SETTINGS_PATH} must contain a mapping")
        settings = _merge(DEFAULT_SETTINGS, given, "", warn=not quiet)

    env_cache = os.environ.get("PGL2_INVARIANTS_CACHE_DIR")
    if env_cache:
        settings["cache_dir"] = env_cache
    return settings


def check_prerequisites(verbose: bool = True) -> bool:
    """Verify that the required packages import and a settings file is available.

    Args:
        verbose: If True, print detailed messages about what's missing

    Returns:
        True if all prerequisites are met, False otherwise
    """
    all_ok = True

    for name in REQUIRED_PACKAGES:
        try:
            importlib.import_module(name)
        except ImportError:
            if verbose:
                print(f"[!] ERROR: required package '{name}' is not installed")
                print("    Install with: pip install -r requirements.txt")
            all_ok = False

    for name in OPTIONAL_PACKAGES:
        try:
            importlib.import_module(name)
        except ImportError:
            if verbose:
                print(f"[!] Warning: optional package '{name}' is missing "
                      f"(needed by build_index.py)")

    if not SETTINGS_PATH.exists() and verbose:
        print(f"[!] Warning: Missing {SETTINGS_PATH}; built-in defaults will be used")
        if TEMPLATE_PATH.exists():
            print(f"    Copy from template: cp {TEMPLATE_PATH} {SETTINGS_PATH}")

    return all_ok


def ensure_directory(path: str | Path, description: str = "directory") -> Path:
    """Ensure a directory exists, creating it if necessary.

    Args:
        path: Directory path to ensure exists (``~`` is expanded)
        description: Human-readable description for error messages

    Returns:
        Path object for the directory
    """
    dir_path = Path(path).expanduser()
    try:
        dir_path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OSError(f"Cannot create {description} at {dir_path}: {e}") from e
    return dir_path
