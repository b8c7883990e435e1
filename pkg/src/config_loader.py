"""Configuration loader module for heun-forge.

This module reads default option values from a YAML file. Values found
there sit between the built-in ``Config`` constants and the command line
flags in precedence.
"""

import logging
import os
from typing import Any, Dict, Optional

import yaml


logger = logging.getLogger(__name__)


class ConfigLoader:
    """Loads and manages configuration from YAML file."""

    DEFAULT_CONFIG_FILE = "config.yaml"

    # keys understood in config.yaml; anything else is ignored with a warning
    KNOWN_KEYS = {
        "n",
        "g",
        "kappa",
        "order",
        "mode",
        "scalar",
        "format",
        "eps_eq",
        "eps_div",
        "eps_res",
        "fd_step",
        "points",
        "q",
        "tau",
        "x",
        "omega1",
        "suite",
    }

    @staticmethod
    def load_config(config_file: Optional[str] = None) -> Dict[str, Any]:
        """Load configuration from YAML file.

        Args:
            config_file: Path to config file (optional, defaults to config.yaml)

        Returns:
            Dictionary containing configuration values, empty when the file is
            missing or unreadable
        """
        if config_file is None:
            config_file = ConfigLoader.DEFAULT_CONFIG_FILE

        if not os.path.exists(config_file):
            logger.debug(f"No config file at {config_file}, using built-in defaults")
            return {}

        try:
            with open(config_file, "r", encoding="utf-8") as f:
                config = yaml.safe_load(f)
        except yaml.YAMLError as e:
            logger.warning(f"Invalid YAML in {config_file}: {e}")
            return {}
        except OSError as e:
            logger.warning(f"Could not read {config_file}: {e}")
            return {}

        if config is None:
            return {}
        if not isinstance(config, dict):
            logger.warning(f"Config file {config_file} must hold a mapping, ignoring it")
            return {}

        unknown = sorted(str(key) for key in config if key not in ConfigLoader.KNOWN_KEYS)
        if unknown:
            logger.warning(f"Ignoring unknown config keys: {', '.join(unknown)}")
        return {key: value for key, value in config.items() if key in ConfigLoader.KNOWN_KEYS}

    @staticmethod
    def get_default(config: Dict[str, Any], key: str, fallback: Any) -> Any:
        """Get a configuration value with fallback.

        Args:
            config: Configuration dictionary
            key: Configuration key
            fallback: Fallback value if key not found

        Returns:
            Configuration value or fallback
        """
        return config.get(key, fallback)

    @staticmethod
    def get_choice(config: Dict[str, Any], key: str, valid: list, fallback: str) -> str:
        """Get a configuration value restricted to a list of choices.

        Args:
            config: Configuration dictionary
            key: Configuration key
            valid: Allowed values
            fallback: Value used when the key is missing or invalid

        Returns:
            The configured choice, or ``fallback``
        """
        value = config.get(key, fallback)
        if value not in valid:
            logger.warning(
                f"{key} in config must be one of {', '.join(valid)}, using default: {fallback}"
            )
            return fallback
        return value

    @staticmethod
    def get_tolerance(config: Dict[str, Any], key: str, fallback: float) -> float:
        """Get a positive float from the configuration.

        Args:
            config: Configuration dictionary
            key: Configuration key (eps_eq, eps_div, eps_res or fd_step)
            fallback: Value used when the key is missing or not a positive number

        Returns:
            The tolerance as a float
        """
        value = config.get(key, fallback)
        try:
            value = float(value)
        except (TypeError, ValueError):
            logger.warning(f"{key} in config must be a number, using default: {fallback}")
            return fallback
        if value <= 0:
            logger.warning(f"{key} in config must be positive, using default: {fallback}")
            return fallback
        return value

    @staticmethod
    def get_couplings(config: Dict[str, Any], fallback: str) -> str:
        """Get the couplings g0..g3 as the comma-separated text the CLI accepts.

        Args:
            config: Configuration dictionary
            fallback: Text used when ``g`` is missing or malformed

        Returns:
            "g0,g1,g2,g3"
        """
        value = config.get("g", fallback)
        if isinstance(value, (list, tuple)):
            if len(value) != 4:
                logger.warning(f"g in config must have four entries, using default: {fallback}")
                return fallback
            return ",".join(str(v) for v in value)
        return str(value)
