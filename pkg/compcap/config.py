"""
Runtime settings of compcap.

The settings form a tree of ConfigValue nodes filled from the ``settings:`` block of a suite
file. Today it holds the artifact switches; names missing from the tree are read from the
environment, which is how COMPCAP_THREADS reaches the harness.
"""

import copy
import os
from contextlib import contextmanager
from functools import wraps
from pathlib import Path
from typing import Any, Callable, Iterator, TypeVar, Union

import yaml

AnyBasic = Union[int, float, bool, str, list, dict, tuple]
ConfigValueType = TypeVar("ConfigValueType", bound="ConfigValue")

_NOT_SET = object()


class ConfigError(AttributeError):
    """A missing setting, an invalid setting or a malformed experiment file"""


class ConfigValue:
    """A node of the settings tree; leaves are plain attributes"""

    def __init__(self, value: AnyBasic = None) -> None:
        self._value = value

    def set_values(self, data: dict[str, AnyBasic]) -> None:
        """Merge a nested mapping into the tree, keeping sibling settings"""
        for attr, value in data.items():
            if isinstance(value, dict):
                config_value = self.__dict__.get(attr)
                if not isinstance(config_value, ConfigValue):
                    config_value = ConfigValue()
                config_value.set_values(value)
                setattr(self, attr, config_value)
            else:
                setattr(self, attr, value)

    def create_config(self, name: str, *, default: AnyBasic = None, **values: AnyBasic) -> ConfigValueType:
        """
        Create a configuration value and nested values.

        Args:
            name (str): The name of the configuration value
            default: The default value. If set, values cannot be provided
            values (dict): Nested configuration values

        Returns:
            ConfigValue: The created configuration value
        """
        if default is not None and values:
            raise ConfigError("You cannot set the default value AND default values for sub values")
        if values:
            default = ConfigValue()
            default.set_values(values)
        self.set_values({name: default})

        return self

    def load_config_from_file(self, filename: Union[str, Path]) -> dict[str, AnyBasic]:
        """Load the config from a YAML file, returning the raw data"""
        with open(filename, encoding="utf-8") as config_file:
            raw_data = yaml.safe_load(config_file) or {}
        if isinstance(raw_data, dict):
            settings = raw_data.get("settings") or {}
            if not isinstance(settings, dict):
                raise ConfigError(f"Key 'settings' must be a mapping, got {settings!r}")
            self.set_values(settings)
        return raw_data

    @contextmanager
    def scoped(self) -> Iterator["ConfigValue"]:
        """Roll back every setting changed inside the block"""
        saved = copy.deepcopy(self.__dict__)
        try:
            yield self
        finally:
            self.__dict__.clear()
            self.__dict__.update(saved)

    def get(self, path: str, default: AnyBasic = None) -> Any:
        """Return the value at a dotted path, or default when it does not exist"""
        config_value = self
        try:
            for name in path.split("."):
                config_value = getattr(config_value, name)
        except ConfigError:
            return default
        return config_value

    def __getattr__(self, item: str):
        if item.startswith("__"):
            raise AttributeError(item)
        if value := os.getenv(item):
            return value
        raise ConfigError(f"No such config value: {item}. And there is no default value for it")

    @staticmethod
    def call_if(
        config_name: str, value: AnyBasic = _NOT_SET, return_on_not_call: AnyBasic = None
    ) -> Callable[[Callable], Callable]:
        """
        Call the decorated function only when a setting is enabled.

        :param config_name: Dotted path of the setting, e.g. ``artifacts.grid``
        :param value: Call only when the setting equals this value; by default when it is truthy
        :param return_on_not_call: Returned instead of calling, default: None
        """

        def decorator(method: Callable) -> Callable:
            @wraps(method)
            def wrapper(*args, **kwargs) -> Any:
                config_value = Config.get(config_name)
                if value is _NOT_SET and config_value or config_value == value:
                    return method(*args, **kwargs)
                return return_on_not_call

            return wrapper

        return decorator


def thread_count() -> int:
    """Worker count for suite runs, from COMPCAP_THREADS (default 1)"""
    raw = Config.get("COMPCAP_THREADS", 1)
    try:
        return max(1, int(raw))
    except (TypeError, ValueError) as err:
        raise ConfigError(f"COMPCAP_THREADS must be a positive integer, got {raw!r}") from err


Config = ConfigValue()
Config.create_config("artifacts", spectrum=False, grid=False)
