"""
Shared configuration and logger setup for the toolkit.
"""

import logging
import sys
from dataclasses import dataclass
from typing import Optional

TABLE_FORMATS = ("text", "packed")


@dataclass
class ToolkitConfig:
    """Configuration shared by the checker, the 𝔼A decider and the generators."""

    strict: bool = True
    guard_nonempty: bool = True
    memoize: bool = True
    size_cap: int = 4096
    debug: bool = False
    table_format: str = "text"
    encoding: str = "utf-8"

    def __post_init__(self):
        if not isinstance(self.size_cap, int) or self.size_cap < 1:
            raise ValueError("Size cap must be a positive integer")

        if self.table_format not in TABLE_FORMATS:
            raise ValueError(
                f"Unknown table format '{self.table_format}', "
                f"expected one of {', '.join(TABLE_FORMATS)}"
            )

        try:
            "test".encode(self.encoding)
        except LookupError:
            raise ValueError(f"Invalid encoding: {self.encoding}")


DEFAULT_CONFIG = ToolkitConfig()


def create_toolkit_config(**kwargs) -> ToolkitConfig:
    """
    Convenience function to create a ToolkitConfig.

    Args:
        **kwargs: Configuration parameters; unknown names raise TypeError

    Returns:
        ToolkitConfig object
    """
    return ToolkitConfig(**kwargs)


def setup_default_logger(
    name: str, level: int = logging.INFO, stream=None
) -> logging.Logger:
    """Set up a logger with the toolkit's formatting if it has no handler yet."""
    logger = logging.getLogger(name)
    logger.setLevel(level)

    if not logger.handlers:
        handler = logging.StreamHandler(stream or sys.stdout)
        formatter = logging.Formatter(
            "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
        )
        handler.setFormatter(formatter)
        logger.addHandler(handler)

    return logger


def resolve_config(config: Optional[ToolkitConfig]) -> ToolkitConfig:
    return config if config is not None else DEFAULT_CONFIG
