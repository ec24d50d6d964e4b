# wstrata/config/__init__.py

from wstrata.config.settings import DEFAULT_SETTINGS, Settings

__all__ = ["DEFAULT_SETTINGS", "Settings"]
