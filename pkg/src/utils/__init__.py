"""Utility functions"""

from .logger import setup_logger, get_logger
from .config import Settings, load_settings

__all__ = ['setup_logger', 'get_logger', 'Settings', 'load_settings']
