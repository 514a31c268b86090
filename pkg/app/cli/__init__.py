"""Command-line interface"""

from app.cli.commands import HANDLERS
from app.cli.parser import build_parser, settings_overrides

__all__ = ["HANDLERS", "build_parser", "settings_overrides"]
