"""Command-line interface for the MTSS toolkit."""

from .app import App, ExitCode, build_parser, main

__all__ = ['App', 'ExitCode', 'build_parser', 'main']
