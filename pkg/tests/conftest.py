"""Pytest configuration and fixtures."""

import sys
from pathlib import Path

import pytest

# Repository root for `src`, this directory for the shared corpus module
tests_path = Path(__file__).parent
sys.path.insert(0, str(tests_path.parent))
sys.path.insert(0, str(tests_path))

import corpus  # noqa: E402
from src.core.parser import dump_document  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running fuzz and bulk property runs")


@pytest.fixture
def fixture_script():
    """Build a corpus fixture by name."""
    def build(name):
        return corpus.FIXTURES[name]()
    return build


@pytest.fixture
def write_script(tmp_path):
    """Write a Script to tmp_path in document order (not canonicalized)."""
    def write(script, name="script.mtss.json"):
        path = tmp_path / name
        path.write_text(dump_document(script.to_dict()), encoding="utf-8")
        return path
    return write
