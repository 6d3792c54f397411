import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from services.settings import AnalysisSettings, override_settings  # noqa: E402


@pytest.fixture(autouse=True)
def default_settings():
    """Every test starts from built-in defaults, whatever the environment says"""
    override_settings(AnalysisSettings())
    yield
    override_settings(AnalysisSettings())
