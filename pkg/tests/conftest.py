import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from squarecut.maxflow import warmup


@pytest.fixture(scope="session", autouse=True)
def compiled_solver():
    """Pay the JIT compilation cost once, before anything gets timed."""
    warmup()
