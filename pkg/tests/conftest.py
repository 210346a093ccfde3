import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def write(tmp_path):
    """Write a text file into the test's temp dir and return its path."""

    def _write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return _write
