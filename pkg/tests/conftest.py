import os
from pathlib import Path

import pytest

from hedgehog.cache import CacheStore


@pytest.fixture(scope="session")
def store(tmp_path_factory):
    """Shared basis cache for the whole run.

    Set HEDGEHOG_TEST_CACHE to a directory to keep it warm between
    runs; enumerating the large acceptance windows from scratch takes
    a few minutes.
    """
    env = os.environ.get("HEDGEHOG_TEST_CACHE")
    root = Path(env) if env else tmp_path_factory.mktemp("hedgehog-cache")
    return CacheStore(root, enabled=True)
