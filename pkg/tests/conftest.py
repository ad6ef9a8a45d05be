"""
Pytest configuration and fixtures for banana tests.
"""
import pytest

from banana.cache import ConstantCache, set_active_cache
from banana.database import HISTORY_FILENAME, RunHistory
from banana.mpcore import make_context


@pytest.fixture
def ctx():
    """30-digit context; closed-form paths are asserted to 20 digits."""
    return make_context(30)


@pytest.fixture
def ctx_hi():
    return make_context(60)


@pytest.fixture
def constant_cache(tmp_path, request):
    """Isolated constant cache installed as the active cache for one test."""
    # Use pytest worker_id for parallel execution
    worker_id = getattr(request.config, 'workerinput', {}).get('workerid', 'master')
    cache = ConstantCache(tmp_path / f'cache-{worker_id}')
    previous = set_active_cache(cache)
    yield cache
    set_active_cache(previous)


@pytest.fixture
def history_db(tmp_path):
    return RunHistory(tmp_path / HISTORY_FILENAME)


@pytest.fixture(autouse=True)
def no_active_cache():
    """Tests compute constants directly unless they ask for constant_cache."""
    previous = set_active_cache(None)
    yield
    set_active_cache(previous)
