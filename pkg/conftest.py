import pytest

from conicqed.config import DEFAULT_NUMERICS, THREADS_ENV


@pytest.fixture
def loose_numerics():
    """Truncation loosened far enough that the identity checks must fail."""
    return DEFAULT_NUMERICS.with_overrides(rel_tol=1e-2)


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "1")
