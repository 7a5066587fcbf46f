import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from focklab.blocks import BlockSchedule, BumpProfile  # noqa: E402
from focklab.fock import FockContext  # noqa: E402


@pytest.fixture(scope="session")
def ctx():
    return FockContext(1)


@pytest.fixture(scope="session")
def phi():
    return BumpProfile(1)


@pytest.fixture(scope="session")
def tame():
    return BlockSchedule()


ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def verdict(request):
    """Record ``(criterion, part) -> (passed, detail)`` for the end-of-run table."""
    store = request.config.stash.setdefault(ACCEPTANCE, {})

    def _record(criterion, part, passed, detail=""):
        store[(criterion, part)] = (bool(passed), detail)
        return bool(passed)
    return _record


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(ACCEPTANCE, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted({c for c, _ in store}):
        parts = sorted((p, v) for (c, p), v in store.items() if c == k)
        ok = all(v[0] for _, v in parts)
        detail = "; ".join(f"{p}: {'ok' if v[0] else 'FAIL'} {v[1]}".rstrip() for p, v in parts)
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
