from pathlib import Path

import pytest

from aitlab.enumeration import dovetail

ROOT = Path(__file__).resolve().parents[1]
THEORIES = ROOT / "fixtures" / "theories"
DATA = Path(__file__).resolve().parent / "data"

_ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=str):
        ok, detail = _ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}")


@pytest.fixture(scope="session")
def db_factory():
    cache = {}

    def make(L, T, cycles=True):
        key = (L, T, cycles)
        if key not in cache:
            cache[key] = dovetail(L, T, jobs=4 if L >= 8 else 1, partitions=4 if L >= 8 else 1,
                                  detect_cycles=cycles)
        return cache[key]

    return make


@pytest.fixture(scope="session")
def db3(db_factory):
    return db_factory(3, 100)


@pytest.fixture(scope="session")
def db4(db_factory):
    return db_factory(4, 1000)


@pytest.fixture(scope="session")
def db5(db_factory):
    return db_factory(5, 10_000)
