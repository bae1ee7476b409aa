import os

import pytest

from repinv.cli import corpus_dir
from repinv.frontend.elaborate import load

CORPUS = corpus_dir()
ALL = sorted(f[:-4] for f in os.listdir(CORPUS) if f.endswith(".inv"))


def corpus_path(name: str) -> str:
    return os.path.join(CORPUS, name + ".inv")


_cache = {}


def program(name: str):
    """Elaborated corpus program (shared; runs must not mutate it)."""
    if name not in _cache:
        _cache[name] = load(corpus_path(name))
    return _cache[name]


@pytest.fixture(scope="session")
def listset():
    return program("listset")


@pytest.fixture(scope="session")
def arity(listset):
    return {c.name: c.arity for adt in listset.dts.adts.values() for c in adt.ctors}


# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
