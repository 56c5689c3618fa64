import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from icprog.frontend import load_program, parse_program

CORPUS = Path(__file__).resolve().parent.parent / "src" / "icprog" / "corpus"

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

APPEND_TEXT = """
:- mode append(in,in,out).
append([],Ys,Ys).
append([X|Xs],Ys,[X|Zs]) :- append(Xs,Ys,Zs).
"""

APPEND_DELAY_TEXT = APPEND_TEXT + ":- delay append(Xs,_,_) until nonvar(Xs).\n"


def corpus_files():
    return sorted(CORPUS.glob("*.icp"))


def corpus_programs():
    return [load_program(f) for f in corpus_files()]


@pytest.fixture(scope="session")
def append_program():
    return parse_program(APPEND_TEXT, "append")


@pytest.fixture(scope="session")
def append_delay_program():
    return parse_program(APPEND_DELAY_TEXT, "append_delay")


@pytest.fixture(scope="session")
def programs():
    return {p.name: p for p in corpus_programs()}


# -- one verdict line per acceptance criterion ------------------------------

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion checked by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    n, text = mark.args
    ok = rep.passed and _CRITERIA.get(n, (True, text))[0]
    _CRITERIA[n] = (ok, text)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok, text = _CRITERIA[n]
        terminalreporter.write_line("criterion %2d: %s  %s" % (n, "PASS" if ok else "FAIL", text))
