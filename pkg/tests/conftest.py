import pytest

from ifskit import kernels
from ifskit.corpus import load_example


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    prev = kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(prev)


@pytest.fixture(scope="session")
def cantor():
    return load_example("cantor_classic")


@pytest.fixture(scope="session")
def cantor_stable():
    return load_example("cantor_stable")


@pytest.fixture(scope="session")
def bony():
    return load_example("bony")


@pytest.fixture(scope="session")
def porcupine():
    return load_example("porcupine")


@pytest.fixture(scope="session")
def involution():
    return load_example("involution")


@pytest.fixture(scope="session")
def nonregular():
    return load_example("nonregular")


@pytest.fixture(scope="session")
def sierpinski():
    return load_example("sierpinski")


# -- acceptance summary -------------------------------------------------------------
ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion.

    Usage: ``criterion(n, title)`` returns a dict the test fills with details;
    the verdict follows the test outcome.
    """
    entry = {}

    def start(number, title):
        entry.update(number=number, title=title, details={})
        return entry["details"]

    yield start
    if entry:
        report = getattr(request.node, "rep_call", None)
        passed = report is not None and report.passed
        ACCEPTANCE[entry["number"]] = (entry["title"], passed, entry["details"])
        print("\n" + _acceptance_line(entry["number"]))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def _acceptance_line(number):
    title, passed, details = ACCEPTANCE[number]
    extra = " ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in details.items())
    return f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}" + (f"  [{extra}]" if extra else "")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(_acceptance_line(number))
