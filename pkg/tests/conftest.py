import math

import pytest

SQRT2 = math.sqrt(2)


@pytest.fixture(autouse=True, scope="session")
def _isolated_cache(tmp_path_factory):
    """Keep a_p / conductor caches out of the user's home during tests."""
    mp = pytest.MonkeyPatch()
    mp.setenv("REGLAB_CACHE", str(tmp_path_factory.mktemp("reglab-cache")))
    yield
    mp.undo()


_CRITERIA_KEY = pytest.StashKey[list]()


@pytest.fixture
def criterion_report(request):
    """Record one PASS/FAIL line per acceptance criterion for the final summary."""
    lines = request.config.stash.setdefault(_CRITERIA_KEY, [])

    def report(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        lines.append(line)
        print(line, flush=True)
        return passed

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_CRITERIA_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
