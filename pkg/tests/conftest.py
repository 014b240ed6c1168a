import pathlib
import sys
import time

from hypothesis import settings

sys.path.insert(0, str(pathlib.Path(__file__).parent))

# every property test draws from a fixed example sequence
settings.register_profile("pinned", derandomize=True, deadline=None, print_blob=True)
settings.load_profile("pinned")

SESSION = {"start": None, "acceptance": []}


def pytest_sessionstart(session):
    SESSION["start"] = time.perf_counter()


def pytest_collection_modifyitems(session, config, items):
    # the runtime criterion must see the whole suite, so it runs last
    last = [it for it in items if it.get_closest_marker("runs_last")]
    items[:] = [it for it in items if it not in last] + last


def pytest_configure(config):
    config.addinivalue_line("markers", "runs_last: schedule after all other tests")


def pytest_terminal_summary(terminalreporter):
    if not SESSION["acceptance"]:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(SESSION["acceptance"]):
        terminalreporter.write_line(line)
