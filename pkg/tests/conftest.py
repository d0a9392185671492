import os
import sys
import time
from contextlib import contextmanager

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", deadline=None, max_examples=400)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES = pytest.StashKey[list]()


@pytest.fixture
def criterion(request, capsys):
    """Context manager factory: times a block, prints one PASS/FAIL line, enforces the runtime limit."""
    lines = request.config.stash.setdefault(ACCEPTANCE_LINES, [])

    @contextmanager
    def run(number: int, title: str, limit: float):
        start = time.perf_counter()
        status, detail = "PASS", ""
        measured = {}
        try:
            yield measured
        except AssertionError as exc:
            status, detail = "FAIL", f" ({str(exc).splitlines()[0] if str(exc) else 'assertion failed'})"
            raise
        finally:
            elapsed = time.perf_counter() - start
            if status == "PASS" and elapsed >= limit:
                status, detail = "FAIL", f" (runtime limit {limit:g} s exceeded)"
            shown = ", ".join(f"{k} {v:.1e}" if isinstance(v, float) else f"{k} {v}" for k, v in measured.items())
            line = f"{status} criterion {number}: {title} [{elapsed:.2f} s]{detail}"
            if shown:
                line += f" | {shown}"
            lines.append(line)
            with capsys.disabled():
                print("\n" + line)
        assert elapsed < limit, f"criterion {number} took {elapsed:.2f} s, limit {limit:g} s"

    return run


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
