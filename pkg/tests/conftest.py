import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nextcmd.events import RawEvent  # noqa: E402

T0 = datetime(2017, 3, 1, 10, 0, tzinfo=timezone.utc)


def ev(sid, ms, etype, desc=None):
    return RawEvent(sid, T0 + timedelta(milliseconds=ms), etype, desc)


@pytest.fixture
def make_event():
    return ev


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in mod.TITLES.items():
        if n not in mod.RESULTS:
            terminalreporter.write_line(f"[NOT RUN] {n}. {title}")
            continue
        ok, detail = mod.RESULTS[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n}. {title}: {detail}")
