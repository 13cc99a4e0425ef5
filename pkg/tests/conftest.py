"""Shared fixtures and the acceptance-criteria report hook.

``ACCEPTANCE`` collects one line per acceptance criterion as the
acceptance tests run; the terminal-summary hook prints them in a single
block at the end of the session so the pass/fail status of every
criterion is visible at a glance.
"""

from __future__ import annotations

import pytest

from gravpipe.scales import neutron_scales

#: criterion number -> "CRITERION n: PASS|FAIL -- detail" line.
ACCEPTANCE: dict[int, str] = {}


@pytest.fixture(scope="session")
def scales():
    """Canonical neutron scale set used across the suite."""
    return neutron_scales()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
