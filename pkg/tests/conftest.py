import sys

import pytest

from spdclab import build_source, load_config


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance checklist after the usual pytest summary."""
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def default_config():
    return load_config(None)


@pytest.fixture(scope="session")
def source_05(default_config):
    return build_source(default_config, crystal_length_mm=0.5)


@pytest.fixture(scope="session")
def source_3(default_config):
    return build_source(default_config, crystal_length_mm=3.0)
