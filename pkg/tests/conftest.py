from dataclasses import replace

import pytest
from hypothesis import settings

from coexlab.config import ArrivalModel, ScenarioConfig

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def base() -> ScenarioConfig:
    return ScenarioConfig()


@pytest.fixture
def saturated() -> ScenarioConfig:
    return replace(ScenarioConfig(), arrival=ArrivalModel(mode="continuous"))
