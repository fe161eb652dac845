import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

# acceptance verdicts collected by test_acceptance.py, echoed at session end
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def choquard_problem():
    from polarsym.choquard import ChoquardProblem

    return ChoquardProblem(R=1.0, p=2.0, n=24)


@pytest.fixture(scope="session")
def ground_state(choquard_problem):
    from polarsym.choquard import solve_ground_state

    return solve_ground_state(choquard_problem)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
