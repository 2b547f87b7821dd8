import random

import pytest

from ckoracle.core import make_outcome_space


def answering(table, default=None):
    """Reporter interface that answers from a dict of agent -> label."""
    def iface(agent, event, omega, tokens):
        return table.get(agent, default)
    return iface


@pytest.fixture
def omega_ab():
    return make_outcome_space(["A", "B"])


@pytest.fixture
def omega_tf():
    return make_outcome_space(["True", "False"])


@pytest.fixture
def rng():
    return random.Random(1234)




def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, title, detail = RESULTS[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:>2}. {title}: {detail}")
