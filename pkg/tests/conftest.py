import hypothesis
import numpy as np
import pytest

from genrecog import ExpectationMatrix

hypothesis.settings.register_profile("default", deadline=None, max_examples=50)
hypothesis.settings.register_profile("fast", deadline=None, max_examples=10)
hypothesis.settings.load_profile("default")

FEATURES = ("wheels", "horizontal", "handlebar", "seat")

# acceptance criteria append (number, description, passed) here
ACCEPTANCE_RESULTS = []


@pytest.fixture
def m1():
    return ExpectationMatrix.from_rows([[2, 1, 1, 1], [1, 0, 0, 1]], FEATURES, ("bicycle", "unicycle"))


@pytest.fixture
def m2():
    return ExpectationMatrix.from_rows(
        [[2, 1, 1, 1], [1, 0, 0, 1], [4, 0, 0, 0]], FEATURES, ("bicycle", "unicycle", "rollerblade")
    )


@pytest.fixture
def m3():
    return ExpectationMatrix.from_rows([[2, 0.5, 1, 1], [1, 0, 0, 1]], FEATURES, ("bicycle", "unicycle"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, desc, passed in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {desc}")
