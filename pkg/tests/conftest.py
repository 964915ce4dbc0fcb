import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from commcalc.words import Word

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def words(m, max_len=8):
    letters = [i for i in range(-m, m + 1) if i]
    return st.lists(st.sampled_from(letters), max_size=max_len).map(lambda ls: Word.from_letters(m, ls))


def random_word(rng, m, max_len):
    letters = [i for i in range(-m, m + 1) if i]
    return Word.from_letters(m, [rng.choice(letters) for _ in range(rng.randint(0, max_len))])


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in mod.LINES:
            terminalreporter.write_line(line)
