import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from symdyn.sequences import EventuallyPeriodicSequence
from symdyn.sft import Sft, enumerate_words, full_shift, golden_mean, is_mixing

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("default")


@st.composite
def sfts(draw, min_size=1, max_size=4, mixing=False):
    n = draw(st.integers(min_size, max_size))
    bits = draw(st.lists(st.booleans(), min_size=n * n, max_size=n * n))
    sft = Sft(range(n), np.array(bits, dtype=bool).reshape(n, n))
    if mixing:
        from hypothesis import assume

        assume(is_mixing(sft))
    return sft


@st.composite
def admissible_words(draw, sft, min_len=1, max_len=8):
    """A random walk in the graph of ``sft`` restricted to essential symbols."""
    ess = [s for s, ok in zip(sft.alphabet, sft.essential) if ok]
    length = draw(st.integers(min_len, max_len))
    w = [draw(st.sampled_from(ess))]
    while len(w) < length:
        nxt = [s for s in sft.successors(w[-1]) if s in ess]
        w.append(draw(st.sampled_from(nxt)))
    return tuple(w)


@st.composite
def sequences(draw, alphabet=(1, 2), max_period=3, max_core=5, origin_range=5):
    sym = st.sampled_from(alphabet)
    left = draw(st.lists(sym, min_size=1, max_size=max_period))
    right = draw(st.lists(sym, min_size=1, max_size=max_period))
    core = draw(st.lists(sym, max_size=max_core))
    origin = draw(st.integers(-origin_range, origin_range))
    return EventuallyPeriodicSequence(left, core, right, origin)


@pytest.fixture
def full2():
    return full_shift((1, 2))


@pytest.fixture
def full01():
    return full_shift((0, 1))


@pytest.fixture
def golden():
    return golden_mean((0, 1))


def brute_words(sft, n):
    return set(enumerate_words(sft, n))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
