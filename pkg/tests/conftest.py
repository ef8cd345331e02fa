import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from avgquery.bfcore import TruthTable

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@st.composite
def tables(draw, min_n=1, max_n=5):
    n = draw(st.integers(min_n, max_n))
    bits = draw(st.lists(st.integers(0, 1), min_size=1 << n, max_size=1 << n))
    return TruthTable(n, np.array(bits, dtype=np.uint8))


@st.composite
def nonzero_tables(draw, min_n=1, max_n=5):
    f = draw(tables(min_n, max_n))
    if f.weight == 0:
        bits = f.bits.copy()
        bits[draw(st.integers(0, len(bits) - 1))] = 1
        f = TruthTable(f.n, bits)
    return f


def random_table(n, seed, density=0.5):
    rng = np.random.default_rng(seed)
    return TruthTable(n, (rng.random(1 << n) < density).astype(np.uint8))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
