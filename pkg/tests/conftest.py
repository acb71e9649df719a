from __future__ import annotations

import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from omniscience.core import LinearOrdering
from omniscience.oracle import PacketInstance

EXAMPLE1_USERS = [
    ["a", "c", "e", "f"],
    ["a", "d", "h"],
    ["b", "c", "e", "f", "g", "h"],
    ["a", "c", "f", "g", "h"],
    ["b", "d", "f"],
]
EXAMPLE1_FILE = Path(__file__).resolve().parent.parent / "instances" / "example1.json"


@pytest.fixture
def example1():
    return PacketInstance(EXAMPLE1_USERS)


@pytest.fixture
def phi43251():
    return LinearOrdering.from_one_based([4, 3, 2, 5, 1])


def random_instance(rng: random.Random, n: int, m: int) -> PacketInstance:
    users = [[] for _ in range(n)]
    for p in range(m):
        holders = [i for i in range(n) if rng.random() < 0.5] or [rng.randrange(n)]
        for i in holders:
            users[i].append(f"w{p}")
    return PacketInstance(users)


@st.composite
def packet_instances(draw, n_min=2, n_max=6, m_min=1, m_max=8):
    n = draw(st.integers(n_min, n_max))
    m = draw(st.integers(m_min, m_max))
    cols = draw(st.lists(st.integers(1, (1 << n) - 1), min_size=m, max_size=m))
    users = [[f"w{p}" for p, c in enumerate(cols) if c >> i & 1] for i in range(n)]
    return PacketInstance(users)


# one line per acceptance criterion, printed after the run
ACCEPTANCE: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
