import itertools

import pytest

from primeseries.noise import SeedSpec, sign_at
from primeseries.primes import shared_table


@pytest.fixture(scope="session")
def table_1e6():
    return shared_table(10**6)


@pytest.fixture(scope="session")
def table_1e7():
    return shared_table(10**7)


def seed_with_signs(**signs: int) -> SeedSpec:
    """First stream label whose Rademacher signs match, e.g. seed_with_signs(p2=1, p3=-1)."""
    want = {int(k[1:]): v for k, v in signs.items()}
    for label in itertools.count():
        seed = SeedSpec(7, label)
        if all(sign_at(seed, p) == v for p, v in want.items()):
            return seed


ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
