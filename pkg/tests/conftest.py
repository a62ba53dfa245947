import time
from dataclasses import dataclass, field

import pytest


@dataclass
class Criterion:
    number: int
    title: str
    limit: float
    checks: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self):
        return bool(self.checks) and all(ok for _, ok in self.checks) and self.elapsed < self.limit

    def line(self):
        parts = "; ".join(f"{text} [{'ok' if ok else 'FAIL'}]" for text, ok in self.checks)
        status = "PASS" if self.passed else "FAIL"
        return (f"AC{self.number:<2d} {status}  {self.title}: {parts} "
                f"(runtime {self.elapsed:.1f} s, limit {self.limit:.0f} s)")


class AcceptanceBook:
    def __init__(self):
        self.criteria = {}

    def criterion(self, number, title, limit):
        if number not in self.criteria:
            self.criteria[number] = Criterion(number, title, limit)
        return self.criteria[number]

    def timed(self, number, title, limit):
        return _Timer(self.criterion(number, title, limit))


class _Timer:
    def __init__(self, crit):
        self.crit = crit

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self.crit

    def __exit__(self, *exc):
        self.crit.elapsed += time.perf_counter() - self.t0
        return False


BOOK_KEY = pytest.StashKey[AcceptanceBook]()


def pytest_configure(config):
    config.stash[BOOK_KEY] = AcceptanceBook()


@pytest.fixture(scope="session")
def acceptance(request):
    return request.config.stash[BOOK_KEY]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    book = config.stash.get(BOOK_KEY, None)
    if not book or not book.criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(book.criteria):
        terminalreporter.write_line(book.criteria[number].line())
