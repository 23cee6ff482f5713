import time

import numpy as np
import pytest

from specoarse.matrix_core import gen_laplacian, gen_random_symmetric

_ACCEPTANCE = []
_SUITE_LIMIT = 300.0  # seconds, whole test session
_START = [None]


def pytest_sessionstart(session):
    _START[0] = time.perf_counter()


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(number, name, ok, detail=""):
        _ACCEPTANCE.append((number, name, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    elapsed = time.perf_counter() - _START[0]
    seen = {r[0] for r in _ACCEPTANCE}
    rows = list(_ACCEPTANCE) + [(n, "not recorded (not run or errored)", False, "")
                                for n in range(1, 9) if n not in seen]
    for number, name, ok, detail in sorted(rows, key=lambda r: r[0]):
        if number == 8:
            ok = ok and elapsed < _SUITE_LIMIT
            detail += f" session={elapsed:.0f}s (<{_SUITE_LIMIT:.0f}s)"
        tag = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{tag}] criterion {number}: {name}  {detail}")


@pytest.fixture
def lap4():
    return gen_laplacian([4])


@pytest.fixture
def randsym30():
    return gen_random_symmetric(30, 11)


def toeplitz_eigs(n):
    k = np.arange(1, n + 1)
    return 2.0 - 2.0 * np.cos(k * np.pi / (n + 1))
