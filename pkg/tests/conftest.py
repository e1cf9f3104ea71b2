from __future__ import annotations

import pytest
from hypothesis import settings

# compiled kernels warm up on first use; timing is not what these tests check
settings.register_profile("lab", deadline=None)
settings.load_profile("lab")

_CRITERIA: dict[int, list[tuple[bool, str]]] = {}


@pytest.fixture
def criterion():
    """Record one acceptance sub-check: ``criterion(n, ok, detail)``."""

    def record(n: int, ok: bool, detail: str) -> bool:
        _CRITERIA.setdefault(n, []).append((bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        checks = _CRITERIA[n]
        status = "PASS" if all(ok for ok, _ in checks) else "FAIL"
        details = "; ".join(d + ("" if ok else " [failed]") for ok, d in checks)
        terminalreporter.write_line(f"criterion {n}: {status} - {details}")
