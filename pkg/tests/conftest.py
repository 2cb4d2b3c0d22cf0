"""Shared fixtures; collects per-criterion outcomes of the acceptance suite."""

import pytest

_CRITERIA: dict[int, list[tuple[str, bool, str]]] = {}


@pytest.fixture
def criterion():
    """Record ``(number, label, ok, detail)``; a criterion passes only if every part does."""

    def record(number: int, label: str, ok: bool, detail: str = ""):
        _CRITERIA.setdefault(number, []).append((label, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        parts = _CRITERIA[number]
        status = "PASS" if all(ok for _, ok, _ in parts) else "FAIL"
        failed = [f"{label}: {detail}" for label, ok, detail in parts if not ok]
        note = "; ".join(failed) if failed else ", ".join(label for label, _, _ in parts)
        terminalreporter.write_line(f"criterion {number}: {status}  ({note})")
