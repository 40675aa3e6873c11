"""Shared pytest hooks: per-criterion summary lines for the acceptance gate."""

_criterion_lines: list[tuple[int, str]] = []


def record_criterion(num: int, label: str, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    _criterion_lines.append((num, f"{status}  criterion {num:2d}  {label}: {detail}"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criterion_lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_criterion_lines):
        terminalreporter.write_line(line)
