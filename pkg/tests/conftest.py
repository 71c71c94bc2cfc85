import contextlib

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# number -> (status, title, detail); parametrized cases of one criterion merge into one line
ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


def _record(number: int, status: str, title: str, detail: str) -> None:
    if number in ACCEPTANCE:
        old_status, _, old_detail = ACCEPTANCE[number]
        status = "FAIL" if "FAIL" in (status, old_status) else "PASS"
        detail = f"{old_detail} {detail}".strip()
    ACCEPTANCE[number] = (status, title, detail)


@pytest.fixture
def criterion():
    """Context manager that records a PASS or FAIL line for an acceptance criterion.

    The yielded dict collects measured values for the report line.
    """

    @contextlib.contextmanager
    def check(number: int, title: str):
        detail: dict = {}
        try:
            yield detail
        except BaseException:
            _record(number, "FAIL", title, _fmt(detail))
            print(f"criterion {number}: FAIL {title} {_fmt(detail)}")
            raise
        _record(number, "PASS", title, _fmt(detail))
        print(f"criterion {number}: PASS {title} {_fmt(detail)}")

    return check


def _fmt(detail: dict) -> str:
    return " ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}" for k, v in detail.items())


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(ACCEPTANCE):
        status, title, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {title}  {detail}".rstrip())
