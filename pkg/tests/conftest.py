import pytest

from rankforge.perm import Permutation

# criterion number -> (passed, detail); filled in by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def P(*xs) -> Permutation:
    return Permutation(xs)


ELEVEN_VOTES = (
    [(1, 2, 3, 4, 5)] * 3
    + [(2, 3, 4, 5, 1)] * 2
    + [(3, 2, 4, 5, 1)] * 2
    + [(4, 2, 5, 3, 1)] * 2
    + [(5, 2, 3, 4, 1)] * 2
)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def eleven_votes():
    return list(ELEVEN_VOTES)
