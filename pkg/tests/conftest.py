import pytest

from bfpairing.bf_pairing import bf_pair, octagonal_setup, orthogonality_report
from bfpairing.theta_forms import UnaryThetaSpec


@pytest.fixture(scope="session")
def octagonal():
    """(lattice, f, group, candidates) for p_8(x) + 3 p_8(y) + 3 p_8(z)."""
    return octagonal_setup(8, 1, 3, 3)


@pytest.fixture(scope="session")
def octagonal_result():
    return orthogonality_report(8, 1, 3, 3)


@pytest.fixture(scope="session")
def negative_control(octagonal):
    # adding vartheta_{2,1,3} to f must break the orthogonality
    _, f, group, _ = octagonal
    th = UnaryThetaSpec(2, 1, 3)
    return bf_pair(f + th.to_source(), th, group)


# one line per acceptance criterion, printed after the run
CRITERIA = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
