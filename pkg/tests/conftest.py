import pytest

CRITERIA = {
    1: "pants triangle certified with 3 vertices",
    2: "Markoff identity suite",
    3: "crossing resolution converges to slack predictions",
    4: "mutation slack regression against K e^(-2(a+b))",
    5: "hexagon certified, reflection cloud contained",
    6: "g=3 n-gon certified with >= 11 vertices",
    7: "fish hull: slopes angular, peripheral inside, cloud contained",
    8: "angle law bracket [1/8, 8]",
    9: "azimuthal disjunction property",
    10: "verify flags a hull with a deleted vertex",
}
RESULTS = {}


@pytest.fixture
def criterion():
    """record(n, ok, detail) stores a pass/fail line and asserts ok."""

    def record(n, ok, detail=""):
        RESULTS[n] = (bool(ok), detail)
        assert ok, f"criterion {n} failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, title in CRITERIA.items():
        if n in RESULTS:
            ok, detail = RESULTS[n]
            tr.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:2d}. {title}: {detail}")
        else:
            tr.write_line(f"[FAIL] {n:2d}. {title}: not run or raised before a verdict")
